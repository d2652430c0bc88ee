import json

import pytest

from kforr.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_all_ones(tmp_path, capsys):
    p = tmp_path / "z.txt"
    p.write_text(" ".join(["1"] * 12))
    code, out, _ = run(["eval", str(p), "--k", "3"], capsys)
    d = json.loads(out)
    assert code == 0 and d["forr_value"] == 1.0 and d["label"] == "One" and d["accept_probability"] == 1.0
    p.write_text("1 1 1 1\n1 1 1 1\n")
    code, out, _ = run(["eval", str(p), "--k", "2"], capsys)
    assert json.loads(out)["forr_value"] == 0.5


@pytest.mark.parametrize("content", ["1 0 1 1", "1 1 1", "a b", "1 1 1 1 1 1"])
def test_eval_malformed(tmp_path, capsys, content):
    p = tmp_path / "bad.txt"
    p.write_text(content)
    code, _, err = run(["eval", str(p), "--k", "2"], capsys)
    assert code == 2 and "error" in err


def test_eval_missing_file(capsys):
    assert run(["eval", "/nonexistent/file", "--k", "2"], capsys)[0] == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    assert run(["verify-input-dist", "--k", "1"], capsys)[0] == 2


def test_verify_input_dist_small(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify-input-dist", "--n", "4", "--k", "2", "--samples", "20000", "--seed", "3",
                      "--delta", "0.1", "--out", str(out)], capsys)
    d = json.loads(out.read_text())
    assert d["schema"] == "kforr.report/1"
    assert {"id", "value", "expected", "tol", "pass"} <= set(d["checks"][0])
    assert code == (0 if d["pass"] else 1)
    mass = [c for c in d["checks"] if c["id"] == "p1.mass_6delta"][0]
    assert mass.get("report_only") is True


def test_verify_input_dist_haar(capsys):
    code, out, _ = run(["verify-input-dist", "--n", "4", "--k", "2", "--samples", "20000", "--matrix", "haar"], capsys)
    d = json.loads(out)
    assert any(c["id"] == "haar.max_abs_entry" for c in d["checks"])
    assert code == 0


def test_csv_format(capsys):
    code, out, _ = run(["verify-input-dist", "--n", "3", "--k", "2", "--samples", "5000", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "id,value,expected,tol,pass,report_only"


def test_verify_identities_and_perturbation(capsys):
    code, out, _ = run(["verify-identities"], capsys)
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(["verify-identities", "--perturb-psi", "1.01"], capsys)
    assert code == 1 and json.loads(out)["pass"] is False


def test_fourier_tree_file(tmp_path, capsys):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"type": "tree", "nodes": [{"query": 0, "left": 1, "right": 2}, {"leaf": 1.0}, {"leaf": 0.0}]}))
    code, out, _ = run(["fourier", "--tree", str(p)], capsys)
    d = json.loads(out)
    assert code == 0 and d["level_weights"] == [0.5, 0.5]
    assert run(["fourier", "--tree", str(p), "--m", "11"], capsys)[0] == 2
    p.write_text("{not json")
    assert run(["fourier", "--tree", str(p)], capsys)[0] == 2


def test_fourier_random_mode(capsys):
    code, out, _ = run(["fourier", "--trees", "5", "--m", "6", "--seed", "2"], capsys)
    assert code == 0 and json.loads(out)["pass"]


def test_separation_small(capsys):
    code, out, _ = run(["separation", "--n", "6", "--samples", "10000", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0].startswith("algorithm,queries")
    assert any(l.startswith("quantum,1,") for l in lines)
    assert code in (0, 1)
    assert run(["separation", "--samples", "100"], capsys)[0] == 2
