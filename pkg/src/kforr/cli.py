"""Command-line entry point: ``python -m kforr <subcommand> ...``.

Exit codes: 0 when every hard check passes, 1 when one fails, 2 for usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import classical, fourier
from .forrelation import HADAMARD, ForrelationParams, as_blocks, forr_label, forr_value
from .gaussian.identities import run_identity_suite
from .montecarlo import DEFAULT_CHUNK, chunk_rng, estimate_mean, map_chunks
from .quantum import accept_probabilities, accept_probability, query_count
from .report import VerificationReport, bound_check, close_check
from .sampler import (
    haar_orthogonal,
    max_abs_entry,
    p0_second_moment,
    p1_expected_forr,
    p1_mean_closed_form,
    sample_p0,
    sample_p1,
)

MATRIX_STREAM = 99
CI_WIDTH = 3.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int | None
    k: int
    delta: float | None
    matrix: str
    samples: int
    seed: int
    workers: int
    format: str
    out: str | None

    def params(self) -> ForrelationParams:
        return ForrelationParams(self.n, self.k, self.delta)

    def to_dict(self) -> dict:
        d = {key: getattr(self, key) for key in ("subcommand", "n", "k", "delta", "matrix", "samples", "seed", "workers")}
        if self.n is not None:
            d["delta"] = self.params().delta
        return d


def _matrix(config: RunConfig, N: int):
    if config.matrix == HADAMARD:
        return HADAMARD
    return haar_orthogonal(chunk_rng(config.seed, MATRIX_STREAM, 0), N)


def _emit(text: str, config: RunConfig):
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(report: VerificationReport, config: RunConfig) -> str:
    return report.to_json() if config.format == "json" else report.to_csv()


# --- eval ---------------------------------------------------------------------

def read_vector(path: str, k: int, n: int | None):
    try:
        with open(path, encoding="utf-8") as fh:
            tokens = fh.read().split()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        vals = [int(t) for t in tokens]
    except ValueError as exc:
        raise UsageError(f"{path}: tokens must be +1 or -1") from exc
    if not vals or any(v not in (1, -1) for v in vals):
        raise UsageError(f"{path}: tokens must be +1 or -1")
    if len(vals) % k:
        raise UsageError(f"{path}: {len(vals)} values is not a multiple of k={k}")
    N = len(vals) // k
    if N & (N - 1):
        raise UsageError(f"{path}: block length {N} is not a power of two")
    if n is not None and N != 1 << n:
        raise UsageError(f"{path}: expected {k << n} values for n={n}, got {len(vals)}")
    return as_blocks(np.array(vals, dtype=np.int8), k)


def cmd_eval(config: RunConfig, path: str) -> int:
    z = read_vector(path, config.k, config.n)
    n = int(math.log2(z.shape[1]))
    params = ForrelationParams(n, config.k, config.delta)
    M = _matrix(config, params.N)
    value = forr_value(z, M)
    run = accept_probability(z, params, M)
    out = {
        "forr_value": value,
        "label": forr_label(z, params, M).value,
        "delta": params.delta,
        "accept_probability": run.accept_probability,
        "queries": run.queries,
        "gate_estimate": run.gate_estimate,
    }
    if config.format == "json":
        _emit(json.dumps(out, indent=2) + "\n", config)
    else:
        _emit(",".join(out) + "\n" + ",".join(str(v) for v in out.values()) + "\n", config)
    return 0


# --- verify-input-dist ----------------------------------------------------------

def _input_dist_chunks(params, M, dist):
    def chunk(rng, size, c):
        if dist == 1:
            s = sample_p1(rng, params, M, size)
            return forr_value(s.W, M), forr_value(s.Z, M)
        return forr_value(sample_p0(rng, params, size), M)
    return chunk


def verify_input_dist(config: RunConfig) -> VerificationReport:
    params = config.params()
    N, k, delta = params.N, params.k, params.delta
    M = _matrix(config, N)
    report = VerificationReport(config.to_dict())

    p1 = map_chunks(_input_dist_chunks(params, M, 1), config.seed, config.samples, stream=1, workers=config.workers)
    cond = np.concatenate([c[0] for c in p1])
    rounded = np.concatenate([c[1] for c in p1])
    p0 = np.concatenate(map_chunks(_input_dist_chunks(params, M, 0), config.seed, config.samples, stream=0,
                                   workers=config.workers))

    target = p1_mean_closed_form(N, k) if M == HADAMARD else p1_expected_forr(k, M)
    floor = (1.0 / 32.0) ** (k - 1)
    est = estimate_mean(cond)
    est_round = estimate_mean(rounded)
    report.add(close_check("p1.conditional_mean", est.mean, target, CI_WIDTH * est.se,
                           note="3 s.e. around the closed-form mean"))
    report.add(close_check("p1.rounded_mean", est_round.mean, target, CI_WIDTH * est_round.se))
    report.add(bound_check("p1.mean_above_1/32^(k-1)", est.mean - CI_WIDTH * est.se, floor, upper=False))

    sq = estimate_mean(p0**2)
    report.add(close_check("p0.second_moment", sq.mean, p0_second_moment(N), CI_WIDTH * sq.se))
    report.add(bound_check("p0.second_moment_upper", sq.mean + CI_WIDTH * sq.se, 1.1 / N))

    # promise masses at delta
    ones = rounded >= delta
    alpha = estimate_mean(ones.astype(np.float64))
    general = max((target - delta) / (1.0 - delta), 0.0)
    report.add(bound_check("p1.mass_general_bound", alpha.mean + CI_WIDTH * alpha.se, general, upper=False,
                           note="forr <= 1 forces P[forr >= delta] >= (E - delta) / (1 - delta)"))
    paper_regime = delta <= 2.0 ** (-5 * k) + 1e-15
    report.add(bound_check("p1.mass_6delta", alpha.mean + CI_WIDTH * alpha.se, 6.0 * delta, upper=False,
                           report_only=not paper_regime,
                           note="" if paper_regime else "delta above 2^-5k: bound not guaranteed"))
    outside = estimate_mean((np.abs(p0) >= delta / 2.0).astype(np.float64))
    cheb = 4.0 / (delta**2 * N)
    report.add(bound_check("p0.mass_chebyshev", outside.mean - CI_WIDTH * outside.se, cheb,
                           report_only=cheb >= 1.0, note="vacuous (bound >= 1)" if cheb >= 1.0 else ""))
    if M != HADAMARD:
        report.add(bound_check("haar.max_abs_entry", max_abs_entry(M), 3.0 * math.sqrt(math.log(N) / N),
                               report_only=True))
    report.extra = {"statistics": {
        "p1_conditional_mean": est.mean, "p1_conditional_se": est.se,
        "p1_rounded_mean": est_round.mean, "p1_rounded_se": est_round.se,
        "p1_mass_at_delta": alpha.mean, "p0_second_moment": sq.mean, "p0_second_moment_se": sq.se,
        "p0_mass_outside_delta_half": outside.mean, "closed_form_mean": target,
    }}
    return report


# --- verify-identities ------------------------------------------------------------

def verify_identities(config: RunConfig, psi_scale: float = 1.0) -> VerificationReport:
    report = VerificationReport(config.to_dict())
    report.add(run_identity_suite(seed=config.seed, psi_scale=psi_scale))
    return report


# --- fourier ------------------------------------------------------------------------

def _tree_checks(report, tree, m, rng, cases, tag):
    f = classical.tree_accept_function(tree, m)
    table = fourier.transform(f)
    weights = fourier.level_weights(table)
    report.add(close_check(f"{tag}.parseval", float(np.sum(table.coefficients**2)), float(np.mean(f**2)), 1e-12))
    report.add(close_check(f"{tag}.degree_bound", float(weights[tree.depth + 1:].sum()), 0.0, 1e-12))
    report.add(bound_check(f"{tag}.binomial_weight_bound", weights[: tree.depth + 1],
                           [math.comb(tree.depth, ell) for ell in range(tree.depth + 1)], tol=1e-12))
    worst_restriction = 0.0
    transfer_ok = True
    for _ in range(cases):
        mu = rng.uniform(-0.5, 0.5, size=m)
        S = [i for i in range(m) if rng.random() < 0.3]
        lhs, rhs, _ = fourier.check_restriction_identity(f, mu, S)
        worst_restriction = max(worst_restriction, abs(lhs - rhs))
        for ell in range(tree.depth + 1):
            _, _, ok = fourier.check_weight_transfer(tree, mu, ell, m)
            transfer_ok &= ok
    report.add(close_check(f"{tag}.restriction_identity", worst_restriction, 0.0, 1e-10))
    report.add(bound_check(f"{tag}.weight_transfer", 0.0 if transfer_ok else 1.0, 0.0,
                           note="wt^mu_l <= 4^l max_rho wt_l(f_rho) on every sampled mu"))
    return weights


def run_fourier(config: RunConfig, tree_path: str | None, m: int | None, trees: int, depth: int,
                cases: int) -> VerificationReport:
    rng = chunk_rng(config.seed, 0, 0)
    report = VerificationReport(config.to_dict())
    if tree_path is not None:
        try:
            with open(tree_path, encoding="utf-8") as fh:
                tree = classical.tree_from_json(fh.read())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read tree file {tree_path}: {exc}") from exc
        m = m if m is not None else tree.max_query + 1
        if m > fourier.MAX_RESTRICTION_BITS:
            raise UsageError(f"m={m} exceeds the restriction-check guard {fourier.MAX_RESTRICTION_BITS}")
        weights = _tree_checks(report, tree, m, rng, cases, "tree")
        report.extra = {"m": m, "depth": tree.depth, "level_weights": weights.tolist()}
        return report
    m = 8 if m is None else m
    if m > fourier.MAX_RESTRICTION_BITS:
        raise UsageError(f"m={m} exceeds the restriction-check guard {fourier.MAX_RESTRICTION_BITS}")
    sub = VerificationReport({})
    for t in range(trees):
        _tree_checks(sub, classical.random_tree(rng, m, depth), m, rng, cases, f"tree{t}")
    by_kind = {}
    for c in sub.checks:
        by_kind.setdefault(c.id.split(".", 1)[1], []).append(c.passed)
    for kind, flags in by_kind.items():
        report.add(bound_check(f"random_trees.{kind}", float(len(flags) - sum(flags)), 0.0,
                               note=f"{len(flags)} trees, failures counted"))
    report.extra = {"m": m, "depth": depth, "trees": trees,
                    "tal_shape": fourier.tal_shape_statistic(rng, m, depth, min(trees, 50))}
    return report


# --- separation -----------------------------------------------------------------------

def separation_algorithms(params: ForrelationParams, M, seed: int) -> dict:
    rng = chunk_rng(seed, 50, 0)
    k, m = params.k, params.total_bits
    algs = {"quantum": (lambda Z, r: accept_probabilities(Z, M), query_count(k)),
            "constant_0.5": (lambda Z, r: np.full(len(Z), 0.5), 0)}
    for d in (1, 2, 3, 4):
        tree = classical.random_tree(rng, m, d)
        algs[f"random_tree_depth{d}"] = (lambda Z, r, t=tree: t.evaluate(Z.reshape(len(Z), -1)), d)
    mix = classical.random_randomized_tree(rng, m, 4, n_trees=8)
    algs["randomized_tree_depth4"] = (lambda Z, r: mix.evaluate(Z.reshape(len(Z), -1)), 4)
    for s in (4, 16, 64):
        algs[f"tuple_estimator_{s}"] = (
            lambda Z, r, s=s: np.clip(0.5 * (1.0 + classical.tuple_estimates(Z, s, r, M)), 0.0, 1.0), k * s)
    return algs


def run_separation(config: RunConfig):
    if config.samples < 10_000:
        raise UsageError("separation needs at least 10^4 samples")
    params = config.params()
    M = _matrix(config, params.N)
    rows = classical.measure_advantages(separation_algorithms(params, M, config.seed), params, config.samples,
                                        config.seed, M, config.workers, DEFAULT_CHUNK, CI_WIDTH)
    report = VerificationReport(config.to_dict())
    quantum = rows[0]
    classical_rows = rows[1:]
    worst = max(r.ci_high for r in classical_rows)
    report.add(bound_check("separation.quantum_beats_classical_upper_ci", quantum.advantage, worst, upper=False))
    expected = 0.5 * (p1_mean_closed_form(params.N, params.k) if M == HADAMARD else p1_expected_forr(params.k, M))
    report.add(close_check("separation.quantum_advantage", quantum.advantage, expected, CI_WIDTH * quantum.se))
    report.extra = {"rows": [r.to_dict() for r in rows]}
    return report, rows


def _rows_csv(rows) -> str:
    lines = ["algorithm,queries,mean_p1,mean_p0,advantage,se,ci_low,ci_high"]
    for r in rows:
        lines.append(f"{r.name},{r.queries},{r.mean_p1!r},{r.mean_p0!r},{r.advantage!r},{r.se!r},{r.ci_low!r},{r.ci_high!r}")
    return "\n".join(lines) + "\n"


# --- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="log2 of the block length N")
    common.add_argument("--k", type=int, default=2, help="number of blocks")
    common.add_argument("--delta", type=float, default=None, help="promise gap (default 2^-5k)")
    common.add_argument("--matrix", choices=("hadamard", "haar"), default="hadamard")
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="kforr", description="k-fold Forrelation experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    ev = sub.add_parser("eval", parents=[common], help="evaluate forr on a +-1 vector file")
    ev.add_argument("input")
    sub.add_parser("verify-input-dist", parents=[common], help="Monte Carlo checks of p0 and p1")
    vi = sub.add_parser("verify-identities", parents=[common], help="Gaussian identity suite")
    vi.add_argument("--perturb-psi", type=float, default=1.0, help=argparse.SUPPRESS)
    fo = sub.add_parser("fourier", parents=[common], help="Fourier checks on decision trees")
    fo.add_argument("--tree", default=None, help="tree JSON file; omit to generate random trees")
    fo.add_argument("--m", type=int, default=None, help="number of input bits")
    fo.add_argument("--trees", type=int, default=100)
    fo.add_argument("--depth", type=int, default=3)
    fo.add_argument("--cases", type=int, default=3, help="random (mu, S) draws per tree")
    sub.add_parser("separation", parents=[common], help="quantum versus classical advantage table")
    return parser


_DEFAULT_N = {"verify-input-dist": 8, "separation": 12}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    n = args.n if args.n is not None else _DEFAULT_N.get(args.subcommand)
    try:
        config = RunConfig(args.subcommand, n, args.k, args.delta, args.matrix, args.samples, args.seed,
                           args.workers, args.format, args.out)
        if args.samples < 1 or args.workers < 1:
            raise UsageError("--samples and --workers must be positive")
        if n is not None:
            config.params()
        if args.subcommand == "eval":
            return cmd_eval(config, args.input)
        if args.subcommand == "verify-input-dist":
            report = verify_input_dist(config)
        elif args.subcommand == "verify-identities":
            report = verify_identities(config, args.perturb_psi)
        elif args.subcommand == "fourier":
            report = run_fourier(config, args.tree, args.m, args.trees, args.depth, args.cases)
        else:
            report, rows = run_separation(config)
            if config.format == "csv":
                _emit(_rows_csv(rows), config)
                return 0 if report.passed else 1
        _emit(_render(report, config), config)
        return 0 if report.passed else 1
    except (UsageError, ValueError, classical.InvalidTreeError, fourier.ResourceLimitError,
            classical.ResourceLimitError) as exc:
        print(f"kforr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
