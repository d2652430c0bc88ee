"""Check records and verification reports shared by the verifiers and the CLI."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

REPORT_SCHEMA = "kforr.report/1"


def _plain(x):
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class Check:
    """One verified claim.

    ``value`` is what was measured, ``expected`` the target value or bound and
    ``tol`` the tolerance or confidence half-width. Report-only checks are
    recorded but never affect the overall verdict.
    """

    id: str
    value: Any
    expected: Any
    tol: Any
    passed: bool
    report_only: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "value": _plain(self.value),
            "expected": _plain(self.expected),
            "tol": _plain(self.tol),
            "pass": bool(self.passed),
        }
        if self.report_only:
            d["report_only"] = True
        if self.note:
            d["note"] = self.note
        return d

    def line(self) -> str:
        tag = "REPORT" if self.report_only else ("PASS" if self.passed else "FAIL")
        return f"[{tag}] {self.id}: value={_short(self.value)} expected={_short(self.expected)} tol={_short(self.tol)}"


def _short(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return f"<{len(x)} values>"
    return str(x)


def close_check(id, value, expected, tol, rel=False, report_only=False, note="", floor=1.0) -> Check:
    """Absolute or relative agreement check; arrays use the max error.

    Relative errors divide by ``max(|value|, |expected|, floor)``.
    """
    v = np.asarray(value, dtype=np.float64)
    e = np.asarray(expected, dtype=np.float64)
    err = np.abs(v - e)
    if rel:
        err = err / np.maximum(np.maximum(np.abs(v), np.abs(e)), floor)
    passed = bool(np.all(np.isfinite(err)) and err.max(initial=0.0) <= tol)
    return Check(id, _scalar(value), _scalar(expected), tol, passed, report_only, note)


def bound_check(id, value, bound, upper=True, report_only=False, note="", tol=0.0) -> Check:
    """``value <= bound`` (``upper``) or ``value >= bound``, elementwise."""
    v = np.asarray(value, dtype=np.float64)
    b = np.asarray(bound, dtype=np.float64)
    ok = v <= b + tol if upper else v >= b - tol
    return Check(id, _scalar(value), _scalar(bound), tol, bool(np.all(ok)), report_only, note)


def _scalar(x):
    a = np.asarray(x)
    if a.ndim == 0:
        return float(a)
    return a


@dataclass
class VerificationReport:
    config: dict
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.report_only)

    def add(self, check_or_checks):
        if isinstance(check_or_checks, Check):
            self.checks.append(check_or_checks)
        else:
            self.checks.extend(check_or_checks)
        return self

    def to_dict(self) -> dict:
        d = {
            "schema": REPORT_SCHEMA,
            "config": _plain(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }
        if self.extra:
            d.update(_plain(self.extra))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        lines = ["id,value,expected,tol,pass,report_only"]
        for c in self.checks:
            d = c.to_dict()
            lines.append(",".join(
                _csv_cell(d[key]) for key in ("id", "value", "expected", "tol", "pass")
            ) + f",{c.report_only}")
        return "\n".join(lines) + "\n"


def _csv_cell(x):
    if isinstance(x, list):
        return '"' + ";".join(str(v) for v in x) + '"'
    return str(x)


__all__ = ["REPORT_SCHEMA", "Check", "VerificationReport", "close_check", "bound_check"]
