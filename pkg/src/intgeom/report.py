"""Structured verification records and their byte-stable serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

VERDICTS = ("pass", "fail", "inconclusive")
REPORT_VERSION = "0.1.0"
CHECK_FIELDS = ("name", "estimate", "standard_error", "tolerance", "verdict")


@dataclass(frozen=True)
class CheckRecord:
    name: str
    estimate: float
    standard_error: float
    tolerance: float
    verdict: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    seed: int
    checks: list = field(default_factory=list)
    wall_time: float | None = None
    version: str = REPORT_VERSION

    def add(self, name, estimate, standard_error, tolerance, verdict, **details) -> CheckRecord:
        rec = CheckRecord(name, float(estimate), float(standard_error), float(tolerance), verdict, details)
        self.checks.append(rec)
        return rec

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(CheckRecord(prefix + c.name, c.estimate, c.standard_error, c.tolerance, c.verdict, c.details))

    @property
    def verdict(self) -> str:
        """fail if any check fails, else inconclusive if any is, else pass."""
        vs = {c.verdict for c in self.checks}
        if "fail" in vs:
            return "fail"
        if "inconclusive" in vs:
            return "inconclusive"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 2, "inconclusive": 3}[self.verdict]


def _num(x):
    """Floats as 17-significant-digit text; non-finite values as strings."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    xf = float(x)
    if not math.isfinite(xf):
        return "inf" if xf > 0 else ("-inf" if xf < 0 else "nan")
    return _Float(xf)


class _Float(float):
    def text(self) -> str:
        return format(float(self), ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return _num(obj)


def report_dict(r: VerificationReport) -> dict:
    out = {
        "suite": r.suite,
        "version": r.version,
        "seed": r.seed,
        "parameters": _plain(r.parameters),
        "verdict": r.verdict,
        "checks": [
            {
                "name": c.name,
                "estimate": _num(c.estimate),
                "standard_error": _num(c.standard_error),
                "tolerance": _num(c.tolerance),
                "verdict": c.verdict,
                "details": _plain(c.details),
            }
            for c in r.checks
        ],
    }
    if r.wall_time is not None:
        out["wall_time"] = _num(r.wall_time)
    return out


def _dump(obj, level: int = 0) -> str:
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, _Float):
        return obj.text()
    return json.dumps(obj)


def _cell(x) -> str:
    v = _num(x)
    return v.text() if isinstance(v, _Float) else str(v)


def emit_report(r: VerificationReport, fmt: str = "json") -> bytes:
    """Serialize with a fixed field order; identical reports give identical bytes."""
    if fmt == "json":
        return (_dump(report_dict(r)) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("suite", "seed") + CHECK_FIELDS)
        for c in r.checks:
            w.writerow((r.suite, r.seed, c.name, _cell(c.estimate), _cell(c.standard_error), _cell(c.tolerance), c.verdict))
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}; use 'json' or 'csv'")
