"""Structured verdicts and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

PASS, FAIL, SKIP, ERROR = "pass", "fail", "skip", "error"


@dataclass
class Check:
    """A single residual compared against a tolerance.

    ``relation`` is '<=' (residual must stay below) or '>=' (a control that
    must stay above).
    """

    name: str
    value: float | None
    tolerance: float
    relation: str = "<="
    status: str = ""
    detail: str = ""

    def __post_init__(self):
        if not self.status:
            if self.value is None or not math.isfinite(self.value):
                self.status = ERROR
            elif self.relation == "<=":
                self.status = PASS if self.value <= self.tolerance else FAIL
            else:
                self.status = PASS if self.value >= self.tolerance else FAIL

    @property
    def ok(self) -> bool:
        return self.status in (PASS, SKIP)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "tolerance": self.tolerance,
                "relation": self.relation, "status": self.status, "detail": self.detail}

    def line(self) -> str:
        v = "n/a" if self.value is None else f"{self.value:.3e}"
        extra = f" ({self.detail})" if self.detail else ""
        return f"[{self.status.upper()}] {self.name}: {v} {self.relation} {self.tolerance:g}{extra}"


@dataclass
class Report:
    subject: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks) and not self.errors

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def record_error(self, where, exc: Exception) -> None:
        self.errors.append({"where": where, "error": type(exc).__name__,
                            "code": getattr(exc, "code", "error"), "message": str(exc)})

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks],
                "data": jsonable(self.data), "errors": self.errors}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def jsonable(obj):
    """Convert numpy/complex containers into plain JSON types ([re, im] for complex)."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def matrix_to_json(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def values_csv(zs, values) -> str:
    """CSV with columns re_z, im_z, entryindex, re, im (row-major entry index)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re_z", "im_z", "entryindex", "re", "im"])
    for z, val in zip(np.atleast_1d(zs), values):
        flat = np.asarray(val, dtype=complex).ravel()
        for k, v in enumerate(flat):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), k, repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
