"""Evaluation of Weyl-Titchmarsh functions from measures and class checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import LowerHalfPlane, RealAxisEvaluation, TailUnbounded, WTError
from .linalg import imag_part, opnorm
from .report import Check, Report, SKIP
from .spectral_measure import SIGMA, TAU, MatrixMeasure, measure_integral, total_mass_with_error
from .tolerances import resolve

GUARD = 1e-3
_PHI = (np.sqrt(5.0) - 1.0) / 2.0
_PLASTIC = 0.7548776662466927


@dataclass(frozen=True)
class EvalGrid:
    """Upper half-plane sample points kept at least ``delta`` above the axis."""

    points: np.ndarray
    delta: float = GUARD

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex))
        if not self.delta > 0:
            raise ValueError("guard band delta must be positive")
        if pts.size and np.min(pts.imag) < self.delta:
            raise ValueError(f"grid points must satisfy Im z >= {self.delta}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    @classmethod
    def standard(cls, n: int = 20) -> "EvalGrid":
        """Low-discrepancy points with Re z in [-5, 5) and Im z in [0.1, 4)."""
        k = np.arange(1, n + 1)
        x = -5.0 + 10.0 * np.mod(k * _PHI, 1.0)
        y = 0.1 * 40.0 ** np.mod(k * _PLASTIC, 1.0)
        return cls(x + 1j * y)

    @classmethod
    def from_pairs(cls, pairs, delta: float = GUARD) -> "EvalGrid":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0] + 1j * arr[:, 1], delta)


@dataclass(frozen=True)
class HerglotzFunction:
    """Matrix function on C minus R; the evaluator maps a 1-D array of points to (n, m, m)."""

    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    provenance: str
    period: float | None = None
    measure: MatrixMeasure | None = None

    @property
    def measure_backed(self) -> bool:
        return self.provenance == "measure"

    def values(self, zs) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        out = np.asarray(self.evaluator(zs), dtype=complex)
        return out.reshape(zs.size, self.dim, self.dim)

    def __call__(self, z) -> np.ndarray:
        if np.ndim(z) == 0:
            return self.values(z)[0]
        return self.values(z)

    @classmethod
    def from_measure(cls, measure: MatrixMeasure, period: float | None = None) -> "HerglotzFunction":
        if measure.kind == SIGMA:
            ev = lambda zs: eval_M(measure, zs)
        else:
            ev = lambda zs: eval_M_tau(measure, zs)
        return cls(measure.dim, ev, "measure", period, measure)


def _points(z, delta: float):
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(zs.imag == 0):
        raise RealAxisEvaluation("direct evaluation on the real axis is not supported")
    if np.any(np.abs(zs.imag) < delta):
        raise RealAxisEvaluation(f"|Im z| below the guard band {delta}")
    return zs


def eval_M(measure: MatrixMeasure, z, *, delta: float = GUARD, full_output: bool = False):
    """M(z) = integral of (lam z + 1)/(lam - z) d sigma.

    The kernel is split as z + (1 + z^2)/(lam - z), so the work is one mass and
    one Cauchy transform.  Scalar z gives (m, m); arrays give (n, m, m).
    """
    measure.require(SIGMA)
    zs = _points(z, delta)
    mass, em = total_mass_with_error(measure)
    phi, ep = measure_integral(measure, "cauchy", zs, SIGMA)
    val = zs[:, None, None] * mass + (1.0 + zs * zs)[:, None, None] * phi
    err = float(np.max(np.abs(zs)) * em + np.max(np.abs(1.0 + zs * zs)) * ep)
    if np.ndim(z) == 0:
        val = val[0]
    return (val, err) if full_output else val


def eval_M_tau(tau: MatrixMeasure, z, *, delta: float = GUARD, full_output: bool = False):
    """M(z) = integral of [1/(lam - z) - lam/(1 + lam^2)] d tau."""
    tau.require(TAU)
    zs = _points(z, delta)
    tb = tau.tail_in(TAU)
    if tau.density is not None and not tau.density.bounded_support() and tb is not None and tb.p <= -1:
        raise TailUnbounded("tau-kernel integral diverges for this density tail")
    val, err = measure_integral(tau, "tau", zs, TAU)
    if np.ndim(z) == 0:
        val = val[0]
    return (val, err) if full_output else val


def _safe_values(F: HerglotzFunction, zs: np.ndarray, report: Report, label: str):
    """Evaluate F on zs; on failure fall back to per-point evaluation and log errors."""
    try:
        return F.values(zs), [True] * zs.size, None
    except WTError:
        pass
    out = np.full((zs.size, F.dim, F.dim), np.nan, dtype=complex)
    ok = []
    first = None
    for k, z in enumerate(zs):
        try:
            out[k] = F.values(z)[0]
            ok.append(True)
        except WTError as exc:
            report.record_error({"stage": label, "z": [z.real, z.imag]}, exc)
            ok.append(False)
            first = first or exc
    return out, ok, first


def herglotz_report(F: HerglotzFunction, grid: EvalGrid, tolerances: dict | None = None) -> Report:
    """Positivity of Im F, normalization F(i) = iI and the reflection symmetry."""
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    tol = tolerances or resolve(use_env=False)
    rep = Report(subject=f"herglotz:{F.provenance}")
    zs = grid.points
    vals, ok, _ = _safe_values(F, zs, rep, "grid")
    eigs = [float(np.min(np.linalg.eigvalsh(imag_part(v)))) for v, good in zip(vals, ok) if good]
    rep.add(Check("herglotz_min_eig", min(eigs) if eigs else None, -tol["herglotz_min_eig"], ">="))

    key = "normalization_measure" if F.measure_backed else "normalization_closed"
    fi, ok_i, _ = _safe_values(F, np.array([1j]), rep, "normalization")
    nd = opnorm(fi[0] - 1j * np.eye(F.dim)) if ok_i[0] else None
    rep.add(Check("normalization", nd, tol[key]))

    try:
        lower = F.values(np.conj(zs))
        upper = vals
        defects = [opnorm(lo - up.conj().T) / (1.0 + opnorm(up))
                   for lo, up, good in zip(lower, upper, ok) if good]
        rep.add(Check("symmetry", max(defects) if defects else None, tol["symmetry"]))
    except LowerHalfPlane as exc:
        rep.add(Check("symmetry", None, tol["symmetry"], status=SKIP, detail=str(exc)))
    except WTError as exc:
        rep.record_error({"stage": "symmetry"}, exc)
        rep.add(Check("symmetry", None, tol["symmetry"]))
    rep.data["grid_size"] = int(zs.size)
    return rep


def function_period_residual(F: HerglotzFunction, b: float, grid: EvalGrid) -> float:
    """max over the grid of ||F(z + b) - F(z)||."""
    if b == 0:
        raise ValueError("period candidate b must be nonzero")
    zs = grid.points
    return opnorm(F.values(zs + b) - F.values(zs))
