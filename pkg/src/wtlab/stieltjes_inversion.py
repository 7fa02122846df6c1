"""Recovery of interval masses from the Cauchy transform.

The contour is the pair of antiparallel horizontal segments at height +-eps
over [alpha, beta]; the contour integrals for a geometric eps sequence are
extrapolated to eps -> 0 with a Richardson tableau in powers of eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ExtrapolationDiverged
from .linalg import opnorm
from .spectral_measure import MatrixMeasure, measure_integral


def cauchy_transform(measure: MatrixMeasure, z, *, full_output: bool = False):
    """Phi(z) = integral of d mu/(lam - z) in the measure's own representation."""
    val, err = measure_integral(measure, "cauchy", z, measure.kind)
    if np.ndim(z) == 0:
        val = val[0]
    return (val, err) if full_output else val


WEIGHTS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": lambda z: np.ones_like(z),
    "one_plus_l2": lambda z: 1.0 + z * z,
}


@dataclass(frozen=True)
class ContourSchedule:
    """eps_k = eps0 * ratio**k, k < count; ``nodes`` is a floor on the per-segment count.

    Each segment actually uses max(nodes, 3 (beta - alpha)/eps + 1) trapezoid
    nodes so the spacing resolves the Lorentzian peaks of width eps.
    """

    alpha: float
    beta: float
    eps0: float | None = None
    ratio: float = 0.5
    count: int = 6
    nodes: int = 512
    phi: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.alpha < self.beta:
            raise ValueError("schedule needs alpha < beta")
        if self.eps0 is None:
            object.__setattr__(self, "eps0", 0.1 * (self.beta - self.alpha))
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 3:
            raise ValueError("at least three eps values are required")
        if self.nodes < 2:
            raise ValueError("need at least two nodes per segment")

    @property
    def eps(self) -> np.ndarray:
        return self.eps0 * self.ratio ** np.arange(self.count)

    def node_count(self, eps: float) -> int:
        return max(self.nodes, int(math.ceil(3.0 * (self.beta - self.alpha) / eps)) + 1)


@dataclass(frozen=True)
class InversionResult:
    estimate: np.ndarray
    error: float
    per_eps: list[tuple[float, np.ndarray]]
    order: int


def contour_value(phi_fn, Phi, alpha, beta, eps, n, weight=None) -> np.ndarray:
    """-(1/2 pi i) times the integral over the two horizontal segments."""
    x = np.linspace(alpha, beta, n)
    w = np.full(n, (beta - alpha) / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    wf = weight or WEIGHTS["one"]
    zl = x - 1j * eps
    zu = x + 1j * eps
    lower = np.asarray(Phi(zl)) * (w * wf(zl))[:, None, None]
    upper = np.asarray(Phi(zu)) * (w * wf(zu))[:, None, None]
    contour = lower.sum(axis=0) - upper.sum(axis=0)
    return -contour / (2j * np.pi)


def richardson(values: list[np.ndarray], ratio: float) -> tuple[np.ndarray, float, int]:
    """Best tableau entry, chosen where successive columns agree most closely."""
    table = [list(values)]
    for j in range(1, len(values)):
        prev = table[-1]
        rj = ratio**j
        table.append([(prev[k + 1] - rj * prev[k]) / (1.0 - rj) for k in range(len(prev) - 1)])
    best = None
    for j in range(1, len(table)):
        d = opnorm(table[j][-1] - table[j - 1][-1])
        if best is None or d < best[1]:
            best = (table[j][-1], d, j)
    return best


def invert_interval(Phi: Callable, schedule: ContourSchedule) -> InversionResult:
    """Estimate the integral of phi d sigma over [alpha, beta] from Phi = Cauchy transform.

    ``Phi`` maps a 1-D complex array to (n, m, m).  With no phi the result is
    the interval mass with endpoint atoms at half weight.  A non-analytic phi
    voids the convergence argument.
    """
    vals = []
    for eps in schedule.eps:
        v = contour_value(None, Phi, schedule.alpha, schedule.beta, eps,
                          schedule.node_count(eps), schedule.phi)
        vals.append(v)
    diffs = [opnorm(vals[k] - vals[k - 1]) for k in range(1, len(vals))]
    scale = max(1.0, max(opnorm(v) for v in vals))
    if all(b >= a for a, b in zip(diffs, diffs[1:])) and diffs[-1] > 1e-10 * scale:
        raise ExtrapolationDiverged(f"contour values do not settle as eps -> 0 (diffs {diffs})")
    est, err, order = richardson(vals, schedule.ratio)
    return InversionResult(est, err, list(zip(schedule.eps.tolist(), vals)), order)


def measure_phi(measure: MatrixMeasure) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized Cauchy transform closure suitable for :func:`invert_interval`."""
    return lambda zs: cauchy_transform(measure, np.atleast_1d(zs))


def phi_from_function(F: Callable[[np.ndarray], np.ndarray], dim: int) -> Callable:
    """Cauchy transform of sigma rebuilt from M: (M(z) - z I)/(1 + z^2)."""
    eye = np.eye(dim)

    def Phi(zs):
        zs = np.atleast_1d(zs)
        return (np.asarray(F(zs)) - zs[:, None, None] * eye) / (1.0 + zs * zs)[:, None, None]

    return Phi
