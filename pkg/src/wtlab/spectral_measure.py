"""Matrix-valued spectral measures on the real line.

A :class:`MatrixMeasure` combines finitely many atoms, an optional absolutely
continuous density and an optional *periodic lattice tail* (infinitely many
equal-tau-weight atoms on an arithmetic progression, summed in closed form).

Data are stored once, in a base form, together with an integer ``power``;
the measure's values are ``base * (1 + lambda^2) ** power``.  Converting
between the sigma and tau representations only changes ``power`` and
``kind``, so a round trip returns the original data bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.special import psi

from .errors import (
    DimensionMismatch,
    KindMismatch,
    NormalizationError,
    PoleHit,
    RealAxisEvaluation,
    TailUnbounded,
)
from .linalg import MAX_DIM, as_matrix, check_hermitian_psd, opnorm
from .quadrature import QuadResult, gauss_kronrod, half_line, oscillatory_tail

SIGMA = "sigma"
TAU = "tau"
ENDPOINT_RTOL = 1e-12
Z_CHUNK = 16
DEFAULT_WINDOW = (-50.0, 50.0)


# --------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class DensityTerm:
    """One summand ``envelope(lam) * exp(1j * freq * lam)``.

    ``envelope`` maps a 1-D array of (possibly complex) abscissae to an array
    of shape (n, m, m) and must be analytic where integration contours are
    rotated (outside the declared smoothness windows).
    """

    envelope: Callable[[np.ndarray], np.ndarray]
    freq: float = 0.0


@dataclass(frozen=True)
class Density:
    dim: int
    terms: tuple[DensityTerm, ...]
    windows: tuple[tuple[float, float], ...] = (DEFAULT_WINDOW,)
    support: tuple[float, float] = (-math.inf, math.inf)
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam))
        out = np.zeros((lam.size, self.dim, self.dim), dtype=complex)
        for t in self.terms:
            v = t.envelope(lam)
            out = out + (v if t.freq == 0 else v * np.exp(1j * t.freq * lam)[:, None, None])
        if np.isfinite(self.support[0]) or np.isfinite(self.support[1]):
            inside = (lam.real >= self.support[0]) & (lam.real <= self.support[1])
            out = out * inside[:, None, None]
        return out

    def shifted(self, b: float, power: int) -> "Density":
        """Density lam -> D(lam - b) * (1 + (lam - b)^2) ** power."""

        def wrap(t):
            env, f = t.envelope, t.freq
            phase = np.exp(-1j * f * b) if f else 1.0

            def e(lam):
                u = lam - b
                v = env(u)
                if power:
                    v = v * ((1 + u * u) ** power)[:, None, None]
                return v * phase

            return DensityTerm(e, f)

        return Density(
            dim=self.dim,
            terms=tuple(wrap(t) for t in self.terms),
            windows=tuple((a + b, c + b) for a, c in self.windows),
            support=(self.support[0] + b, self.support[1] + b),
            name=f"{self.name}(shifted)",
            params=dict(self.params, shift=self.params.get("shift", 0.0) + b),
        )

    @property
    def freqs(self) -> list[float]:
        return sorted({t.freq for t in self.terms})

    def bounded_support(self) -> bool:
        return bool(np.isfinite(self.support[0]) and np.isfinite(self.support[1]))


@dataclass(frozen=True)
class TailBound:
    """Assertion ||D(lam)|| <= C / (1 + |lam|^p) for |lam| > cutoff."""

    C: float
    p: float
    cutoff: float = 0.0

    def with_power(self, k: int) -> "TailBound":
        if k == 0:
            return self
        if k > 0:
            return TailBound(self.C * 4.0**k, self.p - 2 * k, max(self.cutoff, 1.0))
        return TailBound(self.C, self.p - 2 * k, self.cutoff)


# --------------------------------------------------------------------------
# periodic lattice tail


def _digamma_sum(start: float, h: float, direction: int, poles, coeffs) -> np.ndarray:
    """sum_{j>=0} sum_i c_i / (start + direction*j*h - p_i), with sum_i c_i = 0."""
    total = 0.0
    for p, c in zip(poles, coeffs):
        if direction > 0:
            total = total - c * psi((start - p) / h)
        else:
            total = total + c * psi((p - start) / h)
    return total / h


def _trigamma(a) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    return np.array([complex(mpmath.psi(1, complex(x))) for x in a])


@dataclass(frozen=True)
class LatticeTail:
    """Atoms at origin + k*step for every integer k outside [k_min, k_max].

    Each carries tau-weight ``weight`` (so sigma-weight weight/(1+lam^2)).
    """

    origin: float
    step: float
    k_min: int
    k_max: int
    weight: np.ndarray

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("lattice step must be positive")
        if self.k_min > self.k_max + 1:
            raise ValueError("lattice k_min must not exceed k_max + 1")

    @property
    def right_start(self) -> float:
        return self.origin + (self.k_max + 1) * self.step

    @property
    def left_start(self) -> float:
        return self.origin + (self.k_min - 1) * self.step

    def _both(self, poles, coeffs):
        h = self.step
        return (_digamma_sum(self.right_start, h, +1, poles, coeffs)
                + _digamma_sum(self.left_start, h, -1, poles, coeffs))

    def _double(self, p):
        h = self.step
        a = (self.right_start - p) / h
        b = (p - self.left_start) / h
        return (_trigamma(a) + _trigamma(b)) / h**2

    def sigma_mass_factor(self) -> float:
        """sum over tail atoms of 1/(1+lam^2)."""
        v = self._both([1j, -1j], [1 / 2j, -1 / 2j])
        return float(np.real(v))

    def sigma_cauchy_factor(self, w: np.ndarray) -> np.ndarray:
        """sum over tail atoms of 1/((lam - w)(1 + lam^2)), vectorized in w."""
        w = np.asarray(w, dtype=complex)
        out = np.empty(w.shape, dtype=complex)
        near_p = np.abs(w - 1j) < 1e-12
        near_m = np.abs(w + 1j) < 1e-12
        gen = ~(near_p | near_m)
        if np.any(gen):
            wg = w[gen]
            a = 1.0 / (1.0 + wg * wg)
            bb = 1.0 / ((1j - wg) * 2j)
            cc = 1.0 / ((-1j - wg) * (-2j))
            out[gen] = self._both([wg, 1j, -1j], [a, bb, cc])
        if np.any(near_p):
            v = self._double(1j)[0] / 2j + 0.25 * self._both([1j, -1j], [1.0, -1.0])
            out[near_p] = v
        if np.any(near_m):
            v = self._double(-1j)[0] / (-2j) + 0.25 * self._both([-1j, 1j], [1.0, -1.0])
            out[near_m] = v
        return out

    def tau_kernel_factor(self, z: np.ndarray) -> np.ndarray:
        """sum over tail atoms of 1/(lam - z) - lam/(1 + lam^2)."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        for idx, zz in np.ndenumerate(z):
            poles = {zz: 1.0}
            for p in (1j, -1j):
                poles[p] = poles.get(p, 0.0) - 0.5
            keys = [p for p, c in poles.items() if c != 0]
            out[idx] = self._both(keys, [poles[p] for p in keys])
        return out

    def indices_in(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Tail indices with atoms in [a, b] and their endpoint multiplicity (1 or 1/2)."""
        h, o = self.step, self.origin
        tol = ENDPOINT_RTOL * max(1.0, abs(a), abs(b))
        lo = math.ceil((a - o - tol) / h)
        hi = math.floor((b - o + tol) / h)
        ks = np.arange(lo, hi + 1)
        ks = ks[(ks < self.k_min) | (ks > self.k_max)]
        lam = o + ks * h
        mult = np.where((np.abs(lam - a) <= tol) | (np.abs(lam - b) <= tol), 0.5, 1.0)
        return lam, mult


# --------------------------------------------------------------------------
# the measure


def _as_weights(weights, dim: int) -> np.ndarray:
    w = np.asarray(weights, dtype=complex)
    if w.size == 0:
        return np.zeros((0, dim, dim), dtype=complex)
    if w.ndim == 1 and dim == 1:
        w = w.reshape(-1, 1, 1)
    if w.ndim != 3 or w.shape[1:] != (dim, dim):
        raise DimensionMismatch(f"weights must have shape (n, {dim}, {dim}), got {w.shape}")
    return w


@dataclass(frozen=True, eq=False)
class MatrixMeasure:
    dim: int
    kind: str = SIGMA
    locations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    base_weights: np.ndarray | None = None
    density: Density | None = None
    lattice: LatticeTail | None = None
    tail: TailBound | None = None
    power: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise DimensionMismatch(f"dimension must be in [1, {MAX_DIM}]")
        if self.kind not in (SIGMA, TAU):
            raise ValueError(f"kind must be '{SIGMA}' or '{TAU}'")
        loc = np.asarray(self.locations, dtype=float).reshape(-1)
        w = _as_weights(self.base_weights if self.base_weights is not None else [], self.dim)
        if w.shape[0] != loc.size:
            raise DimensionMismatch("one weight per atom location required")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "base_weights", w)
        if self.density is not None and self.density.dim != self.dim:
            raise DimensionMismatch("density dimension differs from measure dimension")
        if self.lattice is not None and np.shape(self.lattice.weight) != (self.dim, self.dim):
            raise DimensionMismatch("lattice weight dimension differs from measure dimension")

    # --- views -----------------------------------------------------------

    @property
    def sigma_exponent(self) -> int:
        return self.power - (1 if self.kind == TAU else 0)

    @property
    def weights(self) -> np.ndarray:
        """Atom weights in this measure's own representation."""
        if self.power == 0:
            return self.base_weights
        f = (1.0 + self.locations**2) ** self.power
        return self.base_weights * f[:, None, None]

    def weights_in(self, view: str) -> np.ndarray:
        e = self.sigma_exponent + (1 if view == TAU else 0)
        if e == 0:
            return self.base_weights
        return self.base_weights * ((1.0 + self.locations**2) ** e)[:, None, None]

    @property
    def atoms(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.locations.tolist(), self.weights))

    def density_values(self, lam, view: str | None = None) -> np.ndarray:
        """Density of the measure (or of the given view) at real abscissae."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if self.density is None:
            return np.zeros((lam.size, self.dim, self.dim), dtype=complex)
        e = self._view_exponent(view)
        v = self.density(lam)
        return v if e == 0 else v * ((1.0 + lam**2) ** e)[:, None, None]

    def _view_exponent(self, view: str | None) -> int:
        if view is None:
            return self.power
        return self.sigma_exponent + (1 if view == TAU else 0)

    def tail_in(self, view: str | None = None) -> TailBound | None:
        if self.tail is None:
            return None
        return self.tail.with_power(self._view_exponent(view))

    def is_atomic(self) -> bool:
        return self.density is None and self.lattice is None

    def require(self, kind: str) -> None:
        if self.kind != kind:
            raise KindMismatch(f"operation needs a {kind}-type measure, got {self.kind}")

    # --- constructors ----------------------------------------------------

    @classmethod
    def atomic(cls, locations, weights, kind: str = SIGMA, dim: int | None = None,
               validate: bool = True) -> "MatrixMeasure":
        loc = np.atleast_1d(np.asarray(locations, dtype=float))
        w = np.asarray(weights, dtype=complex)
        if dim is None:
            dim = 1 if w.ndim <= 1 else w.shape[-1]
        m = cls(dim=dim, kind=kind, locations=loc, base_weights=_as_weights(w, dim))
        return m.validated() if validate else m

    def validated(self) -> "MatrixMeasure":
        """Check PSD-ness and (for sigma-type) unit total mass; return self."""
        check_hermitian_psd(self.base_weights, "atom weight")
        if self.density is not None:
            check_hermitian_psd(self.density_values(_density_samples(self.density)), "density sample")
        if self.lattice is not None:
            check_hermitian_psd(self.lattice.weight, "lattice weight")
        if self.kind == SIGMA:
            mass, _ = total_mass_with_error(self)
            defect = opnorm(mass - np.eye(self.dim))
            if defect > 1e-6:
                raise NormalizationError(f"total sigma-mass differs from identity by {defect:.3g}")
        return self


def _density_samples(d: Density) -> np.ndarray:
    pts = []
    for a, b in d.windows:
        a = max(a, d.support[0])
        b = min(b, d.support[1])
        if b > a:
            pts.append(np.linspace(a, b, 97))
    lo = d.support[0] if np.isfinite(d.support[0]) else -1e3
    hi = d.support[1] if np.isfinite(d.support[1]) else 1e3
    pts.append(np.linspace(lo, hi, 41))
    return np.concatenate(pts)


def _scalar(x) -> np.ndarray:
    return np.asarray(x, dtype=complex)


# --------------------------------------------------------------------------
# density integration


def _kernel(name: str, lam, z):
    if name == "one":
        return None
    if name == "cauchy":
        return 1.0 / (lam - z)
    if name == "tau":
        return 1.0 / (lam - z) - lam / (1.0 + lam * lam)
    raise ValueError(name)


def integrate_density(density: Density, exponent: int, kernel: str, zs=None, *,
                      epsabs: float = 1e-13, epsrel: float = 1e-12) -> tuple[np.ndarray, float]:
    """Integrate D(lam)(1+lam^2)^exponent * K(lam, z) over the real line.

    Returns an (m, m) array when ``kernel == 'one'`` and an (nz, m, m) array
    otherwise.  Infinite tails use a rational map (non-oscillating terms) or
    contour rotation with Gauss-Laguerre (oscillating terms).
    """
    if kernel == "one":
        vals, err = _integrate_chunk(density, exponent, kernel, None, epsabs, epsrel)
        return vals, err
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    out = np.empty((zs.size, density.dim, density.dim), dtype=complex)
    err = 0.0
    for s in range(0, zs.size, Z_CHUNK):
        v, e = _integrate_chunk(density, exponent, kernel, zs[s:s + Z_CHUNK], epsabs, epsrel)
        out[s:s + Z_CHUNK] = v
        err = max(err, e)
    return out, err


def _integrand(terms, exponent, kernel, zs, d_support=None):
    def f(lam):
        lam = np.asarray(lam)
        v = 0.0
        for t in terms:
            e = t.envelope(lam)
            if t.freq:
                e = e * np.exp(1j * t.freq * lam)[:, None, None]
            v = v + e
        if exponent:
            v = v * ((1.0 + lam * lam) ** exponent)[:, None, None]
        if zs is None:
            return v
        k = _kernel(kernel, lam[:, None], zs[None, :])
        return v[:, None, :, :] * k[:, :, None, None]

    return f


def _integrate_chunk(density: Density, exponent, kernel, zs, epsabs, epsrel):
    slo, shi = density.support
    wins = [(max(a, slo), min(b, shi)) for a, b in density.windows]
    wins = [w for w in wins if w[1] > w[0]]
    wlo = min([w[0] for w in wins], default=DEFAULT_WINDOW[0] if not np.isfinite(slo) else slo)
    whi = max([w[1] for w in wins], default=DEFAULT_WINDOW[1] if not np.isfinite(shi) else shi)
    nz = [abs(f) for f in density.freqs if f != 0]
    margin = max(10.0, 8.0 / min(nz)) if nz else 10.0
    re = zs.real if zs is not None else np.zeros(0)
    lo = slo if np.isfinite(slo) else min(wlo, (re.min() if re.size else wlo) - margin)
    hi = shi if np.isfinite(shi) else max(whi, (re.max() if re.size else whi) + margin)
    bps = [p for w in wins for p in w]
    if zs is not None:
        bps += [z.real for z in zs if abs(z.imag) < 2.0]
    f = _integrand(density.terms, exponent, kernel, zs)
    core = gauss_kronrod(f, lo, hi, epsabs=epsabs, epsrel=epsrel, breakpoints=bps)
    val, err = core.value, core.error
    for start, direction, finite in ((hi, +1, np.isfinite(shi)), (lo, -1, np.isfinite(slo))):
        if finite:
            continue
        flat = [t for t in density.terms if t.freq == 0]
        if flat:
            r = half_line(_integrand(flat, exponent, kernel, zs), start, direction,
                          epsabs=epsabs, epsrel=epsrel)
            val, err = val + r.value, err + r.error
        for fr in sorted({t.freq for t in density.terms if t.freq != 0}):
            grp = [DensityTerm(t.envelope, 0.0) for t in density.terms if t.freq == fr]
            r = oscillatory_tail(_integrand(grp, exponent, kernel, zs), start, direction, fr)
            val, err = val + r.value, err + r.error
    return val, float(err)


# --------------------------------------------------------------------------
# kernel integrals of whole measures


def _check_points(measure: MatrixMeasure, zs: np.ndarray) -> None:
    if np.any(zs.imag == 0):
        if np.any(np.isin(zs.real[zs.imag == 0], measure.locations)):
            raise PoleHit("evaluation point coincides with an atom")
        raise RealAxisEvaluation("evaluation point on the real axis")


def measure_integral(measure: MatrixMeasure, kernel: str, zs=None, view: str = SIGMA,
                     *, epsabs: float = 1e-13, epsrel: float = 1e-12) -> tuple[np.ndarray, float]:
    """Integral of a named kernel against the measure in the requested view.

    kernel 'one'    -> the view's total mass (m, m)
    kernel 'cauchy' -> int d(view)/(lam - z), shape (nz, m, m)
    kernel 'tau'    -> int [1/(lam - z) - lam/(1 + lam^2)] d(view)
    """
    m = measure.dim
    e = measure._view_exponent(view)
    w = measure.weights_in(view)
    loc = measure.locations
    err = 0.0
    if kernel == "one":
        val = w.sum(axis=0) if w.shape[0] else np.zeros((m, m), dtype=complex)
        if measure.density is not None:
            dv, de = integrate_density(measure.density, e, "one", epsabs=epsabs, epsrel=epsrel)
            val, err = val + dv, err + de
        if measure.lattice is not None:
            if view == TAU:
                raise TailUnbounded("tau-mass of a lattice tail is infinite")
            val = val + measure.lattice.sigma_mass_factor() * measure.lattice.weight
        return val, err

    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    _check_points(measure, zs)
    k = _kernel(kernel, loc[:, None], zs[None, :])  # (n_atoms, nz)
    val = np.einsum("az,aij->zij", k, w) if loc.size else np.zeros((zs.size, m, m), dtype=complex)
    if measure.density is not None:
        tb = measure.tail_in(view)
        if kernel == "cauchy" and tb is not None and not measure.density.bounded_support() and tb.p <= 0:
            raise TailUnbounded("Cauchy transform diverges for this density tail")
        dv, de = integrate_density(measure.density, e, kernel, zs, epsabs=epsabs, epsrel=epsrel)
        val, err = val + dv, err + de
    if measure.lattice is not None:
        lat = measure.lattice
        if view == SIGMA and kernel == "cauchy":
            val = val + lat.sigma_cauchy_factor(zs)[:, None, None] * lat.weight
        elif view == TAU and kernel == "tau":
            val = val + lat.tau_kernel_factor(zs)[:, None, None] * lat.weight
        else:
            raise TailUnbounded(f"kernel '{kernel}' diverges on a lattice tail in the {view} view")
    return val, err


# --------------------------------------------------------------------------
# public operations


def total_mass_with_error(measure: MatrixMeasure) -> tuple[np.ndarray, float]:
    measure.require(SIGMA)
    if "mass" not in measure._cache:
        if measure.density is not None and not measure.density.bounded_support():
            tb = measure.tail_in(SIGMA)
            if tb is not None and tb.p <= 1:
                raise TailUnbounded(f"tail exponent p={tb.p} <= 1: total mass diverges")
        measure._cache["mass"] = measure_integral(measure, "one", view=SIGMA)
    return measure._cache["mass"]


def total_mass(measure: MatrixMeasure) -> np.ndarray:
    """Total sigma-mass: sum of atom weights plus the density integral."""
    return total_mass_with_error(measure)[0]


def tau_from_sigma(measure: MatrixMeasure) -> MatrixMeasure:
    measure.require(SIGMA)
    return replace(measure, kind=TAU, power=measure.power + 1, _cache={})


def sigma_from_tau(measure: MatrixMeasure) -> MatrixMeasure:
    measure.require(TAU)
    return replace(measure, kind=SIGMA, power=measure.power - 1, _cache={})


def shift(measure: MatrixMeasure, b: float) -> MatrixMeasure:
    """Translate the measure by b (atoms to lam + b, density lam -> D(lam - b))."""
    if measure.lattice is not None and measure.kind == SIGMA:
        raise KindMismatch("a sigma-type lattice tail is not translation-covariant; shift the tau view")
    density = measure.density.shifted(b, measure.power) if measure.density is not None else None
    lattice = None
    if measure.lattice is not None:
        lattice = replace(measure.lattice, origin=measure.lattice.origin + b)
    tail = None
    if measure.tail is not None:
        t = measure.tail_in()
        c = t.cutoff
        grow = ((c + abs(b)) / c) ** max(t.p, 0.0) if c > 0 else (1.0 + abs(b)) ** max(t.p, 0.0)
        tail = TailBound(t.C * max(1.0, grow), t.p, c + abs(b))
    return MatrixMeasure(dim=measure.dim, kind=measure.kind, locations=measure.locations + b,
                         base_weights=measure.weights, density=density, lattice=lattice,
                         tail=tail, power=0)


def interval_mass(measure: MatrixMeasure, a: float, b: float,
                  view: str | None = None) -> tuple[np.ndarray, float]:
    """Mass of [a, b]; atoms exactly at an endpoint count with weight 1/2."""
    if not b >= a:
        raise ValueError("interval needs a <= b")
    view = view or measure.kind
    m = measure.dim
    tol = ENDPOINT_RTOL * max(1.0, abs(a), abs(b))
    loc = measure.locations
    w = measure.weights_in(view)
    inside = (loc > a + tol) & (loc < b - tol)
    edge = (np.abs(loc - a) <= tol) | (np.abs(loc - b) <= tol)
    val = w[inside].sum(axis=0) + 0.5 * w[edge].sum(axis=0) if loc.size else np.zeros((m, m), complex)
    err = 0.0
    d = measure.density
    if d is not None and b > a:
        lo, hi = max(a, d.support[0]), min(b, d.support[1])
        if hi > lo:
            f = _integrand(d.terms, measure._view_exponent(view), "one", None)
            bps = [p for win in d.windows for p in win]
            r = gauss_kronrod(f, lo, hi, breakpoints=bps, epsabs=1e-14, epsrel=1e-13)
            val, err = val + r.value, r.error
    if measure.lattice is not None:
        lam, mult = measure.lattice.indices_in(a, b)
        fac = mult if view == TAU else mult / (1.0 + lam**2)
        val = val + float(np.sum(fac)) * measure.lattice.weight
    return np.asarray(val, dtype=complex).reshape(m, m), err


def measure_periodicity_residual(tau: MatrixMeasure, b: float, window: Sequence[float],
                                 cells: int) -> float:
    """max_k ||tau(Delta_k + b) - tau(Delta_k)|| over an even partition of the window."""
    tau.require(TAU)
    a0, b0 = float(window[0]), float(window[1])
    if cells < 1:
        raise ValueError("cells must be >= 1")
    if b0 - a0 < abs(b):
        raise ValueError("window must be at least as long as |b|")
    edges = np.linspace(a0, b0, cells + 1)
    worst = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        m0, _ = interval_mass(tau, lo, hi, TAU)
        m1, _ = interval_mass(tau, lo + b, hi + b, TAU)
        worst = max(worst, opnorm(m1 - m0))
    return worst


def second_moment_divergent(measure: MatrixMeasure) -> bool:
    """Proxy flag for the infinite second moment of sigma (never enforced)."""
    if measure.lattice is not None:
        return True
    if measure.density is not None and not measure.density.bounded_support():
        tb = measure.tail_in(SIGMA)
        return tb is None or tb.p <= 3
    return False


# --------------------------------------------------------------------------
# named densities


def _const_env(mat: np.ndarray):
    mat = np.asarray(mat, dtype=complex)

    def env(lam):
        return np.broadcast_to(mat, (np.size(lam),) + mat.shape)

    return env


def _scaled_env(fn, mat: np.ndarray):
    mat = np.asarray(mat, dtype=complex)

    def env(lam):
        return fn(np.asarray(lam))[:, None, None] * mat

    return env


def _lorentz(lam):
    return 1.0 / (np.pi * (1.0 + lam * lam))


def one_plus_sin_over_pi_1pl2(dim: int = 1, amplitude: float = 1.0, freq: float = 1.0,
                              windows=(DEFAULT_WINDOW,)) -> Density:
    """(1 + A sin(w lam)) / (pi (1 + lam^2)) times the identity."""
    if abs(amplitude) > 1:
        raise ValueError("|amplitude| <= 1 is needed for positivity")
    eye = np.eye(dim)
    terms = [DensityTerm(_scaled_env(_lorentz, eye), 0.0)]
    if amplitude and freq:
        c = amplitude / 2j
        terms += [DensityTerm(_scaled_env(_lorentz, c * eye), freq),
                  DensityTerm(_scaled_env(_lorentz, -c * eye), -freq)]
    return Density(dim, tuple(terms), tuple(windows), name="one_plus_sin_over_pi_1pl2",
                   params={"amplitude": amplitude, "freq": freq})


def one_plus_sin(dim: int = 1, amplitude: float = 1.0, freq: float = 1.0, scale: float = 1.0,
                 windows=(DEFAULT_WINDOW,)) -> Density:
    """scale * (1 + A sin(w lam)) times the identity (a periodic tau-density)."""
    if abs(amplitude) > 1:
        raise ValueError("|amplitude| <= 1 is needed for positivity")
    eye = scale * np.eye(dim)
    terms = [DensityTerm(_const_env(eye), 0.0)]
    if amplitude and freq:
        c = amplitude / 2j
        terms += [DensityTerm(_const_env(c * eye), freq), DensityTerm(_const_env(-c * eye), -freq)]
    return Density(dim, tuple(terms), tuple(windows), name="one_plus_sin",
                   params={"amplitude": amplitude, "freq": freq, "scale": scale})


def lebesgue_over_pi(dim: int = 1, windows=(DEFAULT_WINDOW,)) -> Density:
    return Density(dim, (DensityTerm(_const_env(np.eye(dim) / np.pi), 0.0),), tuple(windows),
                   name="lebesgue_over_pi", params={})


def constant_on_interval(dim: int = 1, a: float = 0.0, b: float = 1.0, value: float = 1.0) -> Density:
    if not b > a:
        raise ValueError("constant_on_interval needs a < b")
    return Density(dim, (DensityTerm(_const_env(value * np.eye(dim)), 0.0),), ((a, b),),
                   support=(a, b), name="constant_on_interval",
                   params={"a": a, "b": b, "value": value})


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def matrix_periodic_2x2(dim: int = 2, windows=(DEFAULT_WINDOW,)) -> Density:
    """(1/pi)[[1 + sin/2, (sin + i sin2)/4], [conj, 1 - sin/2]]: 2pi-periodic, PSD."""
    if dim != 2:
        raise DimensionMismatch("matrix_periodic_2x2 is 2 x 2")
    p = (0.5 * _PAULI_Z + 0.25 * _PAULI_X) / np.pi
    q = -0.25 * _PAULI_Y / np.pi
    terms = (
        DensityTerm(_const_env(np.eye(2) / np.pi), 0.0),
        DensityTerm(_const_env(p / 2j), 1.0),
        DensityTerm(_const_env(-p / 2j), -1.0),
        DensityTerm(_const_env(q / 2j), 2.0),
        DensityTerm(_const_env(-q / 2j), -2.0),
    )
    return Density(2, terms, tuple(windows), name="matrix_periodic_2x2", params={})


NAMED_DENSITIES: dict[str, Callable[..., Density]] = {
    "one_plus_sin_over_pi_1pl2": one_plus_sin_over_pi_1pl2,
    "one_plus_sin": one_plus_sin,
    "lebesgue_over_pi": lebesgue_over_pi,
    "constant_on_interval": constant_on_interval,
    "matrix_periodic_2x2": matrix_periodic_2x2,
}

# default decay descriptors (in the density's own scale)
DEFAULT_TAILS: dict[str, Callable[[dict], TailBound | None]] = {
    "one_plus_sin_over_pi_1pl2": lambda p: TailBound((1 + abs(p.get("amplitude", 1.0))) / np.pi, 2.0, 0.0),
    "one_plus_sin": lambda p: TailBound(2 * abs(p.get("scale", 1.0)) * (1 + abs(p.get("amplitude", 1.0))), 0.0, 0.0),
    "lebesgue_over_pi": lambda p: TailBound(2.0 / np.pi, 0.0, 0.0),
    "constant_on_interval": lambda p: None,
    "matrix_periodic_2x2": lambda p: TailBound(4.0 / np.pi, 0.0, 0.0),
}


def named_density(name: str, dim: int = 1, params: dict | None = None, windows=None) -> Density:
    params = dict(params or {})
    if name not in NAMED_DENSITIES:
        raise KeyError(f"unknown density '{name}' (known: {sorted(NAMED_DENSITIES)})")
    if windows is not None and name != "constant_on_interval":
        params["windows"] = tuple(tuple(map(float, w)) for w in windows)
    return NAMED_DENSITIES[name](dim=dim, **params)


def density_measure(name: str, kind: str = SIGMA, dim: int = 1, params: dict | None = None,
                    atoms=None, windows=None, tail: TailBound | None = None,
                    validate: bool = True) -> MatrixMeasure:
    """Measure with a named density (plus optional atoms given as (loc, weight) pairs)."""
    d = named_density(name, dim, params, windows)
    tb = tail if tail is not None else DEFAULT_TAILS[name](params or {})
    locs, ws = [], []
    for lam, w in atoms or []:
        locs.append(float(lam))
        ws.append(as_matrix(w, dim, "atom weight"))
    m = MatrixMeasure(dim=dim, kind=kind, locations=np.array(locs),
                      base_weights=np.array(ws).reshape(-1, dim, dim), density=d, tail=tb)
    return m.validated() if validate else m


def lattice_measure(step: float, k_max: int, dim: int = 1, origin: float = 0.0,
                    tail: bool = True, validate: bool = True) -> MatrixMeasure:
    """Normalized sigma-measure with equal tau-weights on origin + step*Z.

    Atoms with |k| <= k_max are explicit; the rest form a closed-form tail
    (``tail=False`` drops them and renormalizes the finite part instead).
    """
    ks = np.arange(-k_max, k_max + 1)
    lam = origin + ks * step
    inv = 1.0 / (1.0 + lam**2)
    tl = LatticeTail(origin, step, -k_max, k_max, np.eye(dim, dtype=complex)) if tail else None
    s = float(np.sum(inv)) + (tl.sigma_mass_factor() if tl is not None else 0.0)
    c = 1.0 / s
    w = (c * inv)[:, None, None] * np.eye(dim)
    if tl is not None:
        tl = replace(tl, weight=c * np.eye(dim, dtype=complex))
    m = MatrixMeasure(dim=dim, kind=SIGMA, locations=lam, base_weights=w, lattice=tl)
    return m.validated() if validate else m
