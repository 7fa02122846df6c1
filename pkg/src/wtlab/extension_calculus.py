"""Defect-space calculus: the A/B kernel functions, extension WT functions and
the action of the shift on unitary boundary parameters.

All kernels used here have the form alpha + beta/(lam - w), so every quantity
reduces to the total mass and one Cauchy transform of sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CommutationPreconditionFailed,
    DimensionMismatch,
    InconsistentPeriod,
    PeriodicityPreconditionFailed,
    SingularBracket,
)
from .herglotz_eval import eval_M
from .linalg import as_matrix, herm_inv_sqrt, opnorm, polar_unitary, random_unitary, unitarity_defect
from .spectral_measure import (
    SIGMA,
    MatrixMeasure,
    _density_samples,
    measure_integral,
    measure_periodicity_residual,
    tau_from_sigma,
    total_mass,
)

COND_LIMIT = 1e12
PERIODIC_TOL = 1e-8


def _affine_kernel(measure: MatrixMeasure, w, beta) -> np.ndarray:
    """int (1 + beta/(lam - w)) d sigma for arrays w, beta (terms with beta = 0 skipped)."""
    measure.require(SIGMA)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    beta = np.broadcast_to(np.asarray(beta, dtype=complex), w.shape)
    mass = total_mass(measure)
    out = np.broadcast_to(mass, (w.size,) + mass.shape).copy()
    live = beta != 0
    if np.any(live):
        phi, _ = measure_integral(measure, "cauchy", w[live], SIGMA)
        out[live] = out[live] + beta[live][:, None, None] * phi
    return out


def script_A(measure: MatrixMeasure, z):
    """int (lam - i)/(lam - z) d sigma."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    v = _affine_kernel(measure, zs, zs - 1j)
    return v[0] if np.ndim(z) == 0 else v


def script_B(measure: MatrixMeasure, z):
    """int (lam + i)/(lam - z) d sigma."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    v = _affine_kernel(measure, zs, zs + 1j)
    return v[0] if np.ndim(z) == 0 else v


def _default_window(measure: MatrixMeasure, b: float) -> tuple[tuple[float, float], int]:
    w = max(4.0 * abs(b), 10.0)
    lo, hi = -w, w
    if measure.locations.size:
        lo = min(lo, float(measure.locations.min()) - abs(b))
        hi = max(hi, float(measure.locations.max()) + abs(b))
    cells = int(min(400, max(8, math.ceil(4 * (hi - lo) / abs(b)))))
    return (lo, hi), cells


def tau_periodicity_defect(measure: MatrixMeasure, b: float, window=None, cells=None) -> float:
    """Measure-level periodicity residual of the tau view (cached per b)."""
    key = ("tau_periodic", float(b), None if window is None else tuple(window), cells)
    if key not in measure._cache:
        win, nc = _default_window(measure, b)
        tau = tau_from_sigma(measure) if measure.kind == SIGMA else measure
        measure._cache[key] = measure_periodicity_residual(tau, b, window or win, cells or nc)
    return measure._cache[key]


def require_tau_periodic(measure: MatrixMeasure, b: float, tol: float = PERIODIC_TOL) -> None:
    if b == 0:
        return
    r = tau_periodicity_defect(measure, b)
    if r > tol:
        raise PeriodicityPreconditionFailed(f"tau-measure is not {b}-periodic (residual {r:.3g})")


def ab_shift_residual(measure: MatrixMeasure, z, b: float, *, check: bool = True) -> float:
    """Defect in A(z+b) = (z+i)/(z+b+i) A(z) and B(z+b) = (z-i)/(z+b-i) B(z)."""
    if check:
        require_tau_periodic(measure, b)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    a0, a1 = script_A(measure, zs), script_A(measure, zs + b)
    b0, b1 = script_B(measure, zs), script_B(measure, zs + b)
    ra = a1 - ((zs + 1j) / (zs + b + 1j))[:, None, None] * a0
    rb = b1 - ((zs - 1j) / (zs + b - 1j))[:, None, None] * b0
    return max(opnorm(ra), opnorm(rb))


def _solve_right(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x @ inv(y) via a solve."""
    return np.linalg.solve(y.T, x.T).T


def extension_M(measure0: MatrixMeasure, V, z, *, full_output: bool = False):
    """WT function of the extension with boundary parameter V.

    M0(z) + (1 + z^2) A (I - V) [(i + z) A V + (i - z) B]^-1 B.  With V = I
    the correction is skipped, so the result is eval_M exactly.
    """
    m = measure0.dim
    V = as_matrix(V, m, "V")
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    m0 = np.atleast_3d(eval_M(measure0, zs)).reshape(zs.size, m, m)
    eye = np.eye(m)
    conds = np.ones(zs.size)
    if np.array_equal(V, eye):
        out = m0
    else:
        A = script_A(measure0, zs)
        B = script_B(measure0, zs)
        out = np.empty_like(m0)
        for k, zz in enumerate(zs):
            br = (1j + zz) * A[k] @ V + (1j - zz) * B[k]
            c = np.linalg.cond(br)
            conds[k] = c
            if not np.isfinite(c) or c > COND_LIMIT:
                raise SingularBracket(f"bracket condition number {c:.3g} at z={zz}")
            corr = np.linalg.solve(br, B[k])
            out[k] = m0[k] + (1.0 + zz * zz) * (A[k] @ (eye - V) @ corr)
    val = out[0] if np.ndim(z) == 0 else out
    if full_output:
        return val, (float(conds[0]) if np.ndim(z) == 0 else conds)
    return val


# --------------------------------------------------------------------------
# shift group on boundary parameters


@dataclass(frozen=True, eq=False)
class ExtensionContext:
    """Model data for the shift action: sigma, step b, unitary D and defect bases.

    ``phi_coeffs`` X gives phi_k = X e_k (constant sections) and ``psi_coeffs``
    Y gives psi_k = (lam - i)/(lam + i) Y e_k.  Both default to mass^(-1/2),
    which makes the bases orthonormal.
    """

    measure: MatrixMeasure
    b: float
    D: np.ndarray
    phi_coeffs: np.ndarray | None = None
    psi_coeffs: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        ms = self.measure
        ms.require(SIGMA)
        m = ms.dim
        D = as_matrix(self.D, m, "D")
        if unitarity_defect(D) > 1e-10:
            raise DimensionMismatch("D must be unitary")
        object.__setattr__(self, "D", D)
        mass = total_mass(ms)
        default = herm_inv_sqrt(mass)
        X = default if self.phi_coeffs is None else as_matrix(self.phi_coeffs, m, "phi basis")
        Y = default if self.psi_coeffs is None else as_matrix(self.psi_coeffs, m, "psi basis")
        for name, c in (("phi", X), ("psi", Y)):
            # |(lam - i)/(lam + i)| = 1 on R, so both Gram matrices are C* mass C
            if opnorm(c.conj().T @ mass @ c - np.eye(m)) > 1e-8:
                raise ValueError(f"{name} basis is not orthonormal")
        object.__setattr__(self, "phi_coeffs", X)
        object.__setattr__(self, "psi_coeffs", Y)
        mats = [ms.base_weights[k] for k in range(ms.base_weights.shape[0])]
        if ms.density is not None:
            mats += list(ms.density_values(_density_samples(ms.density)[::7]))
        if ms.lattice is not None:
            mats.append(ms.lattice.weight)
        for w in mats:
            if opnorm(D @ w - w @ D) > 1e-10 * max(1.0, opnorm(w)):
                raise CommutationPreconditionFailed("D does not commute with the measure weights")

    @property
    def dim(self) -> int:
        return self.measure.dim


def transition_matrices(ctx: ExtensionContext, n: int):
    """(A_n, B_n, C_n, D_n) with entry (l, k) = (U^n basis_k, basis_l)."""
    key = ("tm", int(n))
    if key in ctx._cache:
        return ctx._cache[key]
    require_tau_periodic(ctx.measure, ctx.b)
    nb = n * ctx.b
    Dn = np.linalg.matrix_power(ctx.D, int(n))
    X, Y = ctx.phi_coeffs, ctx.psi_coeffs
    # kernels (lam -/+ i)/(lam - w) written as 1 + beta/(lam - w)
    w = np.array([nb + 1j, nb - 1j, nb + 1j, nb - 1j])
    beta = np.array([nb, nb, nb + 2j, nb - 2j])
    kD, kA, kB, kC = _affine_kernel(ctx.measure, w, beta)
    A_n = Y.conj().T @ kA @ Dn @ Y
    B_n = Y.conj().T @ kB @ Dn @ X
    C_n = X.conj().T @ kC @ Dn @ Y
    D_n = X.conj().T @ kD @ Dn @ X
    ctx._cache[key] = (A_n, B_n, C_n, D_n)
    return ctx._cache[key]


def group_map(ctx: ExtensionContext, V0, n: int) -> np.ndarray:
    """T_n(V0) = [(nb - 2i) A_n V0 - nb B_n] [nb C_n V0 - (nb + 2i) D_n]^-1.

    T_0 is the identity.  The unitarity defect of the output measures the
    quality of the underlying integrals (see :func:`unitarity_defect`).
    """
    V0 = as_matrix(V0, ctx.dim, "V0")
    if n == 0:
        return V0.copy()
    A, B, C, D = transition_matrices(ctx, n)
    nb = n * ctx.b
    num = (nb - 2j) * A @ V0 - nb * B
    den = nb * C @ V0 - (nb + 2j) * D
    c = np.linalg.cond(den)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise SingularBracket(f"denominator condition number {c:.3g}")
    return _solve_right(num, den)


def _first_return(ctx, V0, n_max, tol):
    V = V0
    for n in range(1, n_max + 1):
        V = polar_unitary(group_map(ctx, V, 1))
        if opnorm(V - V0) <= tol:
            return n
    return None


def orbit_period(ctx: ExtensionContext, V0, n_max: int, tol: float, *, seed: int = 20240517,
                 second=None) -> int | None:
    """Smallest n <= n_max with T_n(V0) = V0 (to tol), confirmed on a second start."""
    if n_max < 1 or not tol > 0:
        raise ValueError("need n_max >= 1 and tol > 0")
    V0 = as_matrix(V0, ctx.dim, "V0")
    p1 = _first_return(ctx, V0, n_max, tol)
    V1 = random_unitary(ctx.dim, np.random.default_rng(seed)) if second is None else as_matrix(second, ctx.dim)
    p2 = _first_return(ctx, V1, n_max, tol)
    if p1 != p2:
        raise InconsistentPeriod(f"orbit periods differ between starting points: {p1} vs {p2}")
    return p1
