"""Finite atomic realization of the multiplication-operator model.

Model vectors are stored in whitened coordinates g_j = W_j^(1/2) f_j, so the
L2(sigma) inner product becomes the Euclidean one and H is diagonal.  An
optional closed-form lattice tail of the measure is carried along for
evaluating the WT function; operator matrices only live on the explicit atoms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import (
    CommutationPreconditionFailed,
    DimensionMismatch,
    LatticeIncompatible,
    PoleHit,
    RankDeficiency,
    RealAxisEvaluation,
    SampleClosureViolated,
    WindowExceeded,
)
from .linalg import as_matrix, herm_inv_sqrt, herm_sqrt, opnorm
from .spectral_measure import (
    ENDPOINT_RTOL,
    SIGMA,
    LatticeTail,
    MatrixMeasure,
    total_mass,
)

STEP_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteModel:
    dim: int
    points: np.ndarray          # (N,) increasing
    weights: np.ndarray         # (N, m, m) sigma-weights
    layers: int
    step: float | None
    tail: LatticeTail | None = None

    @property
    def N(self) -> int:
        return self.points.size

    @property
    def size(self) -> int:
        return self.N * self.dim

    @property
    def interior(self) -> range:
        return range(self.layers, self.N - self.layers)

    def sqrt_weights(self) -> np.ndarray:
        return np.array([herm_sqrt(w) for w in self.weights])

    def H(self) -> np.ndarray:
        return np.diag(np.repeat(self.points, self.dim)).astype(complex)

    def interior_projector(self) -> np.ndarray:
        mask = np.zeros(self.N)
        mask[list(self.interior)] = 1.0
        return np.diag(np.repeat(mask, self.dim)).astype(complex)

    def embed_constants(self) -> np.ndarray:
        """(N m, m) matrix whose columns are the whitened constant sections e_k."""
        return self.sqrt_weights().reshape(self.size, self.dim)

    def whiten(self, f: np.ndarray) -> np.ndarray:
        """f given as (N, m) section values -> whitened model vector."""
        f = np.asarray(f, dtype=complex).reshape(self.N, self.dim)
        s = self.sqrt_weights()
        return np.einsum("jab,jb->ja", s, f).reshape(-1)

    def measure(self) -> MatrixMeasure:
        return MatrixMeasure(dim=self.dim, kind=SIGMA, locations=self.points,
                             base_weights=self.weights, lattice=self.tail)

    def domain_functional(self) -> np.ndarray:
        """(m, N m) matrix of f -> sum_j (lam_j + i) W_j f_j (section coordinates)."""
        blocks = [(lam + 1j) * w for lam, w in zip(self.points, self.weights)]
        return np.concatenate(blocks, axis=1)


def _detect_step(points: np.ndarray) -> float | None:
    if points.size < 2:
        return None
    d = np.diff(points)
    h = float(np.mean(d))
    if np.all(np.abs(d - h) <= STEP_RTOL * max(1.0, abs(h))):
        return h
    return None


def build_model(measure: MatrixMeasure, boundary_layers: int = 0) -> FiniteModel:
    """Model of an atomic sigma-measure (a closed-form lattice tail is allowed).

    Weights are renormalized to unit total mass when they are off by more
    than 1e-12.
    """
    measure.require(SIGMA)
    if measure.density is not None:
        raise ValueError("build_model needs a purely atomic measure")
    if boundary_layers < 0:
        raise ValueError("boundary_layers must be >= 0")
    order = np.argsort(measure.locations, kind="stable")
    pts = measure.locations[order]
    if np.any(np.diff(pts) == 0):
        raise ValueError("atom locations must be distinct")
    w = measure.weights[order]
    tail = measure.lattice
    m = measure.dim
    mass = total_mass(measure)
    if opnorm(mass - np.eye(m)) > 1e-12:
        g = herm_inv_sqrt(mass)
        w = np.einsum("ab,jbc,cd->jad", g, w, g)
        if tail is not None:
            tail = LatticeTail(tail.origin, tail.step, tail.k_min, tail.k_max, g @ tail.weight @ g)
    model = FiniteModel(m, pts, w, boundary_layers, _detect_step(pts), tail)
    if pts.size < 2 * m + 2 * boundary_layers:
        warnings.warn("fewer lattice points than 2m + 2*boundary_layers; the model is degenerate",
                      RuntimeWarning, stacklevel=2)
    rank = np.linalg.matrix_rank(model.domain_functional())
    if rank < m:
        raise RankDeficiency(f"domain functional has rank {rank} < {m}")
    return model


def _check_z(model: FiniteModel, z: complex) -> None:
    if z.imag == 0:
        if np.any(np.isclose(model.points, z.real, rtol=0, atol=0)):
            raise PoleHit("z coincides with a lattice point")
        raise RealAxisEvaluation("z must be off the real axis")


def defect_vector(model: FiniteModel, z: complex, xi) -> np.ndarray:
    """Section values ((lam_j - i)/(lam_j - z)) xi, shape (N, m)."""
    z = complex(z)
    _check_z(model, z)
    xi = np.asarray(xi, dtype=complex).reshape(model.dim)
    r = (model.points - 1j) / (model.points - z)
    return r[:, None] * xi[None, :]


def defect_orthogonality_residual(model: FiniteModel, z: complex, xi) -> float:
    """max |<(H - conj z) g, h>| / ||h|| over an orthonormal basis g of the symmetric domain."""
    h = model.whiten(defect_vector(model, z, xi))
    ker = null_space(model.domain_functional())  # section coordinates
    if ker.size == 0:
        return 0.0
    s = model.sqrt_weights()
    wg = np.einsum("jab,jbk->jak", s, ker.reshape(model.N, model.dim, -1)).reshape(model.size, -1)
    # orthonormalize in the model inner product
    q, _ = np.linalg.qr(wg)
    hz = (np.repeat(model.points, model.dim) - np.conj(z))[:, None] * q
    return float(np.max(np.abs(hz.conj().T @ h)) / np.linalg.norm(h))


def _stride(model: FiniteModel, b: float) -> int:
    if b == 0:
        return 0
    if model.step is None:
        raise LatticeIncompatible("lattice is not an arithmetic progression")
    s = b / model.step
    k = int(round(s))
    if abs(s - k) > STEP_RTOL * max(1.0, abs(s)):
        raise LatticeIncompatible(f"shift {b} is not a multiple of the step {model.step}")
    return k


def s_type_matrix(model: FiniteModel, D, b: float) -> np.ndarray:
    """f(lam) -> D (lam - i)/(lam - i - b) f(lam - b), points shifted off the lattice dropped."""
    m = model.dim
    D = as_matrix(D, m, "D")
    s = _stride(model, b)
    _need_layers(model, b)
    for w in model.weights:
        if opnorm(D @ w - w @ D) > 1e-10 * max(1.0, opnorm(w)):
            raise CommutationPreconditionFailed("D does not commute with the weights")
    sq = model.sqrt_weights()
    isq = []
    for w in sq:
        try:
            isq.append(np.linalg.inv(w))
        except np.linalg.LinAlgError:
            isq.append(np.linalg.pinv(w))
    U = np.zeros((model.size, model.size), dtype=complex)
    for j in range(model.N):
        src = j - s
        if not 0 <= src < model.N:
            continue
        lam = model.points[j]
        r = (lam - 1j) / (lam - 1j - b)
        U[j * m:(j + 1) * m, src * m:(src + 1) * m] = r * sq[j] @ D @ isq[src]
    return U


def _need_layers(model: FiniteModel, b: float) -> None:
    s = abs(_stride(model, b)) if b else 0
    if model.layers < s:
        raise WindowExceeded(f"boundary_layers={model.layers} < shift stride {s}")


def isometry_defect(model: FiniteModel, U: np.ndarray) -> float:
    """||P(U* U - I)P|| on the interior window."""
    P = model.interior_projector()
    return opnorm(P @ (U.conj().T @ U - np.eye(model.size)) @ P)


def commutation_residual(model: FiniteModel, U: np.ndarray, b: float) -> float:
    """||P(U H U* - H + b I)P|| on the interior window."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (model.size, model.size):
        raise DimensionMismatch("U must act on the model space")
    H = model.H()
    P = model.interior_projector()
    return opnorm(P @ (U @ H @ U.conj().T - H + b * np.eye(model.size)) @ P)


def spectral_projector(model: FiniteModel, a: float, c: float) -> np.ndarray:
    """E([a, c]); lattice points at an endpoint get 1/2."""
    tol = ENDPOINT_RTOL * max(1.0, abs(a), abs(c))
    p = model.points
    e = np.where((p > a + tol) & (p < c - tol), 1.0, 0.0)
    e = np.where((np.abs(p - a) <= tol) | (np.abs(p - c) <= tol), 0.5, e)
    return np.diag(np.repeat(e, model.dim)).astype(complex)


def interior_range(model: FiniteModel) -> tuple[float, float]:
    idx = list(model.interior)
    if not idx:
        raise WindowExceeded("interior window is empty")
    return float(model.points[idx[0]]), float(model.points[idx[-1]])


def spectral_shift_residual(model: FiniteModel, U: np.ndarray, b: float, delta) -> float:
    """||P(U E(Delta) U* - E(Delta + b))P|| on the interior window."""
    a, c = float(delta[0]), float(delta[1])
    lo, hi = interior_range(model)
    for x, y in ((a, c), (a + b, c + b)):
        if x < lo or y > hi:
            raise WindowExceeded(f"interval [{x}, {y}] leaves the interior range [{lo}, {hi}]")
    P = model.interior_projector()
    E0 = spectral_projector(model, a, c)
    E1 = spectral_projector(model, a + b, c + b)
    return opnorm(P @ (U @ E0 @ U.conj().T - E1) @ P)


def wt_from_model(model: FiniteModel, z) -> np.ndarray:
    """P+ (zH + I)(H - z)^-1 on constant sections, by dense solve (+ closed-form tail)."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    m = model.dim
    E = model.embed_constants()
    lam = np.repeat(model.points, m)
    gram = E.conj().T @ E
    out = np.empty((zs.size, m, m), dtype=complex)
    for k, zz in enumerate(zs):
        _check_z(model, zz)
        res = np.linalg.solve(np.diag(lam - zz), E)
        x = E.conj().T @ ((zz * lam + 1.0)[:, None] * res)
        g = gram
        if model.tail is not None:
            t = model.tail
            x = x + (zz * t.sigma_mass_factor() + (1 + zz * zz) * t.sigma_cauchy_factor(np.array([zz]))[0]) * t.weight
            g = g + t.sigma_mass_factor() * t.weight
        out[k] = np.linalg.solve(g, x)
    return out[0] if np.ndim(z) == 0 else out


def rotated_model(model: FiniteModel, W0) -> FiniteModel:
    """Model in which the constant basis is rotated by W0: weights W0 W_j W0*."""
    W0 = as_matrix(W0, model.dim, "W0")
    w = np.einsum("ab,jbc,dc->jad", W0, model.weights, W0.conj())
    tail = model.tail
    if tail is not None:
        tail = LatticeTail(tail.origin, tail.step, tail.k_min, tail.k_max, W0 @ tail.weight @ W0.conj().T)
    return FiniteModel(model.dim, model.points, w, model.layers, model.step, tail)


def basis_conjugation_check(model: FiniteModel, W0, zs) -> float:
    """max ||W0 M(z) - M'(z) W0|| with M' the WT function of the rotated model."""
    W0 = as_matrix(W0, model.dim, "W0")
    for w in model.weights:
        if opnorm(W0 @ w - w @ W0) > 1e-10 * max(1.0, opnorm(w)):
            raise CommutationPreconditionFailed("W0 does not commute with the weights")
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    M = wt_from_model(model, zs)
    M2 = wt_from_model(rotated_model(model, W0), zs)
    return opnorm(np.einsum("ab,zbc->zac", W0, M) - np.einsum("zab,bc->zac", M2, W0))


# --------------------------------------------------------------------------
# Weyl pair


def twisted_shift(lam: np.ndarray, f: np.ndarray, s: float, omega: complex, lookup) -> np.ndarray:
    """(V_omega(s) f)(lam) = mu(lam) f(lam - s) with mu the piecewise twist."""
    mu = np.ones(lam.shape, dtype=complex)
    if s > 0:
        mu[(lam >= 0) & (lam < s)] = omega
    elif s < 0:
        mu[(lam >= s) & (lam < 0)] = np.conj(omega)
    return mu * lookup(lam - s, f)


def _sample_lookup(grid: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(grid)))) if grid.size else 1.0

    def lookup(x, values):
        idx = np.searchsorted(grid, x)
        idx = np.clip(idx, 0, grid.size - 1)
        left = np.clip(idx - 1, 0, grid.size - 1)
        pick = np.where(np.abs(grid[left] - x) < np.abs(grid[idx] - x), left, idx)
        if np.any(np.abs(grid[pick] - x) > 1e-9 * scale):
            raise SampleClosureViolated("sample abscissae are not closed under the shift")
        return values[pick]

    return lookup


def weyl_relation_residual(s: float, t: float, omega: complex, lam, f, *,
                           phase_sign: int = -1, points=None) -> float:
    """max |(V(s) W(t) f)(lam) - e^(phase_sign i s t) (W(t) V(s) f)(lam)|.

    ``lam``/``f`` are samples on a set closed under lam -> lam - s for the
    evaluation points ``points`` (default: those lam with lam - s sampled).
    """
    lam = np.asarray(lam, dtype=float)
    f = np.asarray(f, dtype=complex)
    order = np.argsort(lam)
    lam, f = lam[order], f[order]
    if abs(abs(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be unimodular")
    lookup = _sample_lookup(lam)
    if points is None:
        scale = max(1.0, float(np.max(np.abs(lam))))
        j = np.searchsorted(lam, lam - s).clip(0, lam.size - 1)
        points = lam[np.abs(lam[j] - (lam - s)) <= 1e-9 * scale]
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise SampleClosureViolated("no sample point has its shift inside the sample set")
    wf = np.exp(1j * lam * t) * f
    vw = twisted_shift(points, wf, s, omega, lookup)
    vf = twisted_shift(points, f, s, omega, lookup)
    wv = np.exp(1j * points * t) * vf
    return float(np.max(np.abs(vw - np.exp(phase_sign * 1j * s * t) * wv)))
