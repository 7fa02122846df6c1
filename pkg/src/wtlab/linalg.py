"""Small dense linear-algebra helpers for m x m complex matrices."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitianPSD

MAX_DIM = 8


def opnorm(a) -> float:
    """Operator 2-norm; for a stack (..., m, m) the maximum over the stack."""
    a = np.asarray(a)
    if a.ndim == 0:
        return float(abs(a))
    if a.ndim == 1:
        return float(np.max(np.abs(a))) if a.size else 0.0
    if a.size == 0:
        return 0.0
    s = np.linalg.svd(a, compute_uv=False)
    return float(np.max(s))


def as_matrix(x, dim: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce scalars/arrays to a complex square matrix, checking size."""
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1) if dim in (None, 1) else a * np.eye(dim)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"{name} has size {a.shape[0]}, expected {dim}")
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def imag_part(a: np.ndarray) -> np.ndarray:
    """Matrix imaginary part (A - A*)/(2i)."""
    return (a - np.conj(np.swapaxes(a, -1, -2))) / 2j


def check_hermitian_psd(w: np.ndarray, what: str = "weight", rtol: float = 1e-12) -> None:
    """Raise NotHermitianPSD unless every matrix in the stack is Hermitian PSD."""
    w = np.asarray(w, dtype=complex)
    if w.ndim == 2:
        w = w[None]
    for k, a in enumerate(w):
        nrm = opnorm(a)
        if nrm == 0.0:
            continue
        asym = opnorm(a - a.conj().T)
        if asym > 1e-10 * nrm:
            raise NotHermitianPSD(f"{what} #{k} is not Hermitian (defect {asym:.3g})")
        lo = float(np.min(np.linalg.eigvalsh(hermitian_part(a))))
        if lo < -rtol * nrm:
            raise NotHermitianPSD(f"{what} #{k} has negative eigenvalue {lo:.3g}")


def herm_sqrt(a: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def herm_inv_sqrt(a: np.ndarray, rcond: float = 1e-14) -> np.ndarray:
    """Inverse square root; raises LinAlgError on (numerically) singular input."""
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    if vals.min() <= rcond * max(vals.max(), 1.0):
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return (vecs / np.sqrt(vals)) @ vecs.conj().T


def unitarity_defect(v: np.ndarray) -> float:
    v = np.asarray(v, dtype=complex)
    return opnorm(v.conj().T @ v - np.eye(v.shape[0]))


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition."""
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase fix."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_psd(m: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return g @ g.conj().T / m
