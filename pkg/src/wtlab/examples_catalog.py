"""Closed-form Weyl-Titchmarsh functions used as ground truth, plus the
commutator identity for the Schroedinger operator in a uniform field with a
periodic potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ConjugateSymmetryViolated,
    LowerHalfPlane,
    RealAxisEvaluation,
    SampleClosureViolated,
    SingularDenominator,
    SingularResolvent,
)
from .herglotz_eval import HerglotzFunction
from .linalg import as_matrix, unitarity_defect
from .spectral_measure import TAU, MatrixMeasure, density_measure, sigma_from_tau

COND_LIMIT = 1e12


def _pts(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def _out(z, vals):
    return vals[0] if np.ndim(z) == 0 else vals


def example_a(z):
    """i + e^(iz) - e^(-1) on the upper half-plane only."""
    zs = _pts(z)
    if np.any(zs.imag <= 0):
        raise LowerHalfPlane("the closed form is only given for Im z > 0")
    return _out(z, 1j + np.exp(1j * zs) - np.exp(-1.0))


def example_b(z, l: float = np.pi, V=1.0):
    """-iI + 2i/(e^(2l) - 1) (e^(l(1-iz)) - 1) (I - e^(-izl) V)^-1 (I - e^l V)."""
    if not l > 0:
        raise ValueError("l must be positive")
    V = as_matrix(V, None, "V")
    if unitarity_defect(V) > 1e-10:
        raise ValueError("V must be unitary")
    m = V.shape[0]
    eye = np.eye(m)
    zs = _pts(z)
    out = np.empty((zs.size, m, m), dtype=complex)
    right = eye - np.exp(l) * V
    c0 = 2j / np.expm1(2 * l)
    for k, zz in enumerate(zs):
        res = eye - np.exp(-1j * zz * l) * V
        if np.linalg.cond(res) > COND_LIMIT:
            raise SingularResolvent(f"I - e^(-izl)V is singular at z={zz}")
        out[k] = -1j * eye + c0 * (np.exp(l * (1 - 1j * zz)) - 1) * np.linalg.solve(res, right)
    return _out(z, out)


def diag_entries(z, xi: float = 1.0, l: float = 1.0 + np.sqrt(2.0), omega1=1.0, omega2=1.0,
                 as_printed: bool = False):
    """The two scalar functions M1 (period 2pi/xi) and M2 (period 2pi/(l - xi)).

    ``as_printed=True`` uses the literal typeset M2 numerator (omega2 e^l - e^xi),
    which violates M2(i) = i; the default uses (omega2 e^xi - e^l).
    """
    if not 0 < xi < l:
        raise ValueError("need 0 < xi < l")
    for w in (omega1, omega2):
        if abs(abs(w) - 1) > 1e-12:
            raise ValueError("omega1 and omega2 must be unimodular")
    zs = _pts(z)
    d1 = 1 - omega1 * np.exp(-1j * zs * xi)
    d2 = omega2 - np.exp(-1j * zs * (l - xi))
    if np.any(np.abs(d1) < 1e-14) or np.any(np.abs(d2) < 1e-14):
        raise SingularDenominator("diagonal example denominator vanishes")
    m1 = -1j + 2j * (np.exp(xi * (1 - 1j * zs)) - 1) * (1 - omega1 * np.exp(xi)) / (np.expm1(2 * xi) * d1)
    lead = (omega2 * np.exp(l) - np.exp(xi)) if as_printed else (omega2 * np.exp(xi) - np.exp(l))
    m2 = -1j + 2j * lead * (np.exp(l) * np.exp(-1j * (l - xi) * zs) - np.exp(xi)) / (
        (np.exp(2 * l) - np.exp(2 * xi)) * d2)
    return m1, m2


def example_diag(z, xi: float = 1.0, l: float = 1.0 + np.sqrt(2.0), omega1=1.0, omega2=1.0,
                 as_printed: bool = False):
    m1, m2 = diag_entries(z, xi, l, omega1, omega2, as_printed)
    out = np.zeros((m1.size, 2, 2), dtype=complex)
    out[:, 0, 0] = m1
    out[:, 1, 1] = m2
    return _out(z, out)


def constant_wt(z, m: int = 1):
    """i I on the upper and -i I on the lower half-plane."""
    zs = _pts(z)
    if np.any(zs.imag == 0):
        raise RealAxisEvaluation("constant WT function is not defined on the real axis")
    out = np.sign(zs.imag)[:, None, None] * 1j * np.eye(m)
    return _out(z, out)


# --------------------------------------------------------------------------
# registry


def _matrix_param(v, default=1.0):
    if v is None:
        v = default
    a = np.asarray(v)
    if a.ndim == 3:  # [re, im] pairs
        a = a[..., 0] + 1j * a[..., 1]
    elif a.ndim == 1 and a.size == 2:
        a = a[0] + 1j * a[1]
    return as_matrix(a, None, "V")


def _unimodular(v, default=1.0):
    if v is None:
        return default
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    defaults: dict
    build: Callable[[dict], HerglotzFunction]
    period: Callable[[dict], float | None] = lambda p: None
    backing_measure: Callable[[dict], MatrixMeasure] | None = None
    description: str = ""
    sweep_divisors: tuple = field(default=(2, 3))

    def params(self, given: dict | None) -> dict:
        p = dict(self.defaults)
        for k, v in (given or {}).items():
            if k not in self.defaults:
                raise KeyError(f"unknown parameter '{k}' for example '{self.id}'")
            p[k] = v
        return p

    def function(self, given: dict | None = None) -> HerglotzFunction:
        p = self.params(given)
        F = self.build(p)
        return F


def _build_a(p):
    return HerglotzFunction(1, lambda zs: example_a(zs).reshape(-1, 1, 1), "catalog:a", 2 * np.pi)


def _build_b(p):
    V = _matrix_param(p["V"])
    l = float(p["l"])
    return HerglotzFunction(V.shape[0], lambda zs: example_b(zs, l, V), "catalog:b", 2 * np.pi / l)


def _build_diag(p):
    kw = dict(xi=float(p["xi"]), l=float(p["l"]), omega1=_unimodular(p["omega1"]),
              omega2=_unimodular(p["omega2"]), as_printed=bool(p["as_printed"]))
    return HerglotzFunction(2, lambda zs: example_diag(zs, **kw), "catalog:diag", None)


def _build_const(p):
    m = int(p["m"])
    return HerglotzFunction(m, lambda zs: constant_wt(zs, m), "catalog:const", None)


def example_a_measure(p=None) -> MatrixMeasure:
    return density_measure("one_plus_sin_over_pi_1pl2")


def constant_measure(p=None) -> MatrixMeasure:
    m = int((p or {}).get("m", 1))
    return sigma_from_tau(density_measure("lebesgue_over_pi", kind=TAU, dim=m, validate=False))


CATALOG: dict[str, CatalogEntry] = {
    "a": CatalogEntry("a", {}, _build_a, lambda p: 2 * np.pi, example_a_measure,
                      "i + e^(iz) - e^(-1), period 2pi"),
    "b": CatalogEntry("b", {"l": np.pi, "V": 1.0}, _build_b, lambda p: 2 * np.pi / float(p["l"]),
                      None, "boundary-twisted derivative on an interval of length l"),
    "diag": CatalogEntry("diag", {"xi": 1.0, "l": 1.0 + np.sqrt(2.0), "omega1": 1.0, "omega2": 1.0,
                                  "as_printed": False}, _build_diag, lambda p: None, None,
                         "diag(M1, M2) with incommensurable periods"),
    "const": CatalogEntry("const", {"m": 1}, _build_const, lambda p: None, constant_measure,
                          "the constant function i I (Lebesgue tau-measure)"),
}


# --------------------------------------------------------------------------
# Schroedinger commutator


def _check_vhat(vhat: dict) -> dict[int, complex]:
    out = {}
    for k, v in vhat.items():
        if float(k) != int(float(k)):
            raise ValueError(f"potential shifts must be integers, got {k}")
        out[int(float(k))] = complex(v)
    for k, v in out.items():
        partner = out.get(-k, 0.0)
        if abs(partner - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
            raise ConjugateSymmetryViolated(f"Vhat({-k}) != conj(Vhat({k}))")
    return {k: v for k, v in out.items() if v != 0}


_STENCILS = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
}


def _uniform_step(t: np.ndarray) -> float:
    d = np.diff(t)
    h = float(d.mean())
    if not h > 0 or np.any(np.abs(d - h) > 1e-9 * h):
        raise SampleClosureViolated("samples must lie on a uniform increasing grid")
    return h


def schrodinger_terms(s: float, vhat: dict, t, f, gamma: float = 1.0, order: int = 4) -> dict:
    """Both sides of U_s H1 f - H1 U_s f = s U_s f + U_s sum_k Vhat(k)(1 - e^(isk)) f(. + k).

    H1 = i d/dt + t^2/gamma + sum_k Vhat(k) (shift by k), U_s = multiplication
    by e^(ist).  The derivative is a centered difference of the given order.
    Returns arrays on the interior indices where every stencil is available.
    """
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    if order not in _STENCILS:
        raise ValueError("order must be 2 or 4")
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=complex)
    h = _uniform_step(t)
    v = _check_vhat(vhat)
    offs = {}
    for k in v:
        q = k / h
        qi = int(round(q))
        if abs(q - qi) > 1e-6 * max(1.0, abs(q)):
            raise SampleClosureViolated(f"shift {k} is not a multiple of the step {h}")
        offs[k] = qi
    st, co = _STENCILS[order]
    p = int(st.max())
    qmin = min([0] + list(offs.values()))
    qmax = max([0] + list(offs.values()))
    j0, j1 = p + max(0, -qmin), t.size - p - max(0, qmax)
    if j1 <= j0:
        raise SampleClosureViolated("sample window too short for the stencil and shifts")
    J = np.arange(j0, j1)

    def H1(g):
        d = sum(c * g[J + o] for o, c in zip(st, co)) / h
        out = 1j * d + (t[J] ** 2 / gamma) * g[J]
        for k, vk in v.items():
            out = out + vk * g[J + offs[k]]
        return out

    u = np.exp(1j * s * t)
    lhs = u[J] * H1(f) - H1(u * f)
    rhs = s * u[J] * f[J]
    conv = np.zeros(J.size, dtype=complex)
    for k, vk in v.items():
        conv = conv + vk * (1 - np.exp(1j * s * k)) * f[J + offs[k]]
    rhs_pot = u[J] * conv
    return {"t": t[J], "lhs": lhs, "rhs": rhs + rhs_pot, "potential_term": rhs_pot, "step": h}


def schrodinger_commutator_residual(s: float, vhat: dict, t, f, gamma: float = 1.0,
                                    order: int = 4) -> float:
    """max |[U_s H1 - H1 U_s - s U_s] f - U_s sum_k Vhat(k)(1 - e^(isk)) f(. + k)|."""
    r = schrodinger_terms(s, vhat, t, f, gamma, order)
    return float(np.max(np.abs(r["lhs"] - r["rhs"])))
