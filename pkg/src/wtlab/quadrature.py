"""Quadrature engine for density integrals.

Everything here is vectorized over abscissae: an integrand ``f`` receives a
1-D array of (real or complex) nodes and returns an array of shape
``(n, *value_shape)``.  The adaptive rule is a locally adaptive 7/15-point
Gauss-Kronrod bisection that evaluates all active panels in one call, so the
result depends only on the integrand and the tolerances (no global state).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.laguerre import laggauss

from .errors import QuadratureBudgetExceeded

# Kronrod abscissae (positive half, descending) and weights; Gauss weights for
# the 7-point subset (every other node, ending at the centre).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes sit at the odd Kronrod positions.
WG7 = np.zeros(15)
WG7[[1, 3, 5, 7, 9, 11, 13]] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]

DEFAULT_LIMIT = 40000


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    error: float
    panels: int


def gauss_kronrod(f, a: float, b: float, *, epsabs: float = 1e-13, epsrel: float = 1e-12,
                  breakpoints=(), limit: int = DEFAULT_LIMIT) -> QuadResult:
    """Adaptive integral of a vectorized integrand over the finite interval [a, b].

    A panel is accepted when its Kronrod-Gauss difference is below its share
    (proportional to length) of ``max(epsabs, epsrel * |I|)``.
    """
    if not b > a:
        raise ValueError("gauss_kronrod needs a < b")
    edges = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    total_len = b - a
    acc_lo, acc_val, acc_err = [], [], []
    active_val = None
    used = 0
    while lo.size:
        used += lo.size
        if used > limit:
            raise QuadratureBudgetExceeded(f"more than {limit} panels on [{a}, {b}]")
        c = 0.5 * (lo + hi)
        hw = 0.5 * (hi - lo)
        x = (c[:, None] + hw[:, None] * NODES[None, :]).ravel()
        fx = np.asarray(f(x))
        vshape = fx.shape[1:]
        fx = fx.reshape((lo.size, 15) + vshape)
        wk = WK15.reshape((1, 15) + (1,) * len(vshape))
        wg = WG7.reshape((1, 15) + (1,) * len(vshape))
        hws = hw.reshape((-1,) + (1,) * len(vshape))
        kval = hws * np.sum(wk * fx, axis=1)
        gval = hws * np.sum(wg * fx, axis=1)
        err = np.abs(kval - gval).reshape(lo.size, -1).max(axis=1)
        # rounding floor of the panel sum; panels already at it cannot improve
        absum = (hws * np.sum(wk * np.abs(fx), axis=1)).reshape(lo.size, -1).max(axis=1)
        floor = 50.0 * np.finfo(float).eps * absum
        if not np.all(np.isfinite(err)):
            raise QuadratureBudgetExceeded("non-finite integrand values")
        running = sum(acc_val) if acc_val else 0.0
        estimate = running + np.sum(kval, axis=0)
        scale = float(np.max(np.abs(estimate))) if np.size(estimate) else 0.0
        tol = max(epsabs, epsrel * scale)
        width = hi - lo
        ok = (err <= np.maximum(tol * width / total_len, floor)) | (width <= 1e-13 * (1.0 + np.abs(c)))
        for k in np.flatnonzero(ok):
            acc_lo.append(lo[k])
            acc_val.append(kval[k])
            acc_err.append(err[k])
        bad = ~ok
        mid = c[bad]
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
        active_val = kval
    order = np.argsort(acc_lo, kind="stable")
    value = np.zeros_like(active_val[0]) if active_val is not None else 0.0
    for k in order:
        value = value + acc_val[k]
    return QuadResult(value=value, error=float(np.sum(acc_err)), panels=used)


def half_line(f, start: float, direction: int, *, epsabs: float = 1e-13, epsrel: float = 1e-12,
              limit: int = DEFAULT_LIMIT) -> QuadResult:
    """Integral over [start, inf) (direction=+1) or (-inf, start] (direction=-1).

    Uses lambda = start + direction*s*(1/t - 1) on t in (0, 1]; suitable for
    non-oscillatory integrands decaying at least like 1/lambda^(1+).
    """
    s = max(1.0, abs(start))

    def g(t):
        lam = start + direction * s * (1.0 / t - 1.0)
        jac = s / t**2
        v = np.asarray(f(lam))
        return v * jac.reshape((-1,) + (1,) * (v.ndim - 1))

    return gauss_kronrod(g, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=limit)


_LAGUERRE = {}


def _laguerre(n: int):
    if n not in _LAGUERRE:
        _LAGUERRE[n] = laggauss(n)
    return _LAGUERRE[n]


def oscillatory_tail(g, start: float, direction: int, freq: float, n: int = 80) -> QuadResult:
    """Integral of g(lambda) * exp(i*freq*lambda) over a half-line via contour rotation.

    ``g`` must be analytic and decaying in the quarter plane swept by the
    rotation (no poles with Re between ``start`` and infinity on the rotated
    side).  The path start + i*sign(freq)*s turns the oscillation into
    exp(-|freq| s), integrated by Gauss-Laguerre; the error estimate compares
    ``n`` against ``n // 2`` + ``n // 4`` nodes.
    """
    if freq == 0:
        raise ValueError("oscillatory_tail needs freq != 0")
    sg = 1.0 if freq > 0 else -1.0
    w = abs(freq)
    # orientation of the rotated ray relative to the real half-line
    orient = 1j * sg * direction

    def rule(k):
        x, wt = _laguerre(k)
        s = x / w
        lam = start + 1j * sg * s
        v = np.asarray(g(lam))
        scale = wt * np.exp(1j * freq * start) / w
        return orient * np.tensordot(scale, v, axes=(0, 0))

    val = rule(n)
    ref = rule(n // 2 + n // 4)
    return QuadResult(value=val, error=float(np.max(np.abs(val - ref))), panels=n)
