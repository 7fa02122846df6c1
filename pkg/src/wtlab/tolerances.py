"""Default verdict tolerances.

CLI verdicts read these through :func:`resolve`, which applies the
``WT_TOL_SCALE`` environment multiplier and per-run overrides.  The
acceptance suite uses its own pinned values and ignores both.
"""

from __future__ import annotations

import os

DEFAULTS: dict[str, float] = {
    "herglotz_min_eig": 1e-10,
    "normalization_measure": 1e-6,
    "normalization_closed": 1e-10,
    "symmetry": 1e-10,
    "period": 1e-6,
    "commutation": 1e-10,
    "spectral_shift": 1e-10,
    "isometry": 1e-12,
    "wt_consistency": 1e-10,
    "weyl": 1e-13,
    "orbit": 1e-6,
    "schrodinger": 1e-5,
}


def scale_factor() -> float:
    raw = os.environ.get("WT_TOL_SCALE", "").strip()
    if not raw:
        return 1.0
    v = float(raw)
    if not v > 0:
        raise ValueError("WT_TOL_SCALE must be positive")
    return v


def resolve(overrides: dict[str, float] | None = None, *, use_env: bool = True) -> dict[str, float]:
    s = scale_factor() if use_env else 1.0
    tol = {k: v * s for k, v in DEFAULTS.items()}
    for k, v in (overrides or {}).items():
        if k not in DEFAULTS:
            raise KeyError(f"unknown tolerance '{k}' (known: {sorted(DEFAULTS)})")
        if not v > 0:
            raise ValueError(f"tolerance '{k}' must be positive")
        tol[k] = float(v)
    return tol
