"""Numerics for matrix Weyl-Titchmarsh functions of periodic extensions."""

__version__ = "0.1.0"

from .errors import WTError
from .spectral_measure import (
    SIGMA,
    TAU,
    MatrixMeasure,
    density_measure,
    interval_mass,
    lattice_measure,
    measure_periodicity_residual,
    shift,
    sigma_from_tau,
    tau_from_sigma,
    total_mass,
)
from .herglotz_eval import EvalGrid, HerglotzFunction, eval_M, eval_M_tau, herglotz_report
from .stieltjes_inversion import ContourSchedule, cauchy_transform, invert_interval, measure_phi
from .extension_calculus import (
    ExtensionContext,
    extension_M,
    group_map,
    orbit_period,
    script_A,
    script_B,
    transition_matrices,
)
from .functional_model import build_model, s_type_matrix, wt_from_model
from .examples_catalog import CATALOG

__all__ = [
    "WTError", "SIGMA", "TAU", "MatrixMeasure", "density_measure", "interval_mass",
    "lattice_measure", "measure_periodicity_residual", "shift", "sigma_from_tau",
    "tau_from_sigma", "total_mass", "EvalGrid", "HerglotzFunction", "eval_M", "eval_M_tau",
    "herglotz_report", "ContourSchedule", "cauchy_transform", "invert_interval", "measure_phi",
    "ExtensionContext", "extension_M", "group_map", "orbit_period", "script_A", "script_B",
    "transition_matrices", "build_model", "s_type_matrix", "wt_from_model", "CATALOG",
]
