import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wtlab.errors import KindMismatch, RealAxisEvaluation
from wtlab.herglotz_eval import EvalGrid, HerglotzFunction, eval_M, eval_M_tau, function_period_residual, herglotz_report
from wtlab.acceptance import three_atoms
from wtlab.report import FAIL, PASS, SKIP
from wtlab.examples_catalog import CATALOG
from wtlab.spectral_measure import TAU, density_measure, tau_from_sigma


def test_single_atom_closed_form(single):
    for z in (2j, 0.5 + 1j, -3 - 0.2j):
        assert eval_M(single, z)[0, 0] == pytest.approx(-1.0 / z, abs=1e-15)


def test_two_atoms_at_2i(pair):
    assert eval_M(pair, 2j)[0, 0] == pytest.approx(0.8j, abs=1e-15)


def test_normalization_at_i(pair, triple, lattice):
    for ms in (pair, triple, lattice):
        assert np.allclose(eval_M(ms, 1j), 1j * np.eye(ms.dim), atol=1e-12)


def test_tau_route_matches_sigma_route(pair):
    zs = EvalGrid.standard(8).points
    assert np.allclose(eval_M(pair, zs), eval_M_tau(tau_from_sigma(pair), zs), atol=1e-12)


def test_lebesgue_tau_measure_is_constant():
    tau = density_measure("lebesgue_over_pi", kind=TAU, dim=2, validate=False)
    vals = eval_M_tau(tau, np.array([1j, 3 + 0.5j, -2 - 1j]))
    assert np.allclose(vals[0], 1j * np.eye(2), atol=1e-10)
    assert np.allclose(vals[1], 1j * np.eye(2), atol=1e-10)
    assert np.allclose(vals[2], -1j * np.eye(2), atol=1e-10)


def test_example_a_density_reproduces_closed_form():
    ms = density_measure("one_plus_sin_over_pi_1pl2")
    zs = EvalGrid.standard(10).points
    ref = CATALOG["a"].function().values(zs)
    assert np.max(np.abs(eval_M(ms, zs) - ref)) < 1e-8


def test_real_axis_refused(pair):
    with pytest.raises(RealAxisEvaluation):
        eval_M(pair, 0.5)
    with pytest.raises(RealAxisEvaluation):
        eval_M(pair, 0.5 + 1e-5j)


def test_kind_required(pair):
    with pytest.raises(KindMismatch):
        eval_M(tau_from_sigma(pair), 1j)


def test_standard_grid_ranges():
    g = EvalGrid.standard(200)
    assert np.all((g.points.real >= -5) & (g.points.real < 5))
    assert np.all((g.points.imag >= 0.1) & (g.points.imag < 4))
    assert np.array_equal(g.points, EvalGrid.standard(200).points)


def test_grid_guard_band():
    with pytest.raises(ValueError):
        EvalGrid(np.array([1 + 1e-5j]))


def test_report_constant_function_passes():
    F = CATALOG["const"].function({"m": 2})
    rep = herglotz_report(F, EvalGrid.standard(10))
    assert rep.passed
    assert rep.check("normalization").value == 0.0


def test_report_negative_imaginary_fails():
    F = HerglotzFunction(1, lambda zs: np.full((zs.size, 1, 1), -1j), "neg")
    rep = herglotz_report(F, EvalGrid.standard(5))
    assert rep.check("herglotz_min_eig").status == FAIL
    assert rep.check("herglotz_min_eig").value == pytest.approx(-1.0)
    assert not rep.passed


def test_report_upper_only_skips_symmetry():
    rep = herglotz_report(CATALOG["a"].function(), EvalGrid.standard(5))
    assert rep.check("symmetry").status == SKIP
    assert rep.check("herglotz_min_eig").status == PASS


def test_period_residuals():
    F = CATALOG["a"].function()
    g = EvalGrid.standard(10)
    assert function_period_residual(F, 2 * np.pi, g) < 1e-14
    assert function_period_residual(F, np.pi, g) > 0.1


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20), st.floats(0.01, 20))
def test_imaginary_part_nonnegative(x, y):
    ms = density_measure("one_plus_sin_over_pi_1pl2")
    v = eval_M(ms, complex(x, y))
    assert v[0, 0].imag >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20), st.floats(0.01, 20))
def test_reflection_symmetry(x, y):
    triple = three_atoms()
    z = complex(x, y)
    assert eval_M(triple, np.conj(z))[0, 0] == pytest.approx(np.conj(eval_M(triple, z)[0, 0]), abs=1e-12)


@pytest.mark.parametrize("eid,params", [("a", {}), ("b", {}), ("b", {"l": 1.7}), ("diag", {}), ("const", {"m": 2})])
def test_catalog_functions_are_herglotz(eid, params):
    rep = herglotz_report(CATALOG[eid].function(params), EvalGrid.standard(20))
    assert rep.passed, [c.line() for c in rep.checks]


def test_two_atom_period_residual_oracle(pair):
    # M(z) = z(... ) closed form: 0.5[(z + 1)/(1 - z) + (1 - z)/(-1 - z)]
    M = lambda z: 0.5 * ((z + 1) / (1 - z) + (1 - z) / (-1 - z))
    F = HerglotzFunction.from_measure(pair)
    got = function_period_residual(F, 1.0, EvalGrid(np.array([1j])))
    assert got == pytest.approx(abs(M(1 + 1j) - M(1j)), rel=1e-12)
    assert got > 0


def test_periodic_measure_gives_periodic_function():
    from wtlab.spectral_measure import measure_periodicity_residual
    ms = density_measure("one_plus_sin_over_pi_1pl2")
    assert measure_periodicity_residual(tau_from_sigma(ms), 2 * np.pi, (-20, 20), 20) <= 1e-10
    F = HerglotzFunction.from_measure(ms)
    assert function_period_residual(F, 2 * np.pi, EvalGrid.standard(10)) <= 1e-8


def test_sigma_tau_routes_agree_on_density():
    ms = density_measure("one_plus_sin_over_pi_1pl2")
    zs = EvalGrid.standard(10).points
    zs = zs[zs.imag >= 0.1]
    assert np.max(np.abs(eval_M(ms, zs) - eval_M_tau(tau_from_sigma(ms), zs))) <= 2e-8
