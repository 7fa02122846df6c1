import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wtlab.errors import DimensionMismatch, KindMismatch, NormalizationError, NotHermitianPSD
from wtlab.spectral_measure import (
    SIGMA,
    TAU,
    MatrixMeasure,
    density_measure,
    interval_mass,
    lattice_measure,
    measure_periodicity_residual,
    second_moment_divergent,
    shift,
    sigma_from_tau,
    tau_from_sigma,
    total_mass,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_total_mass_atoms(pair):
    assert np.allclose(total_mass(pair), [[1.0]])


def test_total_mass_example_a_density():
    ms = density_measure("one_plus_sin_over_pi_1pl2")
    assert abs(total_mass(ms)[0, 0] - 1.0) < 1e-10


def test_total_mass_lattice_with_tail(lattice):
    assert abs(total_mass(lattice)[0, 0] - 1.0) < 1e-13


def test_tau_from_sigma_weights():
    ms = MatrixMeasure.atomic([1.0, 2.0], [0.5, 0.5])
    tau = tau_from_sigma(ms)
    assert tau.kind == TAU
    assert np.allclose(tau.weights[:, 0, 0], [1.0, 2.5])


def test_tau_density_of_example_a():
    tau = tau_from_sigma(density_measure("one_plus_sin_over_pi_1pl2"))
    lam = np.array([-2.0, 0.5, 3.0])
    assert np.allclose(tau.density_values(lam)[:, 0, 0], (1 + np.sin(lam)) / np.pi, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(finite, min_size=1, max_size=6, unique=True), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_roundtrip_is_exact(locs, m, seed):
    rng = np.random.default_rng(seed)
    w = []
    for _ in locs:
        a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        w.append(a @ a.conj().T)
    ms = MatrixMeasure(dim=m, kind=SIGMA, locations=np.array(locs), base_weights=np.array(w))
    back = sigma_from_tau(tau_from_sigma(ms))
    assert np.array_equal(back.weights, ms.weights)
    assert np.array_equal(back.locations, ms.locations)
    assert back.power == ms.power


def test_kind_checks(pair):
    with pytest.raises(KindMismatch):
        sigma_from_tau(pair)
    with pytest.raises(KindMismatch):
        tau_from_sigma(tau_from_sigma(pair))


def test_shift_atoms(pair):
    sh = shift(tau_from_sigma(pair), 0.5)
    assert np.allclose(sh.locations, [-0.5, 1.5])
    assert np.allclose(sh.weights[:, 0, 0], [1.0, 1.0])


def test_shift_sigma_lattice_refused(lattice):
    with pytest.raises(KindMismatch):
        shift(lattice, 1.0)


def test_interval_mass_endpoint_half(pair):
    m, _ = interval_mass(pair, 1.0, 3.0)
    assert m[0, 0] == pytest.approx(0.25)
    m, _ = interval_mass(pair, -3.0, 3.0)
    assert m[0, 0] == pytest.approx(1.0)


def test_interval_mass_density():
    ms = density_measure("constant_on_interval", params={"a": 0.0, "b": 1.0, "value": 1.0},
                         kind=TAU, validate=False)
    m, _ = interval_mass(ms, 0.25, 0.75)
    assert m[0, 0] == pytest.approx(0.5, abs=1e-13)


def test_validation_errors():
    with pytest.raises(NormalizationError):
        MatrixMeasure.atomic([0.0], [0.5])
    with pytest.raises(NotHermitianPSD):
        MatrixMeasure.atomic([0.0, 1.0], [1.5, -0.5])
    with pytest.raises(NotHermitianPSD):
        MatrixMeasure.atomic([0.0], [[[1.0, 1.0], [0.0, 0.0]]], dim=2, validate=True)
    with pytest.raises(DimensionMismatch):
        MatrixMeasure(dim=9)


def _cell_oracle(b, window, cells):
    # tau density (1 + sin)/pi: each cell defect is |int over shifted cell of sin - int over cell|/pi
    edges = np.linspace(window[0], window[1], cells + 1)
    lo, hi = edges[:-1], edges[1:]
    s0 = np.cos(lo) - np.cos(hi)
    s1 = np.cos(lo + b) - np.cos(hi + b)
    return float(np.max(np.abs(s1 - s0)) / np.pi)


@pytest.mark.parametrize("b", [1.0, 2.5, np.pi])
def test_periodicity_residual_matches_closed_form(b):
    tau = tau_from_sigma(density_measure("one_plus_sin_over_pi_1pl2"))
    got = measure_periodicity_residual(tau, b, (-8.0, 8.0), 16)
    assert got == pytest.approx(_cell_oracle(b, (-8.0, 8.0), 16), abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(-30, 30))
def test_periodic_residual_window_invariant(offset):
    tau = tau_from_sigma(density_measure("one_plus_sin_over_pi_1pl2"))
    r = measure_periodicity_residual(tau, 2 * np.pi, (offset - 10.0, offset + 10.0), 10)
    assert r < 1e-12


def test_lattice_periodic_in_tau_view(lattice):
    tau = tau_from_sigma(lattice)
    assert measure_periodicity_residual(tau, 1.0, (-60.0, 60.0), 120) < 1e-13
    assert measure_periodicity_residual(tau, -1.0, (-60.0, 60.0), 120) < 1e-13
    # cells of length 0.5 holding one atom each, their 0.5-shifts hold none
    r = measure_periodicity_residual(tau, 0.5, (-5.1, 4.9), 20)
    assert r == pytest.approx(tau.lattice.weight[0, 0].real, rel=1e-12)


def test_lattice_tail_contributes_beyond_explicit_atoms(lattice):
    tau = tau_from_sigma(lattice)
    far, _ = interval_mass(tau, 99.5, 100.5)
    near, _ = interval_mass(tau, -0.5, 0.5)
    assert far[0, 0] == pytest.approx(near[0, 0], rel=1e-13)


def test_second_moment_flag(pair, lattice):
    assert not second_moment_divergent(pair)
    assert second_moment_divergent(lattice)
    assert second_moment_divergent(density_measure("one_plus_sin_over_pi_1pl2"))


def test_lattice_without_tail_renormalizes():
    ms = lattice_measure(1.0, 5, tail=False)
    assert ms.lattice is None
    assert abs(total_mass(ms)[0, 0] - 1.0) < 1e-14
