import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wtlab.acceptance import lebesgue_sigma, matrix_periodic_sigma, two_atoms
from wtlab.errors import CommutationPreconditionFailed, DimensionMismatch, InconsistentPeriod, PeriodicityPreconditionFailed
from wtlab.extension_calculus import (
    ExtensionContext,
    ab_shift_residual,
    extension_M,
    group_map,
    orbit_period,
    script_A,
    script_B,
    tau_periodicity_defect,
    transition_matrices,
)
from wtlab.herglotz_eval import EvalGrid, eval_M
from wtlab.linalg import imag_part, opnorm, random_unitary, unitarity_defect


def test_script_functions_single_atom(single):
    # A(z) = -i/(-z), B(z) = i/(-z)
    assert script_A(single, 2j)[0, 0] == pytest.approx(0.5)
    assert script_B(single, 2j)[0, 0] == pytest.approx(-0.5)


def test_script_A_at_i_is_mass(triple):
    assert np.allclose(script_A(triple, 1j), [[1.0]])
    assert np.allclose(script_B(triple, -1j), [[1.0]])


def test_ab_shift_on_lattice(lattice):
    zs = EvalGrid.standard(8).points
    assert ab_shift_residual(lattice, zs, 1.0) < 1e-8


def test_ab_shift_needs_periodicity(pair):
    with pytest.raises(PeriodicityPreconditionFailed):
        ab_shift_residual(pair, 1j, 1.0)
    assert ab_shift_residual(pair, np.array([1j, 0.5 + 2j]), 1.0, check=False) > 1e-3


def test_tau_defect_cached(pair):
    a = tau_periodicity_defect(pair, 1.0)
    assert ("tau_periodic", 1.0, None, None) in pair._cache
    assert tau_periodicity_defect(pair, 1.0) == a > 0


def test_extension_identity_is_exact(triple):
    zs = EvalGrid.standard(6).points
    assert np.array_equal(extension_M(triple, np.eye(1), zs), eval_M(triple, zs))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-5, 5), st.floats(0.05, 5))
def test_extension_is_herglotz_and_normalized(seed, x, y):
    ms = lebesgue_sigma(2)
    V = random_unitary(2, np.random.default_rng(seed))
    Mz = extension_M(ms, V, complex(x, y))
    assert np.min(np.linalg.eigvalsh(imag_part(Mz))) >= -1e-8
    assert np.allclose(extension_M(ms, V, 1j), 1j * np.eye(2), atol=1e-10)


def test_extension_full_output(pair):
    val, cond = extension_M(pair, np.array([[-1.0]]), 2j, full_output=True)
    assert cond >= 1.0
    assert np.isfinite(val).all()


@pytest.fixture
def leb_ctx(rng):
    return ExtensionContext(lebesgue_sigma(2), 1.0, random_unitary(2, rng))


def test_transition_zero(leb_ctx):
    A, B, C, D = transition_matrices(leb_ctx, 0)
    assert np.allclose(A, np.eye(2), atol=1e-12)
    assert np.allclose(D, np.eye(2), atol=1e-12)
    assert np.allclose(B, C.conj().T, atol=1e-12)


def test_group_identity_and_inverse(leb_ctx, rng):
    V = random_unitary(2, rng)
    T0 = group_map(leb_ctx, V, 0)
    assert np.array_equal(T0, V) and T0 is not V
    for n in range(1, 6):
        back = group_map(leb_ctx, group_map(leb_ctx, V, n), -n)
        assert opnorm(back - V) < 1e-8
        assert unitarity_defect(group_map(leb_ctx, V, n)) < 1e-8


def test_group_law_on_matrix_density(rng):
    ms = matrix_periodic_sigma()
    ctx = ExtensionContext(ms, 2 * np.pi, np.eye(2))
    V = random_unitary(2, rng)
    lhs = group_map(ctx, group_map(ctx, V, 1), 1)
    assert opnorm(lhs - group_map(ctx, V, 2)) < 1e-6


def test_orbit_periods(rng):
    leb = lebesgue_sigma(2)
    cyc = ExtensionContext(leb, 1.0, np.diag([1.0, 1j]))
    assert orbit_period(cyc, random_unitary(2, rng), 50, 1e-6) == 4
    irr = ExtensionContext(leb, 1.0, np.diag([1.0, np.exp(2j * np.pi * 0.6180339887498949)]))
    assert orbit_period(irr, random_unitary(2, rng), 300, 1e-6) is None


def test_orbit_fixed_point_is_inconsistent():
    cyc = ExtensionContext(lebesgue_sigma(2), 1.0, np.diag([1.0, 1j]))
    with pytest.raises(InconsistentPeriod):
        orbit_period(cyc, np.eye(2), 50, 1e-6)


def test_context_preconditions():
    leb = lebesgue_sigma(2)
    with pytest.raises(DimensionMismatch):
        ExtensionContext(leb, 1.0, 2 * np.eye(2))
    with pytest.raises(ValueError):
        ExtensionContext(leb, 1.0, np.eye(2), phi_coeffs=2 * np.eye(2))
    with pytest.raises(CommutationPreconditionFailed):
        ExtensionContext(matrix_periodic_sigma(), 2 * np.pi, np.diag([1.0, -1.0]))
    ctx = ExtensionContext(two_atoms(), 1.0, np.eye(1))
    with pytest.raises(PeriodicityPreconditionFailed):
        transition_matrices(ctx, 1)
