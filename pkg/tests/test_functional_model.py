import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wtlab.acceptance import gaussian_samples, random_matrix_atoms
from wtlab.errors import LatticeIncompatible, PoleHit, SampleClosureViolated, WindowExceeded
from wtlab.functional_model import (
    basis_conjugation_check,
    build_model,
    commutation_residual,
    defect_orthogonality_residual,
    defect_vector,
    isometry_defect,
    s_type_matrix,
    spectral_projector,
    spectral_shift_residual,
    weyl_relation_residual,
    wt_from_model,
)
from wtlab.herglotz_eval import EvalGrid, eval_M
from wtlab.linalg import random_unitary
from wtlab.spectral_measure import MatrixMeasure, lattice_measure


def test_domain_functional_three_atoms(triple):
    model = build_model(triple)
    assert np.allclose(model.domain_functional(), [[(-1 + 1j) * 0.25, 0.5j, (1 + 1j) * 0.25]])


def test_degenerate_model_warns(single):
    with pytest.warns(RuntimeWarning):
        build_model(single, 1)


def test_renormalization():
    ms = MatrixMeasure.atomic([0.0, 1.0], [1.0, 1.0], validate=False)
    model = build_model(ms)
    assert np.allclose(model.weights.sum(axis=0), [[1.0]])


def test_defect_vector(triple):
    v = defect_vector(build_model(triple), 2j, [1.0])
    lam = np.array([-1.0, 0.0, 1.0])
    assert np.allclose(v[:, 0], (lam - 1j) / (lam - 2j))
    with pytest.raises(PoleHit):
        defect_vector(build_model(triple), 0.0, [1.0])


def test_defect_orthogonality():
    model = build_model(random_matrix_atoms(8, 2))
    assert defect_orthogonality_residual(model, 0.5 + 1j, [1.0, 0.0]) < 1e-12


def test_zero_shift_is_identity(lattice):
    model = build_model(lattice, 2)
    assert np.allclose(s_type_matrix(model, np.eye(1), 0.0), np.eye(model.size))


def test_commutation_with_identity_operator(lattice):
    # U = I leaves ||P(H - H + bI)P|| = |b|
    model = build_model(lattice, 3)
    assert commutation_residual(model, np.eye(model.size), 2.0) == pytest.approx(2.0)


def test_lattice_shift_operator(lattice):
    model = build_model(lattice, 4)
    U = s_type_matrix(model, np.eye(1), 1.0)
    assert isometry_defect(model, U) < 1e-12
    assert commutation_residual(model, U, 1.0) < 1e-10
    assert spectral_shift_residual(model, U, 1.0, (0.4, 2.6)) < 1e-10


def test_non_periodic_weights_break_isometry(rng):
    w = rng.uniform(0.5, 2.0, 21)
    ms = MatrixMeasure.atomic(np.arange(-10.0, 11.0), w / w.sum())
    model = build_model(ms, 2)
    assert isometry_defect(model, s_type_matrix(model, np.eye(1), 1.0)) > 1e-3


def test_window_and_lattice_errors(lattice):
    model = build_model(lattice, 1)
    with pytest.raises(WindowExceeded):
        s_type_matrix(model, np.eye(1), 2.0)
    with pytest.raises(LatticeIncompatible):
        s_type_matrix(model, np.eye(1), 0.5)
    U = s_type_matrix(build_model(lattice, 4), np.eye(1), 1.0)
    with pytest.raises(WindowExceeded):
        spectral_shift_residual(build_model(lattice, 4), U, 1.0, (14.0, 16.5))


def test_spectral_projector_endpoint_half(triple):
    E = spectral_projector(build_model(triple), 0.0, 1.0)
    assert np.allclose(np.diag(E).real, [0.0, 0.5, 0.5])


def test_model_reproduces_eval(pair, triple, lattice):
    zs = EvalGrid.standard(10).points
    for ms in (pair, triple, random_matrix_atoms(), lattice):
        assert np.max(np.abs(wt_from_model(build_model(ms), zs) - eval_M(ms, zs))) < 1e-10


def test_basis_conjugation(rng):
    model = build_model(lattice_measure(1.0, 10, dim=2))
    W0 = random_unitary(2, rng)
    assert basis_conjugation_check(model, W0, EvalGrid.standard(6).points) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([-2.0, -0.5, 0.5, 1.5, 3.0]), st.floats(-4, 4),
       st.floats(0, 2 * np.pi))
def test_weyl_relation(s, t, theta):
    lam, f = gaussian_samples()
    assert weyl_relation_residual(s, t, np.exp(1j * theta), lam, f) < 1e-13


def test_weyl_wrong_phase_is_visible():
    lam, f = gaussian_samples()
    assert weyl_relation_residual(1.5, 0.7, 1j, lam, f, phase_sign=+1) > 1e-3


def test_weyl_needs_closed_samples():
    lam = np.linspace(-1, 1, 11)
    with pytest.raises(SampleClosureViolated):
        weyl_relation_residual(0.05, 1.0, 1.0, lam, np.ones(11), points=np.array([0.0]))
