"""Unit tests for the coefficient/closed-form layer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagstab.model import (
    J2,
    J4,
    Params,
    closed_form_multipliers_e0,
    coeff_b,
    coeff_k,
    gamma_00_explicit,
    rot,
    rot4,
    s_matrix,
    theta_pair_e0,
)


def test_params_validation():
    Params(0.0, 0.0)
    Params(9.0, -0.95)
    with pytest.raises(ValueError):
        Params(-0.1, 0.0)
    with pytest.raises(ValueError):
        Params(9.1, 0.0)
    with pytest.raises(ValueError):
        Params(1.0, 0.995)
    with pytest.raises(ValueError):
        Params(1.0, 0.5, e_max=1.0)


def test_structure_matrices():
    assert np.allclose(J2 @ J2, -np.eye(2))
    assert np.allclose(J4 @ J4, -np.eye(4))
    for t in (0.0, 0.7, 2.0, 5.5):
        s = s_matrix(t)
        assert np.allclose(s, s.T)
        assert abs(np.trace(s)) < 1e-14
        assert np.allclose(s @ s, np.eye(2))
        r = rot(t)
        assert np.allclose(r.T @ r, np.eye(2))
        assert abs(np.linalg.det(r) - 1.0) < 1e-14
        r4 = rot4(t)
        assert np.allclose(r4.T @ J4 @ r4, J4)


def test_coeff_b_symmetric_and_periodic():
    p = Params(2.5, 0.3)
    for t in (0.0, 1.0, 2.2):
        b = coeff_b(p, t)
        assert np.allclose(b, b.T)
        assert np.allclose(b, coeff_b(p, t + 2.0 * math.pi))
    k = coeff_k(p, 0.4)
    assert k.shape == (2, 2) and k[0, 1] == 0.0 and k[1, 0] == 0.0
    assert k[0, 0] > k[1, 1] > 0.0


def test_theta_pair_values():
    # beta = 3/4 gives theta1 = 1/2 (the -1 collision of the first pair)
    t1, t2 = theta_pair_e0(0.75)
    assert abs(t1 - 0.5) < 1e-14
    # beta = 1: both rotation numbers collide at 1/sqrt(2)
    t1, t2 = theta_pair_e0(1.0)
    assert abs(t1 - t2) < 1e-12
    assert abs(t1 - 1.0 / math.sqrt(2.0)) < 1e-12
    t1, t2 = theta_pair_e0(0.0)
    assert t1 == 0.0 and abs(t2 - 1.0) < 1e-14
    with pytest.raises(ValueError):
        theta_pair_e0(2.0)


def test_closed_form_multipliers_on_and_off_circle():
    on = closed_form_multipliers_e0(0.5)
    assert np.allclose(np.abs(on), 1.0)
    off = closed_form_multipliers_e0(4.0)
    radius = math.exp(math.pi * math.sqrt(math.sqrt(4.0) - 1.0))
    assert sorted(np.round(np.abs(off), 10)) == pytest.approx(
        [1.0 / radius, 1.0 / radius, radius, radius]
    )


@settings(deadline=None, max_examples=40)
@given(st.floats(min_value=0.0, max_value=9.0))
def test_multipliers_reciprocal_pairs(beta):
    vals = closed_form_multipliers_e0(beta)
    # spectrum of a real symplectic matrix: closed under conjugation and inversion
    for lam in vals:
        assert min(abs(vals - np.conj(lam))) < 1e-9
        assert min(abs(vals - 1.0 / lam)) < 1e-9 * max(1.0, abs(lam) ** 2)
    assert abs(np.prod(vals) - 1.0) < 1e-9


def test_gamma_00_explicit_basics():
    assert np.allclose(gamma_00_explicit(0.0), np.eye(4))
    for t in (0.3, 1.5, 4.0):
        g = gamma_00_explicit(t)
        assert np.allclose(g.T @ J4 @ g, J4, atol=1e-12)
    # eigenvalue 1 has geometric multiplicity 3 at the period
    g = gamma_00_explicit(2.0 * math.pi)
    assert np.linalg.matrix_rank(g - np.eye(4), tol=1e-9) == 1
