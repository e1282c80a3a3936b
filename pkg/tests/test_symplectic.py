"""Unit tests for 4x4 symplectic spectra, classification, and D/nu functions."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagstab.model import rot4
from lagstab.symplectic import (
    check_symplectic,
    classify,
    d_omega,
    eigen4,
    krein_sign,
    mat_d,
    mat_r,
    nu_omega,
    sp_residual,
    standard_j,
    symplectic_sum,
)


def random_symplectic(rng, dim=4, scale=1.0):
    """exp(J S) with S symmetric is symplectic."""
    from scipy.linalg import expm

    s = rng.normal(size=(dim, dim), scale=scale)
    s = 0.5 * (s + s.T)
    return expm(standard_j(dim) @ s)


def test_standard_j():
    for dim in (2, 4, 6):
        j = standard_j(dim)
        assert np.allclose(j @ j, -np.eye(dim))
        assert np.allclose(j.T, -j)


def test_residual_and_gate():
    assert sp_residual(np.eye(4)) == 0.0
    check_symplectic(rot4(0.7))
    bad = np.eye(4)
    bad[0, 0] = 2.0
    with pytest.raises(ValueError):
        check_symplectic(bad)


def test_gate_scales_with_norm():
    # a strongly hyperbolic matrix known to relative accuracy ~1e-9 passes,
    # even though its absolute residual is far above the tolerance; the same
    # matrix at relative accuracy 1e-3 is rejected
    big = symplectic_sum(mat_d(1e3), mat_r(0.4))
    rng = np.random.default_rng(5)
    bump = rng.standard_normal((4, 4))
    bump *= np.linalg.norm(big) / np.linalg.norm(bump)
    noisy = big + 1e-9 * bump
    assert sp_residual(noisy) > 1e-6
    check_symplectic(noisy)
    with pytest.raises(ValueError):
        check_symplectic(big + 1e-3 * bump)


def test_symplectic_sum_structure():
    m = symplectic_sum(mat_d(2.0), mat_r(1.0))
    assert sp_residual(m) < 1e-12
    vals = sorted(np.linalg.eigvals(m), key=abs)
    assert abs(vals[0] - 0.5) < 1e-12 and abs(vals[3] - 2.0) < 1e-12


def test_eigen4_anchors():
    evals, _ = eigen4(np.eye(4))
    assert np.allclose(evals, 1.0)
    evals, _ = eigen4(symplectic_sum(mat_d(2.0), mat_d(3.0)))
    assert np.allclose(sorted(evals.real), [1.0 / 3.0, 0.5, 2.0, 3.0], atol=1e-12)
    assert np.allclose(evals.imag, 0.0, atol=1e-12)


def test_eigen4_reciprocal_pairing_enforced():
    rng = np.random.default_rng(7)
    for _ in range(25):
        m = random_symplectic(rng)
        evals, _ = eigen4(m)
        prod = np.prod(evals)
        assert abs(prod - 1.0) < 1e-8 * max(1.0, max(abs(evals)) ** 2)
        for lam in evals:
            assert min(abs(evals - 1.0 / lam)) < 1e-7 * max(1.0, abs(lam) ** 2)


def test_eigen4_cluster_averaging_switch():
    # double rotation pair: with clustering the two copies agree exactly
    m = symplectic_sum(mat_r(0.9), mat_r(0.9))
    evals, _ = eigen4(m)
    lam = cmath.exp(0.9j)
    assert sorted(evals, key=lambda z: z.imag)[2] == sorted(
        evals, key=lambda z: z.imag
    )[3]
    assert min(abs(evals - lam)) < 1e-12
    # cluster_tol=0 must leave the raw eigenvalues alone (possibly split)
    raw, _ = eigen4(m, cluster_tol=0.0)
    assert min(abs(raw - lam)) < 1e-7


def test_d_omega_values_and_validation():
    m = symplectic_sum(mat_r(1.0), mat_r(2.0))
    evals = np.linalg.eigvals(m)
    for theta in (0.5, 1.3, 2.6):
        omega = cmath.exp(1j * theta)
        # |D_omega| = |omega^-2 det(M - omega I)| = prod |omega - lambda_i|
        want = float(np.prod(np.abs(omega - evals)))
        got = d_omega(m, omega)
        assert abs(abs(got) - want) < 1e-10 * max(1.0, want)
    assert abs(d_omega(m, cmath.exp(1.0j))) < 1e-12
    with pytest.raises(ValueError):
        d_omega(m, 1.2 + 0.0j)


def test_nu_omega_counts():
    assert nu_omega(np.eye(4), 1.0) == 4
    m = symplectic_sum(mat_r(0.8), mat_d(2.0))
    assert nu_omega(m, cmath.exp(0.8j)) == 1
    assert nu_omega(m, cmath.exp(0.3j)) == 0
    with pytest.raises(ValueError):
        nu_omega(m, 2.0 + 0.0j)  # only unit-circle probes are meaningful


def test_krein_signs_opposite_for_conjugate_pair():
    m = symplectic_sum(mat_r(0.8), mat_d(2.0))
    evals, evecs = eigen4(m)
    signs = {}
    for lam, vec in zip(evals, evecs.T):
        if abs(abs(lam) - 1.0) < 1e-9 and abs(lam.imag) > 1e-9:
            signs[round(lam.imag, 6)] = krein_sign(m, lam, vec)
    vals = sorted(signs.items())
    assert len(vals) == 2
    assert vals[0][1] == -vals[1][1] != 0


def test_classify_normal_forms():
    ee = classify(symplectic_sum(mat_r(1.0), mat_r(2.5)))
    assert ee.stability_class == "EE" and ee.unit_circle_count == 4
    assert len(ee.krein) == 4
    eh = classify(symplectic_sum(mat_r(1.0), mat_d(3.0)))
    assert eh.stability_class == "EH" and eh.unit_circle_count == 2
    hh = classify(symplectic_sum(mat_d(2.0), mat_d(-3.0)))
    assert hh.stability_class == "HH" and hh.unit_circle_count == 0
    deg = classify(symplectic_sum(mat_r(math.pi), mat_r(1.0)))
    assert deg.stability_class == "DEGENERATE"
    assert deg.geo_mult_minus1 == 2


def test_classify_complex_saddle():
    # genuine complex quadruple rho e^{+-i phi}, rho != 1: the block matrix
    # diag(A, A^-T) is symplectic for any invertible A, and A = rho R(phi)
    # contributes the off-circle pair rho e^{+-i phi}
    rho, phi = 1.5, 0.7
    a = rho * mat_r(phi)
    m = np.zeros((4, 4))
    m[:2, :2] = a
    m[2:, 2:] = np.linalg.inv(a.T)
    assert sp_residual(m) < 1e-12
    rep = classify(m)
    assert rep.stability_class == "CS"
    assert rep.unit_circle_count == 0


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_classify_random_properties(seed):
    m = random_symplectic(np.random.default_rng(seed), scale=0.8)
    rep = classify(m)
    assert rep.unit_circle_count in (0, 2, 4)
    assert rep.stability_class in ("EE", "EH", "HH", "CS", "DEGENERATE")
    assert len(rep.eigenvalues) == 4
    for lam, sign in rep.krein:
        assert sign in (-1, 0, 1)
        assert abs(abs(lam) - 1.0) < 1e-5


@settings(deadline=None, max_examples=30)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=0.05, max_value=2.0 * math.pi - 0.05),
)
def test_d_omega_real_on_random_symplectic(seed, theta):
    m = random_symplectic(np.random.default_rng(seed), scale=0.8)
    val = d_omega(m, cmath.exp(1j * theta))
    assert isinstance(val, float)
