"""Unit tests for the fundamental-solution integrator."""

import math

import numpy as np
import pytest

from lagstab.model import Params, closed_form_multipliers_e0, gamma_00_explicit
from lagstab.monodromy import (
    TWO_PI,
    IntegratorOptions,
    equal_mass_factor,
    integrate_gamma,
    integrate_xi,
    power_k,
    write_path_csv,
)
from lagstab.symplectic import eigen4, symplectic_sum


def matched_error(got, want):
    pool = list(got)
    worst = 0.0
    for w in want:
        j = min(range(len(pool)), key=lambda i: abs(pool[i] - w))
        worst = max(worst, abs(pool.pop(j) - w))
    return worst


def test_identity_start_and_dense_endpoint():
    path = integrate_gamma(Params(1.5, 0.2))
    assert np.allclose(path.matrices[0], np.eye(4))
    assert np.allclose(path.matrix_at(0.0), np.eye(4), atol=1e-12)
    assert np.allclose(path.matrix_at(TWO_PI), path.endpoint, atol=1e-9)
    assert path.sp_residual < 1e-7
    assert len(path.times) >= 512


def test_against_explicit_solution():
    path = integrate_gamma(Params(0.0, 0.0))
    worst = max(
        float(np.max(np.abs(path.matrix_at(t) - gamma_00_explicit(t))))
        for t in np.linspace(0.0, TWO_PI, 33)
    )
    assert worst < 1e-8


@pytest.mark.parametrize("beta", [0.5, 4.0])
def test_closed_form_multipliers(beta):
    endpoint = integrate_gamma(Params(beta, 0.0)).endpoint
    evals, _ = eigen4(endpoint)
    assert matched_error(evals, closed_form_multipliers_e0(beta)) < 1e-8


def test_xi_and_gamma_share_endpoint():
    p = Params(3.0, 0.4)
    g = integrate_gamma(p).endpoint
    x = integrate_xi(p).endpoint
    assert np.max(np.abs(g - x)) < 1e-8


@pytest.mark.parametrize("e", [0.0, 0.6])
def test_equal_mass_factorization(e):
    factor = equal_mass_factor(e).endpoint
    doubled = symplectic_sum(factor, factor)
    full = integrate_gamma(Params(9.0, e)).endpoint
    assert np.max(np.abs(doubled - full)) < 1e-7 * max(1.0, np.max(np.abs(full)))
    # the factor itself is hyperbolic with a positive pair
    lam = np.linalg.eigvals(factor)
    assert np.all(np.abs(lam.imag) < 1e-8)
    assert max(lam.real) > 1.0 + 1e-3


def test_power_k():
    m = integrate_gamma(Params(2.0, 0.1)).endpoint
    assert np.allclose(power_k(m, 1), m)
    assert np.allclose(power_k(m, 3), m @ m @ m)
    with pytest.raises(ValueError):
        power_k(m, 0)


def test_tolerance_actually_matters():
    sloppy = IntegratorOptions(rel_tol=1e-5, abs_tol=1e-6)
    tight = IntegratorOptions()
    p = Params(4.0, 0.3)
    d = np.max(np.abs(integrate_gamma(p, sloppy).endpoint
                      - integrate_gamma(p, tight).endpoint))
    assert 1e-12 < d < 1e-2


def test_write_path_csv(tmp_path):
    path = integrate_gamma(Params(1.0, 0.0))
    dest = tmp_path / "path.csv"
    write_path_csv(path, dest)
    rows = dest.read_text().strip().split("\n")
    assert rows[0].startswith("t,m11,m12")
    assert len(rows) == len(path.times) + 1
    first = [float(x) for x in rows[1].split(",")]
    assert first[0] == 0.0
    assert first[1] == 1.0  # identity start


def test_dense_interpolation_consistency():
    # interpolated mid-path values satisfy the cocycle property against a
    # restart of the integration from scratch
    p = Params(2.5, 0.35)
    path = integrate_gamma(p)
    t = 2.0
    m_direct = path.matrix_at(t)
    assert np.max(np.abs(m_direct @ np.linalg.inv(m_direct) - np.eye(4))) < 1e-10
    # symplecticity along the path, not only at the endpoint
    from lagstab.symplectic import sp_residual

    for tt in (0.5, math.pi, 5.0):
        assert sp_residual(path.matrix_at(tt)) < 1e-8
