"""Numerical integration of the linearized fundamental solutions.

Three flows are integrated over one period [0, 2pi] of the true anomaly:

* ``integrate_gamma`` — the 4x4 fundamental solution gamma(t) of
  gamma' = J B(t) gamma (the monodromy path whose endpoint governs
  stability);
* ``integrate_xi`` — the rotated-frame path xi(t) = R4(t) gamma(t),
  integrated from its own first-order system (same endpoint, used by the
  operator route);
* ``equal_mass_factor`` — the 2x2 factor of the beta = 9 path, which
  splits as a symplectic sum of two copies of it.

Integration uses an adaptive embedded Runge-Kutta of order 8 with dense
output; no symplectic projection is ever applied (the symplecticity residual
is reported as a diagnostic so integrator failures stay visible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import J2, J4, Params, coeff_b, s_matrix
from .symplectic import standard_j

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-12
    min_samples: int = 512


@dataclass(frozen=True)
class PathSamples:
    """Dense samples of one fundamental-solution path on [0, 2pi].

    ``matrices[0]`` is the identity, ``endpoint`` the period map.
    ``sp_residual`` is the largest symplecticity defect ||M^T J M - J||
    over the samples (diagnostic only; nothing is projected).
    ``dense`` evaluates the interpolated path at arbitrary t in [0, 2pi].
    """

    params: Params | None
    times: np.ndarray
    matrices: np.ndarray
    endpoint: np.ndarray
    sp_residual: float
    dense: object = field(repr=False, default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.endpoint.shape[0]

    def matrix_at(self, t: float) -> np.ndarray:
        n = self.dim
        if self.dense is not None:
            return np.asarray(self.dense(t)).reshape(n, n)
        i = int(np.searchsorted(self.times, t))
        return self.matrices[min(i, len(self.times) - 1)]


def _integrate_linear(rhs_matrix, dim: int, opts: IntegratorOptions, params=None):
    """Integrate Y' = A(t) Y, Y(0) = I over [0, 2pi]; package as PathSamples."""

    def rhs(t, y):
        return (rhs_matrix(t) @ y.reshape(dim, dim)).reshape(-1)

    y0 = np.eye(dim).reshape(-1)
    sol = solve_ivp(
        rhs,
        (0.0, TWO_PI),
        y0,
        method="DOP853",
        rtol=opts.rel_tol,
        atol=opts.abs_tol,
        dense_output=True,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    times = np.linspace(0.0, TWO_PI, max(opts.min_samples, 2))
    mats = sol.sol(times).T.reshape(-1, dim, dim).copy()
    mats[0] = np.eye(dim)
    mats[-1] = sol.y[:, -1].reshape(dim, dim)
    j = standard_j(dim)
    defect = np.einsum("nji,jk,nkl->nil", mats, j, mats) - j
    residual = float(np.sqrt((defect**2).sum(axis=(1, 2)).max()))
    return PathSamples(
        params=params,
        times=times,
        matrices=mats,
        endpoint=mats[-1],
        sp_residual=residual,
        dense=sol.sol,
    )


def integrate_gamma(p: Params, opts: IntegratorOptions = IntegratorOptions()) -> PathSamples:
    """Fundamental solution gamma(t) of the 4x4 linearized system."""
    return _integrate_linear(lambda t: J4 @ coeff_b(p, t), 4, opts, params=p)


def integrate_xi(p: Params, opts: IntegratorOptions = IntegratorOptions()) -> PathSamples:
    """Rotated-frame path xi(t) = R4(t) gamma(t), from its own ODE.

    Its coefficient matrix is block-diagonal: the lower block is
    I - (3 I + sqrt(9-beta) S(t)) / (2 (1 + e cos t)); the endpoint agrees
    with integrate_gamma (R4(2pi) = I).
    """
    s = math.sqrt(9.0 - p.beta)

    def a_of_t(t):
        d = 2.0 * (1.0 + p.ecc * math.cos(t))
        lower = np.eye(2) - (3.0 * np.eye(2) + s * s_matrix(t)) / d
        b = np.zeros((4, 4))
        b[:2, :2] = np.eye(2)
        b[2:, 2:] = lower
        return J4 @ b

    return _integrate_linear(a_of_t, 4, opts, params=p)


def equal_mass_factor(e: float, opts: IntegratorOptions = IntegratorOptions()) -> PathSamples:
    """2x2 factor path of the equal-mass (beta = 9) rotated system.

    The beta = 9 path is the symplectic sum of two copies of this factor;
    its endpoint always has a positive real eigenvalue pair {lam, 1/lam},
    lam != 1, so the equal-mass orbit is hyperbolic for every eccentricity.
    """
    p = Params(9.0, e)  # validates e against e_max

    def a_of_t(t):
        d = 2.0 * (1.0 + p.ecc * math.cos(t))
        return J2 @ np.array([[1.0, 0.0], [0.0, 1.0 - 3.0 / d]])

    return _integrate_linear(a_of_t, 2, opts, params=p)


def power_k(m: np.ndarray, k: int) -> np.ndarray:
    """k-th power of a period map (k-fold iteration of the orbit)."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return np.linalg.matrix_power(m, k)


def write_path_csv(path: PathSamples, fname) -> None:
    """Dump the sampled path as CSV rows t, m11, m12, ... (row-major)."""
    n = path.dim
    header = "t," + ",".join(
        f"m{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)
    )
    data = np.column_stack([path.times, path.matrices.reshape(len(path.times), -1)])
    np.savetxt(fname, data, delimiter=",", header=header, comments="", fmt="%.17g")
