"""Coefficient functions and closed-form solutions of the linearized problem.

This module is the single source of truth for the parameter conventions:
``beta`` is the mass parameter in [0, 9] (9 = equal masses, 0 = two vanishing
masses), ``ecc`` the eccentricity of the underlying Kepler ellipse, and ``t``
the true anomaly used as time.  Everything downstream (monodromy integration,
spectral assembly, curve tracing) pulls its coefficient matrices from here.

The linearized flow is the 4x4 first-order system

    gamma'(t) = J B(t) gamma(t),     gamma(0) = I,

with B(t) = coeff_b(p, t), and the equivalent rotated-frame second-order
operator uses K(t) = coeff_k(p, t) through R(t) K R(t)^T
= (3 I + sqrt(9-beta) S(t)) / (2 (1 + e cos t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E_MAX_DEFAULT = 0.99

# Standard symplectic structure, J = (0 -I; I 0).
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
J4 = np.block([[np.zeros((2, 2)), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]])


@dataclass(frozen=True)
class Params:
    """Mass parameter and eccentricity of one orbit family member.

    ``ecc`` may be negative: the fundamental solution extends to e in (-1, 1)
    and the symmetry checks (spectra invariant under e -> -e, the antiperiodic
    curve cross-symmetry) need the negative-e half plane.
    """

    beta: float
    ecc: float = 0.0
    e_max: float = E_MAX_DEFAULT

    def __post_init__(self):
        if not 0.0 <= self.beta <= 9.0:
            raise ValueError(f"beta must lie in [0, 9], got {self.beta}")
        if not abs(self.ecc) <= self.e_max:
            raise ValueError(
                f"|ecc| must be <= e_max={self.e_max}, got {self.ecc}"
            )
        if not self.e_max < 1.0:
            raise ValueError(f"e_max must be < 1, got {self.e_max}")


def _denom(p: Params, t: float) -> float:
    d = 2.0 * (1.0 + p.ecc * math.cos(t))
    if d < 1e-12:
        raise ZeroDivisionError(
            f"coefficient denominator 2(1+e cos t) = {d} at t={t}, e={p.ecc}"
        )
    return d


def coeff_b(p: Params, t: float) -> np.ndarray:
    """Symmetric 4x4 coefficient matrix B(t) of the first-order system."""
    s = math.sqrt(9.0 - p.beta)
    d = _denom(p, t)
    num = 2.0 * p.ecc * math.cos(t) - 1.0
    return np.array(
        [
            [1.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, -1.0, 0.0],
            [0.0, -1.0, (num - s) / d, 0.0],
            [1.0, 0.0, 0.0, (num + s) / d],
        ]
    )


def coeff_k(p: Params, t: float) -> np.ndarray:
    """Diagonal 2x2 matrix K(t) = diag(3 ± sqrt(9-beta)) / (2(1+e cos t))."""
    s = math.sqrt(9.0 - p.beta)
    d = _denom(p, t)
    return np.array([[(3.0 + s) / d, 0.0], [0.0, (3.0 - s) / d]])


def s_matrix(t: float) -> np.ndarray:
    """Reflection-type matrix S(t); symmetric, traceless, S(t)^2 = I."""
    c, s = math.cos(2.0 * t), math.sin(2.0 * t)
    return np.array([[c, s], [s, -c]])


def rot(t: float) -> np.ndarray:
    """Rotation R(t) by angle t."""
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def rot4(t: float) -> np.ndarray:
    """Block rotation diag(R(t), R(t)) linking the two 4x4 frames."""
    r = rot(t)
    out = np.zeros((4, 4))
    out[:2, :2] = r
    out[2:, 2:] = r
    return out


def theta_pair_e0(beta: float) -> tuple[float, float]:
    """Rotation numbers (theta1, theta2) of the circular-orbit monodromy.

    Valid for beta in [0, 1]; theta1 <= 1/sqrt(2) <= theta2.  theta1 is
    evaluated as sqrt(beta / (2 (1 + sqrt(1-beta)))) which is exact and
    avoids the cancellation in sqrt((1 - sqrt(1-beta))/2) near beta = 0.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"theta pair defined for beta in [0,1], got {beta}")
    root = math.sqrt(1.0 - beta)
    theta1 = math.sqrt(beta / (2.0 * (1.0 + root)))
    theta2 = math.sqrt((1.0 + root) / 2.0)
    return theta1, theta2


def closed_form_multipliers_e0(beta: float) -> np.ndarray:
    """Characteristic multipliers of the circular (e=0) orbit, as 4 complex numbers.

    For beta <= 1 they are exp(±2*pi*i*theta1), exp(±2*pi*i*theta2); past the
    collision at beta = 1 they form the off-circle quadruple
    exp(±pi*sqrt(sqrt(beta)-1)) * exp(±i*pi*sqrt(sqrt(beta)+1)), all four sign
    combinations.  Continuous across beta = 1 (double pair there).
    """
    if not 0.0 <= beta <= 9.0:
        raise ValueError(f"beta must lie in [0, 9], got {beta}")
    if beta <= 1.0:
        theta1, theta2 = theta_pair_e0(beta)
        angles = [2.0 * math.pi * theta1, 2.0 * math.pi * theta2]
        vals = []
        for a in angles:
            vals.extend([np.exp(1j * a), np.exp(-1j * a)])
        return np.array(vals)
    rad = math.sqrt(beta)
    re_exp = math.pi * math.sqrt(rad - 1.0)
    im_exp = math.pi * math.sqrt(rad + 1.0)
    vals = [
        math.exp(sr * re_exp) * np.exp(1j * si * im_exp)
        for sr in (+1.0, -1.0)
        for si in (+1.0, -1.0)
    ]
    return np.array(vals)


def gamma_00_explicit(t: float) -> np.ndarray:
    """Fundamental solution at beta = 0, e = 0, in closed form.

    Valid for all t; used on [0, 2pi] as the integrator oracle.  At t = 2pi
    only the secular 6*pi entries survive, giving a triple-1 degeneracy.
    """
    c, s = math.cos(t), math.sin(t)
    return np.array(
        [
            [2.0 - c, 3.0 * t - 2.0 * s, 3.0 * t - s, 1.0 - c],
            [-s, 2.0 * c - 1.0, c - 1.0, -s],
            [s, 2.0 - 2.0 * c, 2.0 - c, s],
            [2.0 * c - 2.0, 4.0 * s - 3.0 * t, 2.0 * s - 3.0 * t, 2.0 * c - 1.0],
        ]
    )
