"""Degeneracy and hyperbolicity curves in the (beta, e) rectangle.

For each unit omega != 1 the operator A(beta, e) under omega-boundary
conditions is degenerate along exactly two curves beta_1(e, omega) <=
beta_2(e, omega).  They are located through the compact operator
B(e, omega) = A(9,e)^(-1/2) (S(t)/(2(1+e cos t))) A(9,e)^(-1/2): A(beta, e)
is omega-degenerate precisely when -1/sqrt(9-beta) is an eigenvalue of
B(e, omega), so each eigenvalue mu < -1/3 yields beta = 9 - mu^(-2).  At
the truncation level this correspondence is exact — the truncated A(beta)
equals A(9) + sqrt(9-beta) W entrywise — so every reported beta is
certified by an actual nullity of the assembled A.

At omega = -1 the two curves coincide with the degeneracy curves of the
restrictions to E1 and E2 (``minus_one_curves``), computed independently
by root-finding on the smallest restricted eigenvalue; their pointwise
min/max are the curves bounding the elliptic region from above and the
non-hyperbolic region from below.  ``gamma_k`` locates the boundary of the
spectral-instability region (no unit-circle multipliers at all) by
bisection on the integrated monodromy's classification.  ``slope_at_origin``
measures tangent directions at the common point (3/4, 0), and
``omega_fan`` sweeps the degeneracy curves over a grid of omegas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import E_MAX_DEFAULT, Params
from .monodromy import IntegratorOptions, integrate_gamma
from .spectral import (
    N_MODES_DEFAULT,
    NULL_TOL_DEFAULT,
    assemble_A,
    assemble_B_compact,
    assemble_restricted,
    morse_and_nullity,
)
from .symplectic import CLASS_TOL_DEFAULT, classify

CURVE_JUMP_TOL = 0.2
BISECTION_TOL_DEFAULT = 1e-6
NEAR_COLLISION_TOL = 1e-9

LABEL_BETA1 = "BETA1"
LABEL_BETA2 = "BETA2"
LABEL_GAMMA_S = "GAMMA_S"
LABEL_GAMMA_M = "GAMMA_M"
LABEL_GAMMA_K = "GAMMA_K"
LABEL_E1 = "E1"
LABEL_E2 = "E2"


@dataclass(frozen=True)
class CurvePoint:
    """One curve sample; ``residual`` is the certificate's distance from zero.

    For degeneracy points that is the smallest |eigenvalue| of the
    assembled operator at the reported beta; for GAMMA_K it is the final
    bisection half-width.  ``omega`` is None for GAMMA_K (the predicate
    involves the whole unit circle).
    """

    e: float
    beta: float
    omega: complex | None
    label: str
    residual: float
    detail: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class CurveTable:
    """Curve samples sorted by strictly increasing e, plus run metadata."""

    label: str
    points: tuple
    metadata: dict = field(compare=False)

    def __post_init__(self):
        es = [p.e for p in self.points]
        if any(b <= a for a, b in zip(es, es[1:])):
            raise ValueError(f"{self.label}: e values not strictly increasing")

    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.points])

    def es(self) -> np.ndarray:
        return np.array([p.e for p in self.points])


def _certify_degeneracy(beta: float, e: float, omega: complex, n_modes: int):
    spec = morse_and_nullity(assemble_A(Params(beta, e), omega, n_modes))
    residual = float(np.min(np.abs(spec.eigenvalues)))
    if spec.nullity < 1:
        raise ArithmeticError(
            f"degeneracy certificate failed at beta={beta}, e={e}, "
            f"omega={omega}: nullity 0, nearest eigenvalue {residual:.3e}"
        )
    return residual, spec.morse_index, spec.nullity


def _degeneracy_pair(e: float, omega: complex, n_modes: int):
    _, evals = assemble_B_compact(e, omega, n_modes)
    low = evals[evals < -1.0 / 3.0]
    if len(low) != 2:
        raise ArithmeticError(
            f"expected exactly 2 compact-operator eigenvalues below -1/3 at "
            f"e={e}, omega={omega}, found {len(low)}; lowest part of the "
            f"spectrum: {evals[:6]}"
        )
    mu1, mu2 = float(low[0]), float(low[1])
    if abs(mu1 - mu2) < NEAR_COLLISION_TOL:
        mu1 = mu2 = 0.5 * (mu1 + mu2)
    betas = sorted(9.0 - 1.0 / (mu * mu) for mu in (mu1, mu2))
    out = []
    for b in betas:
        residual, morse, nullity = _certify_degeneracy(b, e, omega, n_modes)
        out.append((b, residual, morse, nullity))
    return out


def degeneracy_betas(e: float, omega: complex, n_modes: int = N_MODES_DEFAULT):
    """The two beta values where A(beta, e) is omega-degenerate, ascending.

    At omega = 1 the conventional pair (0, 0) is returned (the curves
    collapse to the beta = 0 edge there).  Each returned beta is certified
    by the nullity of the assembled full operator; coinciding compact
    eigenvalues (within 1e-9) are reported as an exactly equal pair.
    """
    if abs(omega - 1.0) < 1e-12:
        return (0.0, 0.0)
    pair = _degeneracy_pair(e, omega, n_modes)
    return (pair[0][0], pair[1][0])


def _restricted_min_eig(beta: float, e: float, space: str, n_modes: int) -> float:
    t_op = assemble_restricted(Params(beta, e), space, n_modes)
    return float(np.linalg.eigvalsh(t_op.entries)[0])


def restricted_degeneracy_beta(
    e: float, space: str, n_modes: int = N_MODES_DEFAULT
) -> tuple[float, float]:
    """beta where the smallest eigenvalue of A(beta,e)|space crosses zero.

    Returns (beta, residual).  The scaled operator A/sqrt(9-beta) is
    strictly increasing in beta and shares the sign of the smallest
    eigenvalue, so there is exactly one sign change; its absence signals a
    broken model and raises.
    """
    lo, hi = 1e-9, 9.0 - 1e-9
    f_lo = _restricted_min_eig(lo, e, space, n_modes)
    f_hi = _restricted_min_eig(hi, e, space, n_modes)
    if not (f_lo < 0.0 < f_hi):
        raise ArithmeticError(
            f"no sign change of the smallest {space} eigenvalue over "
            f"[{lo:g}, {hi:g}] at e={e}: ends {f_lo:.3e}, {f_hi:.3e}"
        )
    beta = brentq(
        lambda b: _restricted_min_eig(b, e, space, n_modes), lo, hi, xtol=1e-10
    )
    return float(beta), abs(_restricted_min_eig(float(beta), e, space, n_modes))


def _refined_grid(e_grid, solve, betas_of, max_level: int = 4):
    # Insert midpoints wherever any solved beta jumps by more than the
    # continuity guard between adjacent samples; returns sorted
    # (e, solved value) pairs.  ``betas_of`` extracts the guarded betas.
    pts = [(float(e), solve(float(e))) for e in e_grid]
    pts.sort(key=lambda p: p[0])
    for _ in range(max_level):
        inserts = []
        for (e_a, v_a), (e_b, v_b) in zip(pts, pts[1:]):
            jump = np.max(np.abs(np.subtract(betas_of(v_b), betas_of(v_a))))
            if jump > CURVE_JUMP_TOL:
                mid = 0.5 * (e_a + e_b)
                inserts.append((mid, solve(mid)))
        if not inserts:
            break
        pts.extend(inserts)
        pts.sort(key=lambda p: p[0])
    return pts


def default_e_grid(e_max: float = 0.96, n: int = 81) -> np.ndarray:
    return np.linspace(-e_max, e_max, n)


def minus_one_curves(e_grid=None, n_modes: int = N_MODES_DEFAULT):
    """Curve tables at omega = -1: the E1/E2 branches and their min/max.

    Returns a dict with keys "E1", "E2", "GAMMA_S", "GAMMA_M".  The E
    branches come from root-finding on the restricted operators; the
    mirror identity beta_E1(e) = beta_E2(-e) makes them smooth across
    e = 0 while the min/max envelopes have a corner there.
    """
    if e_grid is None:
        e_grid = default_e_grid()
    meta = {
        "n_modes": n_modes,
        "omega_theta": math.pi,
        "e_grid": [float(e) for e in e_grid],
        "jump_tol": CURVE_JUMP_TOL,
    }
    tables = {}
    solved = {}
    for space in (LABEL_E1, LABEL_E2):
        pts = _refined_grid(
            e_grid,
            lambda e, s=space: restricted_degeneracy_beta(e, s, n_modes),
            betas_of=lambda v: v[0],
        )
        solved[space] = pts
        tables[space] = CurveTable(
            label=space,
            points=tuple(
                CurvePoint(e=e, beta=b, omega=-1.0 + 0.0j, label=space, residual=r)
                for e, (b, r) in pts
            ),
            metadata=dict(meta),
        )
    es = [e for e, _ in solved[LABEL_E1]]
    if es != [e for e, _ in solved[LABEL_E2]]:
        # refinement may have split the grids differently; re-solve the union
        union = sorted(set(es) | {e for e, _ in solved[LABEL_E2]})
        for space in (LABEL_E1, LABEL_E2):
            have = dict(solved[space])
            solved[space] = [
                (e, have[e] if e in have else restricted_degeneracy_beta(e, space, n_modes))
                for e in union
            ]
        es = union
    for label, pick in ((LABEL_GAMMA_S, min), (LABEL_GAMMA_M, max)):
        points = []
        for (e, (b1, r1)), (_, (b2, r2)) in zip(solved[LABEL_E1], solved[LABEL_E2]):
            b, r = pick((b1, r1), (b2, r2), key=lambda br: br[0])
            points.append(
                CurvePoint(e=e, beta=b, omega=-1.0 + 0.0j, label=label, residual=r)
            )
        tables[label] = CurveTable(label=label, points=tuple(points), metadata=dict(meta))
    return tables


def is_spectrally_unstable(
    beta: float,
    e: float,
    class_tol: float = CLASS_TOL_DEFAULT,
    integrator: IntegratorOptions | None = None,
) -> bool:
    """True when the monodromy spectrum avoids the unit circle entirely."""
    path = integrate_gamma(Params(beta, e), integrator or IntegratorOptions())
    report = classify(path.endpoint, class_tol)
    return report.unit_circle_count == 0


def gamma_k(
    e: float,
    n_modes: int = N_MODES_DEFAULT,
    bisection_tol: float = BISECTION_TOL_DEFAULT,
    class_tol: float = CLASS_TOL_DEFAULT,
    integrator: IntegratorOptions | None = None,
    beta_m: float | None = None,
) -> CurvePoint:
    """The e-section of the boundary of the fully hyperbolic region.

    Bisects beta on the predicate "no multiplier on the unit circle",
    starting from the bracket [beta_m(e) - 1e-4, 9]; the lower end must be
    non-hyperbolic and the upper end hyperbolic (the hyperbolic region is
    connected in beta, which justifies plain bisection).  ``beta_m``, if
    given, skips its recomputation.  The bracketing classifications at the
    final interval ends are attached in ``detail``.
    """
    if beta_m is None:
        beta_m = max(
            restricted_degeneracy_beta(e, LABEL_E1, n_modes)[0],
            restricted_degeneracy_beta(e, LABEL_E2, n_modes)[0],
        )
    lo = beta_m - 1e-4
    hi = 9.0
    if is_spectrally_unstable(lo, e, class_tol, integrator):
        raise ArithmeticError(
            f"beta just below beta_m={beta_m} at e={e} is already fully "
            "hyperbolic; the ordering beta_m <= beta_k is violated"
        )
    if not is_spectrally_unstable(hi, e, class_tol, integrator):
        raise ArithmeticError(f"beta=9 not fully hyperbolic at e={e}")
    while hi - lo > bisection_tol:
        mid = 0.5 * (lo + hi)
        if is_spectrally_unstable(mid, e, class_tol, integrator):
            hi = mid
        else:
            lo = mid
    path_lo = integrate_gamma(Params(lo, e), integrator or IntegratorOptions())
    path_hi = integrate_gamma(Params(hi, e), integrator or IntegratorOptions())
    detail = (
        ("class_lo", classify(path_lo.endpoint, class_tol).stability_class),
        ("class_hi", classify(path_hi.endpoint, class_tol).stability_class),
        ("beta_lo", lo),
        ("beta_hi", hi),
    )
    return CurvePoint(
        e=float(e),
        beta=0.5 * (lo + hi),
        omega=None,
        label=LABEL_GAMMA_K,
        residual=0.5 * (hi - lo),
        detail=detail,
    )


def slope_at_origin(
    label: str,
    h: float = 0.01,
    omega: complex | None = None,
    n_modes: int = N_MODES_DEFAULT,
) -> float:
    """Tangent slope d(beta)/d(e) at e = 0 of the labeled curve.

    E1/E2 are the smooth analytic branches through (3/4, 0), so their
    slope is a central difference.  GAMMA_S/GAMMA_M have a corner at
    e = 0 (they swap branches there); their conventional tangent is the
    central-difference slope of whichever smooth branch realizes them on
    the e > 0 side.  BETA1/BETA2 need ``omega`` and use the compact-route
    curves (even in e for non-real omega, hence slope 0 there).
    """
    if not 1e-3 <= h <= 0.05:
        raise ValueError(
            f"h={h} outside [1e-3, 0.05]: below the curve solvers' resolution "
            "or beyond the linearization range"
        )
    if label in (LABEL_E1, LABEL_E2):
        b_plus, _ = restricted_degeneracy_beta(h, label, n_modes)
        b_minus, _ = restricted_degeneracy_beta(-h, label, n_modes)
        return (b_plus - b_minus) / (2.0 * h)
    if label in (LABEL_GAMMA_S, LABEL_GAMMA_M):
        plus = {s: restricted_degeneracy_beta(h, s, n_modes)[0] for s in (LABEL_E1, LABEL_E2)}
        minus = {s: restricted_degeneracy_beta(-h, s, n_modes)[0] for s in (LABEL_E1, LABEL_E2)}
        pick = min if label == LABEL_GAMMA_S else max
        branch = pick(plus, key=plus.get)
        return (plus[branch] - minus[branch]) / (2.0 * h)
    if label in (LABEL_BETA1, LABEL_BETA2):
        if omega is None:
            raise ValueError(f"label {label} requires omega")
        idx = 0 if label == LABEL_BETA1 else 1
        b_plus = degeneracy_betas(h, omega, n_modes)[idx]
        b_minus = degeneracy_betas(-h, omega, n_modes)[idx]
        return (b_plus - b_minus) / (2.0 * h)
    raise ValueError(f"unknown curve label {label!r}")


def forward_slope_at_origin(label: str, h: float = 0.01, n_modes: int = N_MODES_DEFAULT) -> float:
    """One-sided slope (beta(h) - beta(0)) / h of GAMMA_S or GAMMA_M at 0+."""
    if label not in (LABEL_GAMMA_S, LABEL_GAMMA_M):
        raise ValueError(f"forward slope is defined for the envelope curves, not {label!r}")
    if not 1e-3 <= h <= 0.05:
        raise ValueError(f"h={h} outside [1e-3, 0.05]")
    pick = min if label == LABEL_GAMMA_S else max
    at_h = pick(restricted_degeneracy_beta(h, s, n_modes)[0] for s in (LABEL_E1, LABEL_E2))
    at_0 = pick(restricted_degeneracy_beta(0.0, s, n_modes)[0] for s in (LABEL_E1, LABEL_E2))
    return (at_h - at_0) / h


def omega_fan(e_grid=None, theta_grid=None, n_modes: int = N_MODES_DEFAULT):
    """Degeneracy curve tables over a fan of omegas e^{i theta}.

    Returns a list of CurveTables, one per (theta, branch) with labels
    BETA1/BETA2 and the theta recorded in the metadata; the list is
    ordered by theta, then branch.
    """
    if e_grid is None:
        e_grid = default_e_grid()
    if theta_grid is None:
        theta_grid = [math.pi / 100, math.pi / 5, 2 * math.pi / 5, 3 * math.pi / 5,
                      4 * math.pi / 5, math.pi]
    tables = []
    for theta in theta_grid:
        omega = cmath.exp(1j * float(theta))
        pairs = _refined_grid(
            e_grid,
            lambda e: _degeneracy_pair(e, omega, n_modes),
            betas_of=lambda v: [v[0][0], v[1][0]],
        )
        meta = {
            "n_modes": n_modes,
            "omega_theta": float(theta),
            "e_grid": [float(e) for e in e_grid],
            "jump_tol": CURVE_JUMP_TOL,
        }
        for idx, label in enumerate((LABEL_BETA1, LABEL_BETA2)):
            points = tuple(
                CurvePoint(
                    e=e, beta=pair[idx][0], omega=omega, label=label,
                    residual=pair[idx][1],
                )
                for e, pair in pairs
            )
            tables.append(
                CurveTable(label=label, points=points, metadata=dict(meta))
            )
    return tables


def write_curve_csv(path: str, tables) -> None:
    """Write curve tables as CSV: label, omega_theta, e, beta, residual, N."""
    if isinstance(tables, dict):
        tables = list(tables.values())
    with open(path, "w") as fh:
        fh.write("label,omega_theta,e,beta,residual,N\n")
        for table in tables:
            n_modes = table.metadata.get("n_modes", "")
            for p in table.points:
                theta = "" if p.omega is None else f"{float(np.angle(p.omega)):.17g}"
                fh.write(
                    f"{p.label},{theta},{p.e:.17g},{p.beta:.17g},"
                    f"{p.residual:.17g},{n_modes}\n"
                )
