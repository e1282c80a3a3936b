"""Rotation-number-type index of the linearized flow, by two routes.

For each unit complex omega the pair (i_omega, nu_omega) is computed

* from the operator side (``omega_index_from_operator``): i_omega is the
  Morse index of the truncated A(beta, e) under omega-boundary conditions
  and nu_omega its nullity — valid for every endpoint, degenerate or not;
* from the path side (``omega_index_from_path``): the fundamental-solution
  path is prepended with the standard hyperbolic-to-identity extension and
  i_omega is the signed count of crossings of D_omega = 0 along the joined
  path, each crossing oriented against the rotation direction M e^{sJ}.

Both routes realize the same normalization (the extension pins the additive
constant), so they must agree whenever the path route's transversality
preconditions hold; ``bott_check`` adds the iterated-path consistency
identity i_1(gamma^k) = sum of i_omega over k-th roots of unity.

The path route refuses omega-degenerate endpoints (|D_omega(endpoint)|
below ``path_tol``); those cases are covered by the operator route alone.
At the two real points omega = +1 and -1 the sign-counting algorithm is
structurally ill-posed: conjugate eigenvalue pairs of the real path
collide there, so D_omega only touches zero (quadratically) instead of
crossing, and at +1 the extension leg additionally lands exactly on the
singular set.  Both cases are resolved the same way — the count is
evaluated at a nearby omega' = e^{i theta} strictly inside the
spectrum-free arc next to omega: the index is constant in omega on arcs
free of endpoint eigenvalues and continuous at an omega the endpoint is
nondegenerate at, so i_omega = i_{omega'}, while every crossing becomes
simple and transversal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .model import Params
from .monodromy import PathSamples, integrate_gamma, power_k
from .spectral import N_MODES_DEFAULT, NULL_TOL_DEFAULT, spectrum_checked
from .symplectic import d_omega, nu_omega, standard_j

PATH_TOL_DEFAULT = 1e-8
TWO_PI = 2.0 * math.pi

METHOD_OPERATOR = "OPERATOR"
METHOD_PATH = "PATH"


@dataclass(frozen=True)
class IndexResult:
    """(i_omega, nu_omega) for one omega, with provenance.

    ``crossings`` lists (t, sign) for the PATH method (times in the path's
    own parameter; the extension leg never contributes for the omega
    actually evaluated).  ``converged`` carries the operator route's
    truncation-stability flag.
    """

    omega: complex
    i_omega: int
    nu_omega: int
    method: str
    crossings: tuple = field(default=())
    converged: bool | None = None


def omega_index_from_operator(
    p: Params,
    omega: complex,
    n_modes: int = N_MODES_DEFAULT,
    null_tol: float = NULL_TOL_DEFAULT,
) -> IndexResult:
    """Index and nullity via the Morse index of the truncated operator."""
    spec = spectrum_checked(p, omega, n_modes, null_tol)
    return IndexResult(
        omega=complex(omega),
        i_omega=spec.morse_index,
        nu_omega=spec.nullity,
        method=METHOD_OPERATOR,
        converged=spec.converged,
    )


def _extension_value(a: float, omega: complex) -> float:
    # D_omega of diag(a, 1/a) ⋄ diag(a, 1/a) in closed form: the joined
    # path's extension leg runs a from 2 down to 1.
    r = 2.0 * omega.real - (a + 1.0 / a)
    return -r * r


def _coorientation_derivative(m: np.ndarray, omega: complex, h: float = 1e-6) -> float:
    # d/ds D_omega(M e^{sJ}) at s = 0, with e^{sJ} = cos(s) I + sin(s) J.
    j = standard_j(m.shape[0])
    eye = np.eye(m.shape[0])

    def rotated(s: float) -> float:
        return d_omega(m @ (math.cos(s) * eye + math.sin(s) * j), omega)

    return (rotated(h) - rotated(-h)) / (2.0 * h)


def _perturbed_real_omega(endpoint: np.ndarray, omega: complex) -> complex:
    # At the two real points of the circle, complex-conjugate eigenvalue
    # pairs of the (real) path collide, so D_omega touches zero
    # quadratically there instead of changing sign — the crossings are
    # invisible to sign counting.  The index is therefore evaluated at an
    # omega' on the adjacent arc free of endpoint eigenvalues: it is
    # constant on that arc (the jumps sit exactly at unit eigenvalues of
    # the endpoint) and continuous at omega because the endpoint is
    # omega-nondegenerate, so i_{omega'} = i_omega, and every crossing
    # along the path splits into simple transversal ones.
    evals = np.linalg.eigvals(endpoint)
    unit = evals[np.abs(np.abs(evals) - 1.0) < 1e-3]
    base = float(np.angle(omega))
    gaps = np.abs(np.angle(unit * np.exp(-1j * base)))
    gaps = gaps[gaps > 1e-9]
    delta = math.pi / 64.0
    if gaps.size:
        delta = min(delta, 0.5 * float(np.min(gaps)))
    return cmath.exp(1j * (base + delta))


def _refine_crossings(fn, t_lo: float, t_hi: float, n_base: int, max_level: int = 3):
    """Zeros of a real function by sign change + bisection, with refinement.

    Sign-change brackets are resolved by Brent's method.  A same-sign local
    minimum of |f| below 1e-4 of the sampled scale marks a possible pair of
    crossings hiding inside one interval (or a near-tangential touch); such
    spots are resampled at 8x density, up to max_level times.  Refinement
    ends when either sign changes appear (counted as usual) or the minimum
    stops decreasing (a genuine positive dip — no crossing); a minimum that
    keeps collapsing toward zero without a sign change is reported as an
    unresolved tangency.
    """
    from scipy.optimize import brentq

    ts = np.linspace(t_lo, t_hi, n_base + 1)
    vals = np.array([fn(t) for t in ts])
    if np.any(vals == 0.0):
        raise RuntimeError("a sample fell exactly on a crossing; perturb the grid")
    scale = max(1.0, float(np.max(np.abs(vals))))
    zeros = [
        brentq(fn, ts[i], ts[i + 1], xtol=1e-13)
        for i in range(n_base)
        if vals[i] * vals[i + 1] < 0.0
    ]
    for i in range(1, n_base):
        same_sign = vals[i - 1] * vals[i] > 0.0 and vals[i] * vals[i + 1] > 0.0
        is_min = abs(vals[i]) <= abs(vals[i - 1]) and abs(vals[i]) <= abs(vals[i + 1])
        if not (same_sign and is_min and abs(vals[i]) < 1e-4 * scale):
            continue
        lo, hi, vmin = ts[i - 1], ts[i + 1], abs(vals[i])
        for level in range(max_level + 1):
            sub_t = np.linspace(lo, hi, 17)
            sub_v = np.array([fn(t) for t in sub_t])
            changes = [k for k in range(16) if sub_v[k] * sub_v[k + 1] < 0.0]
            if changes:
                zeros.extend(brentq(fn, sub_t[k], sub_t[k + 1], xtol=1e-13) for k in changes)
                break
            j = int(np.argmin(np.abs(sub_v)))
            new_min = abs(sub_v[j])
            if new_min > 0.5 * vmin:
                break  # bounded-away dip: no crossing here
            if level == max_level:
                raise RuntimeError(
                    f"unresolved near-tangential crossing around t={sub_t[j]:.8f} "
                    f"(|D| down to {new_min:.3e} with no sign change)"
                )
            vmin = new_min
            lo = sub_t[max(j - 1, 0)]
            hi = sub_t[min(j + 1, 16)]
    return sorted(zeros)


def _crossing_count(matrix_at, t_lo: float, t_hi: float, omega: complex, n_base: int):
    # Signed crossings of D_omega = 0 along t -> matrix_at(t).
    def f(t: float) -> float:
        return d_omega(matrix_at(t), omega)

    crossings = []
    for t_star in _refine_crossings(f, t_lo, t_hi, n_base):
        h = 1e-6 * (t_hi - t_lo)
        dpath = (f(min(t_star + h, t_hi)) - f(max(t_star - h, t_lo))) / (2.0 * h)
        dcoor = _coorientation_derivative(matrix_at(t_star), omega)
        scale = max(1.0, abs(d_omega(matrix_at(t_lo), omega)))
        if abs(dpath) < 1e-6 * scale and abs(dcoor) < 1e-6 * scale:
            raise RuntimeError(
                f"degenerate crossing at t={t_star:.6f}: both derivatives vanish"
            )
        sign = 1 if dpath * dcoor > 0.0 else -1
        crossings.append((float(t_star), sign))
    return crossings


def omega_index_from_path(
    path: PathSamples,
    omega: complex,
    path_tol: float = PATH_TOL_DEFAULT,
    n_base: int = 4096,
) -> IndexResult:
    """Index via the signed crossing count along the extended path.

    The path is prepended with the extension running from
    diag(2,1/2) ⋄ diag(2,1/2) to the identity (entries 2 - t/tau); along
    that leg D_omega = -(2 cos(arg omega) - (a + 1/a))^2 is strictly
    negative for omega != 1, so only the main path contributes crossings —
    the leg is still evaluated and checked.  Endpoints with
    |D_omega| < path_tol are refused: the perturbation limit that defines
    the index there is realized by the operator route only.

    For omega = +1 or -1 the crossing count is taken at the auxiliary
    omega' described in ``_perturbed_real_omega`` (at +1 the extension leg
    additionally ends exactly on the singular set, which the perturbation
    also cures); reported crossing times always refer to the main path's
    parameter.
    """
    if abs(abs(omega) - 1.0) > 1e-9:
        raise ValueError(f"omega must have unit modulus, got |omega|={abs(omega)}")
    endpoint_d = d_omega(path.endpoint, omega)
    if abs(endpoint_d) < path_tol:
        raise ValueError(
            f"endpoint is omega-degenerate (|D_omega|={abs(endpoint_d):.3e} < "
            f"{path_tol:g}); use the operator route"
        )
    omega_eval = complex(omega)
    if min(abs(omega - 1.0), abs(omega + 1.0)) < 1e-12:
        omega_eval = _perturbed_real_omega(path.endpoint, omega)
    # extension leg: a from 2 to 1; verify the closed-form negativity on a
    # sampled grid (paranoia against a bad omega_eval)
    for a in np.linspace(2.0, 1.0, 257):
        if _extension_value(float(a), omega_eval) >= 0.0 and a > 1.0:
            raise ArithmeticError("extension leg touched the singular set")
    t_hi = float(path.times[-1])
    crossings = _crossing_count(path.matrix_at, 0.0, t_hi, omega_eval, n_base)
    i_omega = sum(s for _, s in crossings)
    return IndexResult(
        omega=complex(omega),
        i_omega=int(i_omega),
        nu_omega=nu_omega(path.endpoint, omega),
        method=METHOD_PATH,
        crossings=tuple(crossings),
    )


def iterate_path_matrix(path: PathSamples, k: int):
    """Evaluator of the k-fold iterated path on [0, k*T].

    Uses gamma(t + mT) = gamma(t) gamma(T)^m; returns (matrix_at, t_max).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    t_per = float(path.times[-1])
    powers = [np.eye(path.endpoint.shape[0])]
    for _ in range(k):
        powers.append(powers[-1] @ path.endpoint)

    def matrix_at(t: float) -> np.ndarray:
        m, rem = divmod(float(t), t_per)
        m = int(m)
        if m >= k:  # t == k*T lands in the previous segment
            m, rem = k - 1, t_per
        return path.matrix_at(rem) @ powers[m]

    return matrix_at, k * t_per


@dataclass(frozen=True)
class BottReport:
    """Consistency data for the iterated-path index identity at order k."""

    params: Params
    k: int
    roots: tuple
    per_root: tuple  # IndexResult (operator route) per root
    sum_i_omega: int
    i1_iterated: int | None
    agrees: bool | None
    skipped_reason: str | None
    nu1_iterated: int
    nu_sum_identity: bool | None  # k=2 only: nu_1(gamma^2) == nu_1 + nu_{-1}


def bott_check(
    p: Params,
    k: int,
    n_modes: int = N_MODES_DEFAULT,
    path: PathSamples | None = None,
    path_tol: float = PATH_TOL_DEFAULT,
) -> BottReport:
    """Check i_1(gamma^k) = sum over k-th roots of unity of i_omega(gamma).

    The per-root indices come from the operator route (valid even at
    degenerate roots); the iterated path's own i_1 comes from the crossing
    count and is skipped — with the reason recorded — when its endpoint is
    1-degenerate.  For k = 2 the nullity identity
    nu_1(gamma^2) = nu_1(gamma) + nu_{-1}(gamma) is verified as well.
    """
    if not 1 <= k <= 4:
        raise ValueError(f"k must be in 1..4, got {k}")
    if path is None:
        path = integrate_gamma(p)
    roots = tuple(cmath.exp(2j * math.pi * j / k) for j in range(k))
    per_root = tuple(omega_index_from_operator(p, w, n_modes) for w in roots)
    total = sum(r.i_omega for r in per_root)

    end_k = power_k(path.endpoint, k)
    nu1_iter = nu_omega(end_k, 1.0)
    i1_iter = None
    agrees = None
    reason = None
    if abs(d_omega(end_k, 1.0)) < path_tol:
        reason = "iterated endpoint is 1-degenerate; crossing count skipped"
    else:
        matrix_at, t_max = iterate_path_matrix(path, k)
        omega_eval = _perturbed_real_omega(end_k, 1.0)
        crossings = _crossing_count(matrix_at, 0.0, t_max, omega_eval, 4096 * k)
        i1_iter = int(sum(s for _, s in crossings))
        agrees = i1_iter == total
    nu_identity = None
    if k == 2:
        nu_identity = nu1_iter == per_root[0].nu_omega + per_root[1].nu_omega
    return BottReport(
        params=p,
        k=k,
        roots=roots,
        per_root=per_root,
        sum_i_omega=total,
        i1_iterated=i1_iter,
        agrees=agrees,
        skipped_reason=reason,
        nu1_iterated=nu1_iter,
        nu_sum_identity=nu_identity,
    )
