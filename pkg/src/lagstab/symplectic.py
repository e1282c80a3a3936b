"""Linear algebra of real symplectic 2x2 / 4x4 matrices.

Spectrum extraction with enforced reciprocal-conjugate pairing, stability
classification (EE / EH / HH / CS / DEGENERATE), geometric multiplicities
nu_omega, the real-valued determinant function D_omega whose zero set is the
omega-singular hypersurface, and Krein signatures of unit-circle eigenvalues.

All functions are pure; matrices are plain numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import J2, J4

SP_TOL_DEFAULT = 1e-6
CLASS_TOL_DEFAULT = 1e-6
NU_TOL_DEFAULT = 1e-8

EE = "EE"
EH = "EH"
HH = "HH"
CS = "CS"
DEGENERATE = "DEGENERATE"


def standard_j(dim: int) -> np.ndarray:
    if dim == 2:
        return J2
    if dim == 4:
        return J4
    n = dim // 2
    return np.block(
        [[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]]
    )


def sp_residual(m: np.ndarray) -> float:
    """Frobenius norm of M^T J M - J (0 for exactly symplectic M)."""
    j = standard_j(m.shape[0])
    return float(np.linalg.norm(m.T @ j @ m - j))


def check_symplectic(m: np.ndarray, sp_tol: float = SP_TOL_DEFAULT) -> None:
    """Reject m unless ||M^T J M - J|| <= sp_tol * max(1, ||M||_F^2).

    The residual of a symplectic matrix known to relative accuracy eps is
    O(eps * ||M||^2), so the gate must scale quadratically with the norm:
    strongly hyperbolic monodromies (norms of 1e3 and beyond at high
    eccentricity) would otherwise be rejected at any achievable
    integration accuracy, while near the identity the scale factor is 1
    and the gate is the plain absolute residual.
    """
    res = sp_residual(m)
    scale = max(1.0, float(np.linalg.norm(m)) ** 2)
    if res > sp_tol * scale:
        raise ValueError(
            f"matrix is not symplectic: ||M^T J M - J|| = {res:.3e} > "
            f"{sp_tol:.1e} * {scale:.3e}"
        )


def symplectic_sum(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Direct sum of two symplectic matrices in interleaved block layout.

    For M_k = (A_k B_k; C_k D_k) in square block form the result is
    (A1 0 B1 0; 0 A2 0 B2; C1 0 D1 0; 0 C2 0 D2), which is again symplectic
    with respect to the standard J of the combined dimension.
    """
    n1, n2 = m1.shape[0] // 2, m2.shape[0] // 2
    a1, b1, c1, d1 = m1[:n1, :n1], m1[:n1, n1:], m1[n1:, :n1], m1[n1:, n1:]
    a2, b2, c2, d2 = m2[:n2, :n2], m2[:n2, n2:], m2[n2:, :n2], m2[n2:, n2:]
    n = n1 + n2
    out = np.zeros((2 * n, 2 * n), dtype=np.result_type(m1, m2))
    out[:n1, :n1] = a1
    out[:n1, n : n + n1] = b1
    out[n1:n, n1:n] = a2
    out[n1:n, n + n1 :] = b2
    out[n : n + n1, :n1] = c1
    out[n : n + n1, n : n + n1] = d1
    out[n + n1 :, n1:n] = c2
    out[n + n1 :, n + n1 :] = d2
    return out


def mat_d(lam: float) -> np.ndarray:
    """Hyperbolic normal form diag(lam, 1/lam)."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    return np.array([[lam, 0.0], [0.0, 1.0 / lam]])


def mat_r(theta: float) -> np.ndarray:
    """Rotation normal form R(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------------------
# spectrum


def _merge_clusters(evals: np.ndarray, cluster_tol: float) -> np.ndarray:
    # Replace every cluster of nearly coincident eigenvalues by its mean.
    # Individual eigenvalues of a numerically defective matrix split by
    # O(sqrt(eps)) no matter how accurate the matrix is, while the cluster
    # mean (trace of the spectral projector / cluster size) stays accurate
    # to O(eps); averaging makes the returned values well conditioned.
    n = len(evals)
    merged = evals.copy()
    assigned = [False] * n
    for i in range(n):
        if assigned[i]:
            continue
        cluster = [i]
        frontier = [i]
        assigned[i] = True
        while frontier:
            a = frontier.pop()
            for b in range(n):
                if not assigned[b] and abs(evals[a] - evals[b]) <= cluster_tol * max(
                    1.0, abs(evals[a]), abs(evals[b])
                ):
                    assigned[b] = True
                    cluster.append(b)
                    frontier.append(b)
        if len(cluster) > 1:
            mean = np.mean(evals[cluster])
            merged[cluster] = mean
    return merged


def _pair_indices(evals: np.ndarray) -> list[tuple[int, int | None]]:
    # Pair eigenvalues under the involution lam -> 1/conj(lam); unit-circle
    # eigenvalues are fixed points and may self-pair.
    unmatched = list(range(len(evals)))
    pairs: list[tuple[int, int | None]] = []
    while unmatched:
        i = unmatched.pop(0)
        target = 1.0 / np.conj(evals[i])
        self_dist = abs(evals[i] - target)
        if unmatched:
            j = min(unmatched, key=lambda k: abs(evals[k] - target))
            if abs(evals[j] - target) < self_dist:
                unmatched.remove(j)
                pairs.append((i, j))
                continue
        pairs.append((i, None))
    return pairs


def eigen4(m: np.ndarray, sp_tol: float = SP_TOL_DEFAULT, cluster_tol: float = 1e-6):
    """Eigenvalues and eigenvectors of a symplectic matrix, symmetrized.

    The raw eigensolve output is post-processed in two steps.  First, any
    cluster of eigenvalues with relative diameter below cluster_tol is
    collapsed onto its mean: a defective (or nearly defective) matrix has
    individual eigenvalues that are ill conditioned, splitting by the square
    root of the matrix error, while the cluster mean is accurate to the
    matrix error itself.  Pass cluster_tol=0 to see the raw splitting.
    Second, the values are made exactly closed under lam -> 1/conj(lam):
    each eigenvalue is greedily matched with the nearest candidate for its
    reciprocal-conjugate partner and the pair is averaged onto exact
    symmetry (self-matched eigenvalues are projected onto the unit circle).
    Output is sorted by (|lam|, arg).

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns, aligned
    with the eigenvalue order.
    """
    check_symplectic(m, sp_tol)
    evals, evecs = np.linalg.eig(m)
    evals = evals.astype(complex)
    if cluster_tol > 0.0:
        evals = _merge_clusters(evals, cluster_tol)
    for i, j in _pair_indices(evals):
        if j is None:
            evals[i] = evals[i] / abs(evals[i])
        else:
            mean = 0.5 * (evals[i] + 1.0 / np.conj(evals[j]))
            evals[i] = mean
            evals[j] = 1.0 / np.conj(mean)
    order = np.lexsort((np.mod(np.angle(evals), 2.0 * np.pi), np.abs(evals)))
    return evals[order], evecs[:, order]


def nu_omega(m: np.ndarray, omega: complex, tol: float = NU_TOL_DEFAULT) -> int:
    """Geometric multiplicity of omega as an eigenvalue of M.

    Counts singular values of (M - omega I) below tol * ||M||_F; the relative
    threshold is safe here because the monodromy matrices of the problem have
    moderate norms (<= exp(sqrt(2) pi) ~ 85).
    """
    if abs(abs(omega) - 1.0) > 1e-9:
        raise ValueError(f"omega must have unit modulus, got |omega|={abs(omega)}")
    sv = np.linalg.svd(m - omega * np.eye(m.shape[0]), compute_uv=False)
    return int(np.count_nonzero(sv < tol * np.linalg.norm(m)))


def d_omega(m: np.ndarray, omega: complex) -> float:
    """The real number (-1)^(n-1) * conj(omega)^n * det(M - omega I).

    Real for any real symplectic M and |omega| = 1 (the characteristic
    polynomial is reciprocal); the imaginary part is checked against
    1e-8 * scale before being dropped.  The budget leaves room for matrices
    that are symplectic only to integration accuracy (the imaginary part is
    proportional to the defect of the characteristic polynomial from
    reciprocality, which inherits the symplecticity residual).
    """
    if abs(abs(omega) - 1.0) > 1e-9:
        raise ValueError(f"omega must have unit modulus, got |omega|={abs(omega)}")
    n = m.shape[0] // 2
    val = (-1.0) ** (n - 1) * np.conj(omega) ** n * np.linalg.det(
        m - omega * np.eye(2 * n)
    )
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-8 * scale:
        raise ArithmeticError(
            f"D_omega imaginary part {val.imag:.3e} exceeds roundoff budget "
            f"(matrix not symplectic-real or |omega| != 1?)"
        )
    return float(val.real)


def krein_sign(
    m: np.ndarray, lam: complex, v: np.ndarray, tol: float = 1e-8
) -> int:
    """Krein sign of a unit-circle eigenvalue: sign of -i * conj(v)^T J v.

    Returns 0 when the form is numerically degenerate (|form| < tol ||v||^2),
    which flags a Krein collision.  Undefined at lam = ±1.
    """
    if abs(abs(lam) - 1.0) > 1e-6:
        raise ValueError(f"Krein sign needs |lam| = 1, got {abs(lam)}")
    if abs(lam - 1.0) < 1e-9 or abs(lam + 1.0) < 1e-9:
        raise ValueError("Krein sign undefined at lam = ±1")
    resid = np.linalg.norm(m @ v - lam * v) / np.linalg.norm(v)
    if resid > 1e-6 * max(1.0, np.linalg.norm(m)):
        raise ValueError(f"v is not an eigenvector for lam: residual {resid:.3e}")
    j = standard_j(m.shape[0])
    form = -1j * (np.conj(v) @ j @ v)
    if abs(form.imag) > 1e-8 * max(1.0, abs(form)):
        raise ArithmeticError(f"Krein form not real: {form}")
    val = form.real / float(np.vdot(v, v).real)
    if abs(val) < tol:
        return 0
    return 1 if val > 0 else -1


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class SpectrumReport:
    """Classified spectrum of one symplectic 4x4 matrix."""

    eigenvalues: np.ndarray
    stability_class: str
    unit_circle_count: int
    krein: list = field(default_factory=list)
    geo_mult_plus1: int = 0
    geo_mult_minus1: int = 0


def _pair_class(lam: complex, class_tol: float) -> str:
    on_circle = abs(abs(lam) - 1.0) <= class_tol
    is_real = abs(lam.imag) <= class_tol * max(abs(lam), 1e-30)
    if on_circle and not is_real:
        return "elliptic"
    if is_real and not on_circle:
        return "hyperbolic"
    if on_circle and is_real:
        return "unit_real"  # ±1 up to tolerance; caller handles
    return "complex"


def classify(m: np.ndarray, class_tol: float = CLASS_TOL_DEFAULT) -> SpectrumReport:
    """Stability class of a symplectic 4x4 matrix by eigenvalue location.

    DEGENERATE is reported (never silently re-binned) whenever an eigenvalue
    sits within class_tol of ±1 — those are exactly the loci where the
    classification changes, and the scanner must expose them.  Otherwise the
    reciprocal-conjugate pairs are each elliptic (on the unit circle) or
    hyperbolic (real), or all four form one off-circle complex quadruple:
    EE = two elliptic pairs, EH = elliptic + hyperbolic, HH = two hyperbolic
    pairs, CS = the quadruple.
    """
    evals, evecs = eigen4(m)
    geo_p1 = nu_omega(m, 1.0)
    geo_m1 = nu_omega(m, -1.0)
    unit_mask = np.abs(np.abs(evals) - 1.0) <= class_tol
    uc_count = int(np.count_nonzero(unit_mask))

    krein = []
    for lam, v in zip(evals, evecs.T):
        if (
            abs(abs(lam) - 1.0) <= class_tol
            and abs(lam - 1.0) > class_tol
            and abs(lam + 1.0) > class_tol
        ):
            krein.append((lam, krein_sign(m, lam, v)))

    near_pm1 = np.minimum(np.abs(evals - 1.0), np.abs(evals + 1.0)) <= class_tol
    if np.any(near_pm1):
        cls = DEGENERATE
    else:
        kinds = sorted(_pair_class(lam, class_tol) for lam in evals)
        if kinds == ["elliptic"] * 4:
            cls = EE
        elif kinds == ["elliptic", "elliptic", "hyperbolic", "hyperbolic"]:
            cls = EH
        elif kinds == ["hyperbolic"] * 4:
            cls = HH
        elif kinds == ["complex"] * 4:
            cls = CS
        else:
            # Tolerance-edge combination (e.g. an eigenvalue straddling the
            # circle band): report the boundary rather than guess.
            cls = DEGENERATE
    return SpectrumReport(
        eigenvalues=evals,
        stability_class=cls,
        unit_circle_count=uc_count,
        krein=krein,
        geo_mult_plus1=geo_p1,
        geo_mult_minus1=geo_m1,
    )
