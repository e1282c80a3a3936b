"""Fourier-truncated realizations of the stability operators.

The second-order operator

    A(beta, e) = -d^2/dt^2 - I + (3 I + sqrt(9-beta) S(t)) / (2 (1 + e cos t))

acts on 2-vector functions y with the omega-boundary condition
y(2pi) = omega y(0), y'(2pi) = omega y'(0).  This module assembles finite
Hermitian matrices representing it in several bases:

* ``assemble_A`` — omega-twisted Fourier modes exp(i(k+sigma)t) x C^2 with
  sigma = arg(omega)/2pi, k = -N..N;
* ``assemble_a1`` — the scalar operator a1(e) = -d^2/dt^2 - 1 +
  3/(2(1+e cos t)) whose double is A(9, e);
* ``assemble_restricted`` — the restrictions to the subspaces
  E1 = {x(0)=0, y(pi)=0} and E2 = {x(pi)=0, y(0)=0} on [0, pi], spanned by
  half-integer sine/cosine modes;
* ``assemble_B_compact`` — the compact operator
  B(e, omega) = A(9,e)^(-1/2) (S(t)/(2(1+e cos t))) A(9,e)^(-1/2)
  whose eigenvalues mu < -1/3 locate operator degeneracies via
  beta = 9 - mu^(-2).

``morse_and_nullity`` counts negative and (near-)zero eigenvalues of any
assembled truncation; ``spectrum_checked`` re-verifies the counts at twice
the truncation order.  ``kernel_residual_34`` measures how well the explicit
kernel vector of A(3/4, 0) restricted to E1 is annihilated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .model import Params

NULL_TOL_DEFAULT = 1e-7
N_MODES_DEFAULT = 128
COEFF_TAIL_TOL = 1e-13
HERMITICITY_TOL = 1e-12

BETA_34 = 0.75
SQRT33 = math.sqrt(33.0)


@dataclass(frozen=True)
class TruncatedOperator:
    """A finite Hermitian section of one of the stability operators."""

    dimension: int
    entries: np.ndarray
    basis: str
    truncation: int


@dataclass(frozen=True)
class OperatorSpectrum:
    """Eigenvalues of a truncation plus the counts derived from them.

    ``null_tol`` records the absolute threshold actually applied: the
    nominal relative tolerance scaled by max(1, |most negative eigenvalue|).
    ``converged`` is None unless the counts were re-verified at twice the
    truncation order (see ``spectrum_checked``).
    """

    eigenvalues: np.ndarray
    morse_index: int
    nullity: int
    truncation: int
    null_tol: float
    boundary: str
    converged: bool | None = None


def _sigma_of(omega: complex) -> float:
    if abs(abs(omega) - 1.0) > 1e-9:
        raise ValueError(f"omega must have unit modulus, got |omega|={abs(omega)}")
    return (np.angle(omega) / (2.0 * np.pi)) % 1.0


def fourier_inv_denom(e: float, max_order: int, tail_order: int | None = None):
    """Fourier coefficients c_j of 1/(1 + e cos t), j = -max_order..max_order.

    Computed by FFT quadrature; the grid is refined automatically until the
    coefficients over the used range stop changing (aliasing below roundoff).
    If the converged tail at ``tail_order`` still exceeds 1e-13 relative to
    c_0 the truncation cannot represent the function and a RuntimeError is
    raised (remedy: larger N or smaller |e|).

    Returns a real array ``c`` of length 2*max_order+1 with c[max_order + j]
    holding the coefficient of exp(i j t).
    """
    if abs(e) >= 1.0:
        raise ValueError(f"|e| must be < 1, got {e}")
    if tail_order is None:
        tail_order = max_order
    m = 1 << max(10, (4 * max_order - 1).bit_length())
    prev = None
    while True:
        t = 2.0 * np.pi * np.arange(m) / m
        coef = np.fft.fft(1.0 / (1.0 + e * np.cos(t))) / m
        picked = coef[np.arange(-max_order, max_order + 1) % m]
        if np.max(np.abs(picked.imag)) > 1e-13 * abs(picked[max_order].real):
            raise ArithmeticError("coefficients of an even real function came out complex")
        cur = picked.real
        if prev is not None and np.max(np.abs(cur - prev)) <= 1e-15 * abs(cur[max_order]):
            break
        if m > (1 << 22):
            raise RuntimeError("Fourier coefficient quadrature failed to converge")
        prev = cur
        m *= 2
    tail = np.abs(cur[max_order + tail_order :])
    if tail.size and np.max(tail) > COEFF_TAIL_TOL * abs(cur[max_order]):
        raise RuntimeError(
            f"coefficient tail {np.max(tail):.3e} at order {tail_order} exceeds "
            f"{COEFF_TAIL_TOL:g} relative; increase N or reduce |e|={abs(e)}"
        )
    return cur


def _toeplitz_centered(seq: np.ndarray, n: int) -> np.ndarray:
    # seq holds offsets -J..J at positions 0..2J; returns the n x n matrix
    # T[a, b] = seq[J + (a - b)].
    j0 = (len(seq) - 1) // 2
    col = seq[j0 : j0 + n]
    row = seq[j0 : j0 - n if j0 - n >= 0 else None : -1][:n]
    return toeplitz(col, row)


def _check_hermitian(h: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.linalg.norm(h)))
    err = float(np.linalg.norm(h - h.conj().T))
    if err > HERMITICITY_TOL * scale:
        raise ArithmeticError(f"{what} not Hermitian: residual {err:.3e} (scale {scale:.3e})")
    return 0.5 * (h + h.conj().T)


def _potential_blocks(beta: float, e: float, n_modes: int):
    # Fourier coefficient sequences (offsets -(2N)..(2N)) of the three entry
    # functions of (3 I + sqrt(9-beta) S(t)) / (2 (1 + e cos t)).
    s = math.sqrt(max(9.0 - beta, 0.0))
    jmax = 2 * n_modes + 2
    c = 0.5 * fourier_inv_denom(e, jmax, tail_order=n_modes)  # f = 1/(2(1+e cos t))
    j0 = jmax
    lo, hi = j0 - 2 * n_modes, j0 + 2 * n_modes + 1
    f0 = c[lo:hi]
    fm2 = c[lo - 2 : hi - 2]  # shift: coefficient of f(t) e^{2it} at offset j is c_{j-2}
    fp2 = c[lo + 2 : hi + 2]
    cos2 = 0.5 * (fm2 + fp2)
    sin2 = -0.5j * (fm2 - fp2)
    v11 = 3.0 * f0 + s * cos2
    v22 = 3.0 * f0 - s * cos2
    v12 = s * sin2 + 0j
    return v11.astype(complex), v12, v22.astype(complex)


def assemble_A(p: Params, omega: complex, n_modes: int = N_MODES_DEFAULT) -> TruncatedOperator:
    """Truncation of A(beta, e) under omega-boundary conditions.

    Basis: modes exp(i (k+sigma) t), k = -N..N, two components per mode
    (index 2*(k+N) + component), dimension 2(2N+1).  The derivative block is
    diagonal with (k+sigma)^2 - 1; the multiplication operator becomes a
    block-Toeplitz convolution in the Fourier coefficients of its entries.
    """
    if n_modes < 8:
        raise ValueError(f"n_modes must be >= 8, got {n_modes}")
    sigma = _sigma_of(omega)
    v11, v12, v22 = _potential_blocks(p.beta, p.ecc, n_modes)
    size = 2 * n_modes + 1
    t11 = _toeplitz_centered(v11, size)
    t12 = _toeplitz_centered(v12, size)
    t22 = _toeplitz_centered(v22, size)
    k = np.arange(-n_modes, n_modes + 1) + sigma
    kin = np.diag(k * k - 1.0)
    e00 = np.array([[1.0, 0.0], [0.0, 0.0]])
    e11 = np.array([[0.0, 0.0], [0.0, 1.0]])
    e01 = np.array([[0.0, 1.0], [0.0, 0.0]])
    h = (
        np.kron(kin + t11, e00)
        + np.kron(kin + t22, e11)
        + np.kron(t12, e01)
        + np.kron(t12.conj().T, e01.T)
    )
    h = _check_hermitian(h, f"A(beta={p.beta}, e={p.ecc}, omega={omega})")
    return TruncatedOperator(
        dimension=2 * size,
        entries=h,
        basis=f"twisted Fourier modes k+sigma, sigma={sigma:.12g}, k=-{n_modes}..{n_modes}, C^2",
        truncation=n_modes,
    )


def assemble_a1(e: float, omega: complex, n_modes: int = N_MODES_DEFAULT) -> TruncatedOperator:
    """Truncation of the scalar operator -d^2/dt^2 - 1 + 3/(2(1+e cos t)).

    Its direct double equals A(9, e) in the twisted Fourier basis.
    """
    if n_modes < 8:
        raise ValueError(f"n_modes must be >= 8, got {n_modes}")
    sigma = _sigma_of(omega)
    jmax = 2 * n_modes + 2
    c = 0.5 * fourier_inv_denom(e, jmax, tail_order=n_modes)
    j0 = jmax
    size = 2 * n_modes + 1
    t = _toeplitz_centered(3.0 * c[j0 - 2 * n_modes : j0 + 2 * n_modes + 1], size)
    k = np.arange(-n_modes, n_modes + 1) + sigma
    h = np.diag(k * k - 1.0) + t
    h = _check_hermitian(h.astype(complex), f"a1(e={e}, omega={omega})")
    return TruncatedOperator(
        dimension=size,
        entries=h,
        basis=f"twisted Fourier modes k+sigma, sigma={sigma:.12g}, k=-{n_modes}..{n_modes}, scalar",
        truncation=n_modes,
    )


def morse_and_nullity(
    t_op: TruncatedOperator, null_tol: float = NULL_TOL_DEFAULT, boundary: str = ""
) -> OperatorSpectrum:
    """Eigenvalues of a truncation with Morse index and nullity counts.

    The zero threshold is ``null_tol`` scaled by max(1, |lowest eigenvalue|):
    the Morse index counts eigenvalues below -threshold, the nullity counts
    those within the closed threshold band.
    """
    evals = np.linalg.eigvalsh(t_op.entries)
    scale = max(1.0, float(-evals[0])) if evals.size else 1.0
    thresh = null_tol * scale
    morse = int(np.count_nonzero(evals < -thresh))
    nullity = int(np.count_nonzero(np.abs(evals) <= thresh))
    return OperatorSpectrum(
        eigenvalues=evals,
        morse_index=morse,
        nullity=nullity,
        truncation=t_op.truncation,
        null_tol=thresh,
        boundary=boundary or t_op.basis,
    )


def spectrum_checked(
    p: Params,
    omega: complex,
    n_modes: int = N_MODES_DEFAULT,
    null_tol: float = NULL_TOL_DEFAULT,
) -> OperatorSpectrum:
    """Morse index and nullity of A(beta, e) with an N -> 2N stability check.

    The counts are recomputed at twice the truncation order; ``converged``
    records whether both agree (disagreement flags an under-resolved
    truncation rather than raising, so scans can report it per point).
    """
    fine = morse_and_nullity(
        assemble_A(p, omega, 2 * n_modes), null_tol, boundary=f"omega={omega:.12g}"
    )
    coarse = morse_and_nullity(
        assemble_A(p, omega, n_modes), null_tol, boundary=f"omega={omega:.12g}"
    )
    ok = (coarse.morse_index == fine.morse_index) and (coarse.nullity == fine.nullity)
    return OperatorSpectrum(
        eigenvalues=coarse.eigenvalues,
        morse_index=coarse.morse_index,
        nullity=coarse.nullity,
        truncation=n_modes,
        null_tol=coarse.null_tol,
        boundary=coarse.boundary,
        converged=ok,
    )


def _gauss_grid(n_points: int):
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    t = 0.5 * np.pi * (nodes + 1.0)
    w = 0.5 * np.pi * weights
    return t, w


def _quad_block(phi: np.ndarray, g: np.ndarray, psi: np.ndarray, w: np.ndarray) -> np.ndarray:
    # phi, psi: (n_points, n_modes) sampled basis columns; g: (n_points,)
    return phi.T @ (w[:, None] * g[:, None] * psi)


def assemble_restricted(p: Params, space: str, n_modes: int = N_MODES_DEFAULT) -> TruncatedOperator:
    """Truncation of A(beta, e) restricted to E1 or E2 on [0, pi].

    E1 = {x(0)=0, y(pi)=0}: x in sin((k+1/2)t), y in cos((k+1/2)t);
    E2 = {x(pi)=0, y(0)=0}: x in cos((k+1/2)t), y in sin((k+1/2)t);
    k = 0..N-1, modes normalized by sqrt(2/pi).  Layout: the x block first,
    then the y block (dimension 2N).  Entries by Gauss-Legendre quadrature
    on >= 8N points; the derivative part is diagonal, (k+1/2)^2 - 1.
    """
    if space not in ("E1", "E2"):
        raise ValueError(f"space must be 'E1' or 'E2', got {space!r}")
    if n_modes < 2:
        raise ValueError(f"n_modes must be >= 2, got {n_modes}")
    t, w = _gauss_grid(max(8 * n_modes, 256))
    half = np.arange(n_modes) + 0.5
    norm = math.sqrt(2.0 / np.pi)
    sin_modes = norm * np.sin(np.outer(t, half))
    cos_modes = norm * np.cos(np.outer(t, half))
    if space == "E1":
        xb, yb = sin_modes, cos_modes
    else:
        xb, yb = cos_modes, sin_modes
    s = math.sqrt(max(9.0 - p.beta, 0.0))
    f = 1.0 / (2.0 * (1.0 + p.ecc * np.cos(t)))
    v11 = f * (3.0 + s * np.cos(2.0 * t))
    v22 = f * (3.0 - s * np.cos(2.0 * t))
    v12 = f * (s * np.sin(2.0 * t))
    stiff = np.diag(half * half - 1.0)
    h = np.zeros((2 * n_modes, 2 * n_modes))
    h[:n_modes, :n_modes] = stiff + _quad_block(xb, v11, xb, w)
    h[n_modes:, n_modes:] = stiff + _quad_block(yb, v22, yb, w)
    h[:n_modes, n_modes:] = _quad_block(xb, v12, yb, w)
    h[n_modes:, :n_modes] = h[:n_modes, n_modes:].T
    h = np.real(_check_hermitian(h, f"A(beta={p.beta}, e={p.ecc})|{space}"))
    return TruncatedOperator(
        dimension=2 * n_modes,
        entries=h,
        basis=f"{space} half-integer modes (k+1/2), k=0..{n_modes - 1}",
        truncation=n_modes,
    )


def kernel_residual_34(n_modes: int) -> float:
    """Relative residual of the explicit kernel vector of A(3/4, 0) on E1.

    The vector x0(t) = R(t) z(t) with z(t) = ((7-sqrt(33))/4 sin(t/2),
    cos(t/2)) lies in E1 and in the kernel of A(3/4, 0); it is projected
    onto the truncated E1 basis by quadrature and ||A x0|| / ||x0|| is
    returned in that representation.
    """
    if n_modes < 16:
        raise ValueError(f"n_modes must be >= 16, got {n_modes}")
    t_op = assemble_restricted(Params(BETA_34, 0.0), "E1", n_modes)
    t, w = _gauss_grid(max(8 * n_modes, 256))
    a = (7.0 - SQRT33) / 4.0
    zx = a * np.sin(0.5 * t)
    zy = np.cos(0.5 * t)
    x0 = np.stack([np.cos(t) * zx - np.sin(t) * zy, np.sin(t) * zx + np.cos(t) * zy])
    half = np.arange(n_modes) + 0.5
    norm = math.sqrt(2.0 / np.pi)
    sin_modes = norm * np.sin(np.outer(t, half))
    cos_modes = norm * np.cos(np.outer(t, half))
    coeffs = np.concatenate([sin_modes.T @ (w * x0[0]), cos_modes.T @ (w * x0[1])])
    return float(np.linalg.norm(t_op.entries @ coeffs) / np.linalg.norm(coeffs))


def assemble_B_compact(e: float, omega: complex, n_modes: int = N_MODES_DEFAULT):
    """The compact operator A(9,e)^(-1/2) (S(t)/(2(1+e cos t))) A(9,e)^(-1/2).

    Assembled in the omega-twisted Fourier basis of ``assemble_A``.  The
    inverse square root comes from the eigendecomposition of the truncated
    A(9, e); any nonpositive eigenvalue there is a fatal model error (that
    operator is positive for every omega and |e| < 1).  The product is
    symmetrized to remove roundoff asymmetry.

    Returns (matrix, eigenvalues) with eigenvalues sorted ascending.
    """
    a9 = assemble_A(Params(9.0, e), omega, n_modes)
    d, u = np.linalg.eigh(a9.entries)
    if d[0] <= 0.0:
        raise ArithmeticError(
            f"truncated A(9, e={e}) has nonpositive eigenvalue {d[0]:.6e}; "
            "the model requires it to be positive"
        )
    inv_sqrt = (u * (1.0 / np.sqrt(d))) @ u.conj().T
    jmax = 2 * n_modes + 2
    c = 0.5 * fourier_inv_denom(e, jmax, tail_order=n_modes)
    lo, hi = jmax - 2 * n_modes, jmax + 2 * n_modes + 1
    cos2 = (0.5 * (c[lo - 2 : hi - 2] + c[lo + 2 : hi + 2])).astype(complex)
    sin2 = -0.5j * (c[lo - 2 : hi - 2] - c[lo + 2 : hi + 2])
    size = 2 * n_modes + 1
    t_cos = _toeplitz_centered(cos2, size)
    t_sin = _toeplitz_centered(sin2, size)
    e00 = np.array([[1.0, 0.0], [0.0, 0.0]])
    e11 = np.array([[0.0, 0.0], [0.0, 1.0]])
    e01 = np.array([[0.0, 1.0], [0.0, 0.0]])
    w = (
        np.kron(t_cos, e00 - e11)
        + np.kron(t_sin, e01)
        + np.kron(t_sin.conj().T, e01.T)
    )
    b = inv_sqrt @ w @ inv_sqrt
    b = 0.5 * (b + b.conj().T)
    return b, np.linalg.eigvalsh(b)


def degeneracy_eigenvalues(b_evals: np.ndarray) -> np.ndarray:
    """Eigenvalues mu < -1/3 of the compact operator, ascending.

    Each corresponds to an operator degeneracy at beta = 9 - mu^(-2).
    """
    return b_evals[b_evals < -1.0 / 3.0]
