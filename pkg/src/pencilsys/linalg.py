"""Dense matrix utilities with a float64 mode and an exact rational mode.

Float matrices are ordinary ``numpy`` arrays (float64 or complex128).
Exact matrices are ``numpy`` object arrays whose entries are
:class:`fractions.Fraction`; arithmetic on them (``@``, ``+``, slicing)
stays exact and comparisons are plain equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotNilpotent, SingularMatrix


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds for float mode; ignored by exact computations.

    ``rank_tol`` is relative to the largest entry of the matrix being
    reduced. ``cluster_tol`` controls when nearby eigenvalues are
    unconditionally merged.
    """

    rank_tol: float = 1e-10
    residual_tol: float = 1e-9
    cluster_tol: float = 1e-6

    def __post_init__(self):
        if self.rank_tol <= 0 or self.residual_tol <= 0 or self.cluster_tol <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        # shortest repr, so that 0.1 read from a file becomes 1/10
        return Fraction(repr(float(x)))
    try:  # sympy Rational and friends
        return Fraction(int(x.p), int(x.q))
    except AttributeError:
        raise TypeError(f"cannot convert {x!r} to an exact rational") from None


def as_exact(A) -> np.ndarray:
    """Convert ``A`` to an object array of :class:`Fraction` (2-D)."""
    arr = np.array(A, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = _to_fraction(v)
    return out


def is_exact(A) -> bool:
    return isinstance(A, np.ndarray) and A.dtype == object


def as_float(A) -> np.ndarray:
    """Convert to float64 (or complex128 when entries are complex)."""
    if is_exact(A):
        return np.array([[float(v) for v in row] for row in A], dtype=float).reshape(A.shape)
    arr = np.asarray(A)
    if np.iscomplexobj(arr):
        return arr.astype(complex)
    return arr.astype(float)


def eye_like(n: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n)


def zeros_like_mode(shape, exact: bool) -> np.ndarray:
    if exact:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def maxabs(A) -> float:
    """Max-abs entry norm; 0 for empty matrices."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if is_exact(A):
        return float(max(abs(v) for v in A.flat))
    return float(np.max(np.abs(A)))


def block_diag(*blocks) -> np.ndarray:
    """Direct sum of square or rectangular blocks, preserving exact mode."""
    blocks = [np.atleast_2d(np.asarray(b)) if np.asarray(b).size else np.zeros((0, 0)) for b in blocks]
    exact = any(is_exact(b) for b in blocks)
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    if exact:
        out = zeros_like_mode((rows, cols), True)
    else:
        dtype = np.result_type(*[b.dtype for b in blocks], float)
        out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def _require_square(A, name="matrix"):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")


def mat_exp(A, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``exp(A t)`` (float mode).

    Scaling and squaring with a Pade core, delegated to
    :func:`scipy.linalg.expm`.
    """
    A = np.asarray(A)
    if is_exact(A):
        A = as_float(A)
    _require_square(A, "mat_exp argument")
    if A.shape[0] == 0:
        return np.zeros((0, 0), dtype=A.dtype)
    return scipy.linalg.expm(A * t)


def phi_integral(A, t: float) -> np.ndarray:
    """``int_0^t exp(A l) dl`` from the augmented exponential of [[A, I], [0, 0]].

    Works for singular ``A`` (no inverse is formed).
    """
    A = as_float(A) if is_exact(A) else np.asarray(A)
    _require_square(A)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=A.dtype)
    aug = np.zeros((2 * n, 2 * n), dtype=np.result_type(A.dtype, float))
    aug[:n, :n] = A
    aug[:n, n:] = np.eye(n)
    return scipy.linalg.expm(aug * t)[:n, n:]


def _rref(A, threshold):
    """Row-reduce a copy of ``A``; returns (R, pivot_columns).

    ``threshold`` is None for exact arithmetic, otherwise the absolute size
    below which a candidate pivot counts as zero. Entries below the
    threshold in a pivotless column are zeroed.
    """
    R = A.copy()
    rows, cols = R.shape
    exact = threshold is None
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        col = R[r:, c]
        if exact:
            nz = [i for i, v in enumerate(col) if v != 0]
            if not nz:
                continue
            p = r + nz[0]
        else:
            mags = np.abs(col)
            p = r + int(np.argmax(mags))
            if mags[p - r] <= threshold:
                R[r:, c] = 0
                continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = R[r] / R[r, c]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                R[i] = R[i] - R[i, c] * R[r]
        pivots.append(c)
        r += 1
    return R, pivots


def rank_and_nullspace(A, tol: Tolerance = DEFAULT_TOL, reference: float | None = None):
    """Rank and a kernel basis (as columns) via Gauss-Jordan elimination.

    In float mode a pivot counts as zero when it is at most
    ``tol.rank_tol * max|A|``; pass ``reference`` to replace ``max|A|``
    with an external scale (useful for matrices that are tiny overall).
    Exact matrices use true zero tests.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionMismatch("rank_and_nullspace expects a 2-D matrix")
    rows, cols = A.shape
    exact = is_exact(A)
    if A.size == 0:
        return 0, eye_like(cols, exact)
    if exact:
        threshold = None
    else:
        A = A.astype(np.result_type(A.dtype, float))
        scale = maxabs(A) if reference is None else reference
        threshold = tol.rank_tol * scale
    R, pivots = _rref(A, threshold)
    rank = len(pivots)
    free = [c for c in range(cols) if c not in pivots]
    basis = zeros_like_mode((cols, len(free)), exact)
    if not exact:
        basis = basis.astype(R.dtype)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = -R[i, f]
    return rank, basis


def matrix_rank(A, tol: Tolerance = DEFAULT_TOL, reference: float | None = None) -> int:
    return rank_and_nullspace(A, tol, reference)[0]


def nilpotency_index(N, tol: Tolerance = DEFAULT_TOL) -> int:
    """Smallest ``k >= 1`` with ``N**k == 0``; 0 for an empty matrix."""
    N = np.asarray(N)
    _require_square(N, "nilpotency_index argument")
    n = N.shape[0]
    if n == 0:
        return 0
    exact = is_exact(N)
    scale = max(maxabs(N), 1.0)
    power = N.copy()
    for k in range(1, n + 1):
        if exact:
            if all(v == 0 for v in power.flat):
                return k
        elif maxabs(power) <= tol.rank_tol * scale**k:
            return k
        power = power @ N
    raise NotNilpotent(f"N**{n} != 0; matrix is not nilpotent")


def solve_linear(A, b, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A x = b`` for square nonsingular ``A``; ``b`` may have several columns."""
    A = np.asarray(A)
    b = np.asarray(b)
    _require_square(A, "coefficient matrix")
    vector = b.ndim == 1
    B = b.reshape(-1, 1) if vector else b
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"rhs has {B.shape[0]} rows, matrix has {A.shape[0]}")
    n = A.shape[0]
    if n == 0:
        return B.copy().reshape(b.shape)
    if is_exact(A) or is_exact(B):
        A, B = as_exact(A), as_exact(B)
        R, pivots = _rref(np.concatenate([A, B], axis=1), None)
        if pivots[:n] != list(range(n)):
            raise SingularMatrix("matrix is singular")
        x = R[:n, n:]
        return x.reshape(b.shape) if vector else x
    if matrix_rank(A, tol) < n:
        raise SingularMatrix("matrix is numerically singular (rank < cols)")
    x = np.linalg.solve(A, B)
    resid = maxabs(A @ x - B)
    if resid > tol.residual_tol * max(maxabs(B), 1.0):
        raise SingularMatrix(f"solve residual {resid:.3e} exceeds tolerance")
    return x.reshape(b.shape) if vector else x


def inverse(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    A = np.asarray(A)
    return solve_linear(A, eye_like(A.shape[0], is_exact(A)), tol)


def det(A):
    """Determinant; exact (Fraction) for exact matrices."""
    A = np.asarray(A)
    _require_square(A)
    n = A.shape[0]
    if n == 0:
        return Fraction(1) if is_exact(A) else 1.0
    if not is_exact(A):
        return np.linalg.det(A)
    M = A.copy()
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[[c, p]] = M[[p, c]]
            result = -result
        result *= M[c, c]
        for i in range(c + 1, n):
            if M[i, c] != 0:
                M[i] = M[i] - (M[i, c] / M[c, c]) * M[c]
    return result


def orth_columns(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space (SVD, float mode)."""
    A = as_float(A) if is_exact(A) else np.asarray(A)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=A.dtype)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    keep = s > tol.rank_tol * max(s[0], 1e-300)
    return U[:, keep]
