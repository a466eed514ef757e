"""Regular matrix pencils ``sF - G``: classification and Weierstrass form.

The float decomposition works through the shift-inverted operator
``T = (cF - G)^{-1} F``. An eigenvalue ``mu != 0`` of ``T`` is the finite
pencil eigenvalue ``lambda = c - 1/mu``; ``mu = 0`` collects the infinite
eigenvalues. Invariant subspaces of ``T`` come from an ordered complex Schur
form, and Jordan chains are built inside each (small) subspace.

Exact mode (``Pencil(..., exact=True)``) keeps everything in rationals and is
used for the structural invariants: the determinant polynomial and the
elementary divisors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg
import sympy

from . import linalg as la
from .errors import (
    DimensionMismatch,
    ExactModeRequired,
    IllConditioned,
    SingularPencil,
)
from .linalg import DEFAULT_TOL, Tolerance

# Integer shifts tried for cF - G, in order.
_SHIFTS = (0, 1, -1, 2, -2, 3, -3, 5, -5, 7, -7)
# Clusters farther apart than this (relative) are never merged.
_COARSE_MERGE = 1e-2


@dataclass(frozen=True)
class Pencil:
    """The pair ``(F, G)`` defining ``sF - G``."""

    F: np.ndarray
    G: np.ndarray
    exact: bool = False

    def __post_init__(self):
        conv = la.as_exact if self.exact else la.as_float
        F, G = conv(self.F), conv(self.G)
        if F.ndim != 2 or F.shape[0] != F.shape[1]:
            raise DimensionMismatch(f"F must be square, got {F.shape}")
        if G.shape != F.shape:
            raise DimensionMismatch(f"G has shape {G.shape}, F has {F.shape}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)

    @property
    def m(self) -> int:
        return self.F.shape[0]

    def to_exact(self) -> "Pencil":
        return self if self.exact else Pencil(self.F, self.G, exact=True)

    def to_float(self) -> "Pencil":
        return Pencil(la.as_float(self.F), la.as_float(self.G)) if self.exact else self


class PencilClass(enum.Enum):
    Regular = "regular"
    Singular = "singular"


@dataclass(frozen=True)
class DetPolynomial:
    """Coefficients of det(sF - G), lowest degree first."""

    coeffs: tuple
    zero_tol: float = 0.0

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        for j in range(len(self.coeffs) - 1, -1, -1):
            if abs(self.coeffs[j]) > self.zero_tol:
                return j
        return -1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, s):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def to_sympy(self, x=None) -> sympy.Poly:
        x = sympy.Symbol("s") if x is None else x
        coeffs = [sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
                  for c in self.coeffs]
        return sympy.Poly(list(reversed(coeffs)), x)


@dataclass(frozen=True)
class SpectralStructure:
    finite_eigenvalues: list  # [(value, algebraic multiplicity)]
    p: int
    q: int

    @property
    def m(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class ElementaryDivisorList:
    finite: list  # [(a_j, p_j)], one entry per Jordan block
    infinite: list  # [q_j], one entry per nilpotent block

    @property
    def p(self) -> int:
        return sum(size for _, size in self.finite)

    @property
    def q(self) -> int:
        return sum(self.infinite)

    @property
    def q_star(self) -> int:
        return max(self.infinite, default=0)


@dataclass(frozen=True)
class WeierstrassDecomposition:
    """``P F Q = I_p (+) Hq`` and ``P G Q = Jp (+) I_q``.

    ``finite_blocks`` lists ``(eigenvalue, size)`` per Jordan block of ``Jp``
    in order; ``infinite_blocks`` the block sizes of ``Hq``.
    """

    P: np.ndarray
    Q: np.ndarray
    Jp: np.ndarray
    Hq: np.ndarray
    finite_blocks: list = field(default_factory=list)
    infinite_blocks: list = field(default_factory=list)
    shift: float = 0.0

    @property
    def p(self) -> int:
        return self.Jp.shape[0]

    @property
    def q(self) -> int:
        return self.Hq.shape[0]

    @property
    def m(self) -> int:
        return self.p + self.q

    @property
    def q_star(self) -> int:
        return max(self.infinite_blocks, default=0)

    @property
    def Qp(self) -> np.ndarray:
        return self.Q[:, : self.p]

    @property
    def Qq(self) -> np.ndarray:
        return self.Q[:, self.p:]

    @cached_property
    def Q_inv(self) -> np.ndarray:
        return np.linalg.inv(self.Q)

    @property
    def is_real(self) -> bool:
        return not any(np.iscomplexobj(M) for M in (self.P, self.Q, self.Jp, self.Hq))

    def canonical_F(self) -> np.ndarray:
        return la.block_diag(np.eye(self.p), self.Hq) if self.m else np.zeros((0, 0))

    def canonical_G(self) -> np.ndarray:
        return la.block_diag(self.Jp, np.eye(self.q)) if self.m else np.zeros((0, 0))


# -- determinant polynomial and classification --------------------------------

def det_polynomial(pencil: Pencil, tol: Tolerance = DEFAULT_TOL) -> DetPolynomial:
    """Coefficients of det(sF - G).

    Exact mode interpolates exact determinants at s = 0..m. Float mode
    samples det on the m+1 roots of unity and inverts with an FFT.
    """
    m = pencil.m
    F, G = pencil.F, pencil.G
    if pencil.exact:
        nodes = list(range(m + 1))
        values = la.as_exact([[la.det(s * F - G)] for s in nodes])
        vander = la.as_exact([[Fraction(s) ** j for j in range(m + 1)] for s in nodes])
        coeffs = la.solve_linear(vander, values)
        return DetPolynomial(tuple(coeffs[:, 0]))
    N = m + 1
    nodes = np.exp(2j * np.pi * np.arange(N) / N)
    values = np.array([np.linalg.det(s * F - G) for s in nodes])
    coeffs = np.fft.fft(values) / N
    if not (np.iscomplexobj(F) or np.iscomplexobj(G)):
        coeffs = coeffs.real
    # Hadamard: |det(sF - G)| <= prod of row norms on the unit circle
    bound = float(np.prod(np.linalg.norm(F, axis=1) + np.linalg.norm(G, axis=1))) if m else 1.0
    return DetPolynomial(tuple(coeffs.tolist()), zero_tol=tol.rank_tol * max(bound, 1e-300))


def classify_pencil(pencil: Pencil, tol: Tolerance = DEFAULT_TOL) -> PencilClass:
    """Regular iff det(sF - G) is not identically zero.

    Float pencils are tested by rank instead: a singular pencil loses rank
    at every s, so one sample point with ``sigma_min / sigma_max`` above
    ``rank_tol`` proves regularity. At most m points can be eigenvalues,
    and m + 1 points are tried.
    """
    m = pencil.m
    if pencil.exact or m == 0:
        return PencilClass.Singular if det_polynomial(pencil, tol).is_zero else PencilClass.Regular
    F, G = pencil.F, pencil.G
    nF, nG = np.linalg.norm(F, 2), np.linalg.norm(G, 2)
    radius = nG / nF if nF > 0 and nG > 0 else 1.0
    for k in range(m + 1):
        s = radius * np.exp(1j * (2 * np.pi * k / (m + 1) + 0.4142))
        sv = np.linalg.svd(s * F - G, compute_uv=False)
        if sv[0] > 0 and sv[-1] > tol.rank_tol * sv[0]:
            return PencilClass.Regular
    return PencilClass.Singular


def _require_regular(pencil, tol):
    if classify_pencil(pencil, tol) is PencilClass.Singular:
        raise SingularPencil("det(sF - G) vanishes identically; the pencil is singular")


def _sort_key(value):
    z = complex(value)
    return (round(z.real, 9), round(z.imag, 9))


def spectral_structure(pencil: Pencil, tol: Tolerance = DEFAULT_TOL) -> SpectralStructure:
    """Finite eigenvalues with algebraic multiplicities, plus p and q.

    Exact pencils return sympy numbers (rational where possible).
    """
    _require_regular(pencil, tol)
    if pencil.exact:
        poly = det_polynomial(pencil).to_sympy()
        eigs = []
        for factor, mult in poly.factor_list()[1]:
            for root in _poly_roots(factor):
                eigs.append((root, mult))
        eigs.sort(key=lambda e: _sort_key(sympy.N(e[0], 30)))
        p = poly.degree()
        return SpectralStructure(eigs, p=p, q=pencil.m - p)
    engine = _ShiftInvert(pencil, tol)
    eigs = [(lam, len(members)) for lam, members in engine.finite_clusters]
    p = sum(k for _, k in eigs)
    return SpectralStructure(eigs, p=p, q=pencil.m - p)


def _poly_roots(factor: sympy.Poly) -> list:
    found = sympy.roots(factor, multiple=True)
    if len(found) == factor.degree():
        return found
    return factor.all_roots()


# -- float decomposition engine -----------------------------------------------

def _choose_shift(F, G, candidates=_SHIFTS):
    best = None
    for c in candidates:
        M = c * F - G
        try:
            cond = np.linalg.cond(M)
        except np.linalg.LinAlgError:
            continue
        if not np.isfinite(cond):
            continue
        if best is None or cond < best[1]:
            best = (c, cond)
        if cond < 1e3:
            break
    if best is None or best[1] > 1e14:
        raise SingularPencil("cF - G is singular for every trial shift c")
    return best[0]


def _realify(W, n):
    """Real orthonormal basis (n columns) of a subspace given by complex W."""
    U, s, _ = np.linalg.svd(np.hstack([W.real, W.imag]), full_matrices=False)
    return U[:, :n]


class _ShiftInvert:
    """Eigen-clustering of T = (cF - G)^{-1} F."""

    def __init__(self, pencil: Pencil, tol: Tolerance):
        self.tol = tol
        self.F, self.G = pencil.F, pencil.G
        self.real = not (np.iscomplexobj(self.F) or np.iscomplexobj(self.G))
        self.c = _choose_shift(self.F, self.G)
        self.T = np.linalg.solve(self.c * self.F - self.G, self.F)
        mus = np.linalg.eigvals(self.T)
        self.scale = max(1.0, float(np.max(np.abs(mus))) if mus.size else 1.0)
        self.norm_T = max(1.0, np.linalg.norm(self.T, 2)) if self.T.size else 1.0
        self.clusters = self._cluster(list(mus))

    # clustering
    def _cluster(self, mus):
        """Group eigenvalues of T into clusters of one (possibly defective) eigenvalue.

        Single-linkage components at a coarse radius are accepted when they
        are tight or when T restricted to their invariant subspace is
        mu*I + nilpotent; otherwise the longest linkage edge is cut and the
        halves are examined recursively.
        """
        self.mus = np.asarray(mus)
        out = []
        for comp in _linkage_components(self.mus, range(len(mus)), _COARSE_MERGE * self.scale):
            self._accept_or_split(comp, out)
        out.sort(key=lambda e: _sort_key(e[0]))
        return out

    def _accept_or_split(self, comp, out):
        pts = self.mus[comp]
        center = complex(np.mean(pts))
        diameter = max(abs(a - b) for a in pts for b in pts)
        if len(comp) == 1 or diameter <= self.tol.cluster_tol * self.scale or self._single_eigenvalue(comp):
            out.append((center, list(pts)))
            return
        longest = _longest_edge(self.mus, comp)
        for sub in _linkage_components(self.mus, comp, longest * (1 - 1e-12)):
            self._accept_or_split(sub, out)

    def _single_eigenvalue(self, comp):
        """Does T restricted to the cluster's subspace equal mu*I + nilpotent?"""
        n = len(comp)
        center = np.mean(self.mus[comp])
        W = self._subspace(comp)
        if W is None:
            return False
        Tw = W.conj().T @ self.T @ W
        N = Tw - center * np.eye(n)
        resid = la.maxabs(np.linalg.matrix_power(N, n))
        return resid <= self.tol.rank_tol * self.norm_T**n

    def _subspace(self, comp):
        """Orthonormal basis of the T-invariant subspace for a set of eigenvalues."""
        members = set(comp)

        def select(x):
            return int(np.argmin(np.abs(self.mus - x))) in members

        _, Z, sdim = scipy.linalg.schur(self.T.astype(complex), output="complex", sort=select)
        if sdim != len(comp):
            return None
        return Z[:, :sdim]

    def cluster_basis(self, idx):
        center, members = self.clusters[idx]
        n = len(members)
        comp = [int(np.argmin(np.abs(self.mus - mu))) for mu in members]
        W = self._subspace(comp)
        if W is None:
            raise IllConditioned("could not separate the invariant subspace of an eigenvalue cluster")
        if self.real and abs(center.imag) <= self.tol.cluster_tol * self.scale:
            W = _realify(W, n)
        return W

    def is_infinite(self, center):
        return abs(center) <= self.tol.cluster_tol * self.scale

    @property
    def finite_clusters(self):
        out = []
        for center, members in self.clusters:
            if self.is_infinite(center):
                continue
            lam = self.c - 1.0 / center
            if self.real and abs(lam.imag) <= self.tol.cluster_tol * max(1.0, abs(lam)):
                lam = lam.real
            out.append((lam, members))
        out.sort(key=lambda e: _sort_key(e[0]))
        return out


def _linkage_components(points, idx, radius):
    """Connected components of idx under |a - b| <= radius."""
    remaining = list(idx)
    comps = []
    while remaining:
        stack = [remaining.pop()]
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            near = [j for j in remaining if abs(points[i] - points[j]) <= radius]
            for j in near:
                remaining.remove(j)
            stack.extend(near)
        comps.append(sorted(comp))
    return comps


def _longest_edge(points, idx):
    """Longest edge of the minimum spanning tree over idx (Prim)."""
    inside = {idx[0]}
    longest = 0.0
    while len(inside) < len(idx):
        d, j = min((abs(points[a] - points[b]), b) for a in inside for b in idx if b not in inside)
        longest = max(longest, d)
        inside.add(j)
    return longest


def _jordan_chains(N, tol: Tolerance, noise: float = 0.0):
    """Basis S with N S = S H, H nilpotent Jordan (superdiagonal ones).

    ``noise`` estimates the absolute error already in N; singular values of
    N^j below roughly ``j * noise * |N|^(j-1)`` count as zero. Returns
    (S, block_sizes) with blocks in decreasing size.
    """
    k = N.shape[0]
    if k == 0:
        return np.zeros((0, 0), dtype=N.dtype), []
    s = max(1.0, la.maxabs(N))
    # kernels of N^j as orthonormal bases
    kernels = [np.zeros((k, 0), dtype=N.dtype)]
    power = np.eye(k, dtype=N.dtype)
    for j in range(1, k + 1):
        power = power @ N
        U, sv, Vh = np.linalg.svd(power)
        floor = max(tol.rank_tol * s**j, j * noise * s ** (j - 1)) * 10
        rank = int(np.sum(sv > floor))
        kernels.append(Vh[rank:].conj().T)
        if kernels[-1].shape[1] == k:
            break
    else:
        raise IllConditioned("restricted operator is not nilpotent to tolerance")
    index = len(kernels) - 1
    dims = [K.shape[1] for K in kernels] + [k]
    at_least = [dims[j] - dims[j - 1] for j in range(1, index + 1)] + [0]  # blocks of size >= j
    heads = []  # (vector, length)
    for j in range(index, 0, -1):
        need = at_least[j - 1] - at_least[j]
        if need < 0:
            raise IllConditioned("inconsistent kernel dimensions in Jordan chain construction")
        if need == 0:
            continue
        existing = [np.linalg.matrix_power(N, L - j) @ v for v, L in heads]
        span = np.hstack([kernels[j - 1]] + [e.reshape(-1, 1) for e in existing])
        Kj = kernels[j]
        if span.shape[1]:
            Qs = la.orth_columns(span, tol)
            resid = Kj - Qs @ (Qs.conj().T @ Kj)
        else:
            resid = Kj
        U, sv, _ = np.linalg.svd(resid, full_matrices=False)
        if sv.size < need or sv[need - 1] <= 1e-8:
            raise IllConditioned("could not complete Jordan chains")
        for t in range(need):
            heads.append((U[:, t], j))
    columns = []
    sizes = []
    for v, L in heads:
        chain = [np.linalg.matrix_power(N, L - 1 - i) @ v for i in range(L)]
        norm = max(np.linalg.norm(c) for c in chain)
        columns.extend(c / norm for c in chain)
        sizes.append(L)
    return np.column_stack(columns), sizes


def _jordan_block(value, size, dtype):
    J = np.eye(size, dtype=dtype) * value
    J += np.eye(size, k=1, dtype=dtype)
    return J


def _restricted(A, B):
    """Least-squares X with A X = B, and a first-order estimate of its error."""
    X = np.linalg.lstsq(A, B, rcond=None)[0]
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] == 0:
        raise IllConditioned("restricted pencil block is singular")
    rel = np.linalg.norm(A @ X - B, 2) / max(np.linalg.norm(B, 2), np.finfo(float).tiny)
    return X, rel * (sv[0] / sv[-1]) * np.linalg.norm(X, 2)


def weierstrass_decompose(pencil: Pencil, tol: Tolerance = DEFAULT_TOL) -> WeierstrassDecomposition:
    """Compute P, Q, Jp, Hq for a regular pencil (float arithmetic)."""
    _require_regular(pencil, tol)
    pencil = pencil.to_float()
    F, G = pencil.F, pencil.G
    m = pencil.m
    engine = _ShiftInvert(pencil, tol)

    finite_parts, infinite_parts = [], []
    for idx, (center, members) in enumerate(engine.clusters):
        W = engine.cluster_basis(idx)
        n = len(members)
        FW, GW = F @ W, G @ W
        if engine.is_infinite(center):
            D, noise = _restricted(GW, FW)
            S, sizes = _jordan_chains(D, tol, noise)
            infinite_parts.append((W @ S, sizes))
        else:
            C, noise = _restricted(FW, GW)
            lam = np.trace(C) / n
            if not np.iscomplexobj(W):
                lam = lam.real
            S, sizes = _jordan_chains(C - lam * np.eye(n), tol, noise)
            finite_parts.append((lam, W @ S, sizes))

    finite_parts.sort(key=lambda e: _sort_key(e[0]))
    dtype = np.result_type(float, *[part[1].dtype for part in finite_parts],
                           *[part[0].dtype for part in infinite_parts])

    Qp_cols, J_blocks, finite_blocks = [], [], []
    for lam, V, sizes in finite_parts:
        Qp_cols.append(V)
        for size in sizes:
            J_blocks.append(_jordan_block(lam, size, dtype))
            finite_blocks.append((lam, size))
    Qq_cols, H_blocks, infinite_blocks = [], [], []
    for V, sizes in sorted(infinite_parts, key=lambda e: -max(e[1])):
        Qq_cols.append(V)
        for size in sizes:
            H_blocks.append(_jordan_block(0.0, size, dtype))
            infinite_blocks.append(size)

    Qp = np.hstack(Qp_cols).astype(dtype) if Qp_cols else np.zeros((m, 0), dtype=dtype)
    Qq = np.hstack(Qq_cols).astype(dtype) if Qq_cols else np.zeros((m, 0), dtype=dtype)
    Jp = la.block_diag(*J_blocks).astype(dtype) if J_blocks else np.zeros((0, 0), dtype=dtype)
    Hq = la.block_diag(*H_blocks).astype(dtype) if H_blocks else np.zeros((0, 0), dtype=dtype)
    if Qp.shape[1] + Qq.shape[1] != m:
        raise IllConditioned("eigenvector count does not match the pencil dimension")

    Q = np.hstack([Qp, Qq])
    X = np.hstack([F @ Qp, G @ Qq])
    try:
        P = np.linalg.inv(X)
    except np.linalg.LinAlgError:
        raise IllConditioned("left transformation is singular") from None

    dec = WeierstrassDecomposition(P, Q, Jp, Hq, finite_blocks, infinite_blocks, float(engine.c))
    res_F, res_G = verify_decomposition(dec, pencil)
    limit = tol.residual_tol * max(1.0, la.maxabs(F), la.maxabs(G))
    if max(res_F, res_G) > limit:
        raise IllConditioned(f"decomposition residuals ({res_F:.2e}, {res_G:.2e}) exceed {limit:.1e}")
    return dec


def verify_decomposition(dec: WeierstrassDecomposition, pencil: Pencil) -> tuple[float, float]:
    """Max-abs residuals of P F Q - (I (+) Hq) and P G Q - (Jp (+) I)."""
    m = pencil.m
    if dec.P.shape != (m, m) or dec.Q.shape != (m, m) or dec.p + dec.q != m:
        raise DimensionMismatch("decomposition does not match the pencil dimension")
    F, G = la.as_float(pencil.F), la.as_float(pencil.G)
    res_F = la.maxabs(dec.P @ F @ dec.Q - dec.canonical_F())
    res_G = la.maxabs(dec.P @ G @ dec.Q - dec.canonical_G())
    return res_F, res_G


# -- exact elementary divisors --------------------------------------------------

def _poly_at_matrix(coeffs, A):
    """Horner evaluation of a polynomial (highest degree first) at matrix A."""
    n = A.shape[0]
    I = la.eye_like(n, True)
    acc = la.zeros_like_mode((n, n), True)
    for c in coeffs:
        acc = acc @ A + I * Fraction(int(c.p), int(c.q))
    return acc


def elementary_divisors(pencil: Pencil) -> ElementaryDivisorList:
    """Finite and infinite elementary divisors, computed exactly.

    Block sizes come from exact ranks of f(T)^k for each irreducible factor
    f of the characteristic polynomial of the shift-inverted operator T.
    """
    if not pencil.exact:
        raise ExactModeRequired("elementary_divisors needs an exact pencil (Pencil(..., exact=True))")
    _require_regular(pencil, DEFAULT_TOL)
    F, G = pencil.F, pencil.G
    m = pencil.m
    c = next(s for s in sorted(range(-m - 1, m + 2), key=lambda v: (abs(v), -v))
             if la.det(s * F - G) != 0)
    T = la.solve_linear(c * F - G, F)
    x, s = sympy.symbols("x s")
    charpoly = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in T]).charpoly(x)

    finite, infinite = [], []
    for factor, mult in charpoly.factor_list()[1]:
        factor = sympy.Poly(factor, x)
        deg = factor.degree()
        fT = _poly_at_matrix(factor.all_coeffs(), T)
        nullities = [0]
        power = la.eye_like(m, True)
        for _ in range(mult):
            power = power @ fT
            nullities.append(m - la.matrix_rank(power))
        at_least = [(nullities[k] - nullities[k - 1]) // deg for k in range(1, len(nullities))] + [0]
        sizes = []
        for k in range(len(at_least) - 1, 0, -1):
            sizes.extend([k] * (at_least[k - 1] - at_least[k]))
        sizes.sort(reverse=True)
        if factor.as_expr() == x:
            infinite.extend(sizes)
            continue
        # lambda = c - 1/mu; clear denominators of f(1/(c - s))
        g = sympy.Poly(sympy.numer(sympy.together(factor.as_expr().subs(x, 1 / (c - s)))), s)
        for root in _poly_roots(g):
            for size in sizes:
                finite.append((sympy.nsimplify(root) if root.is_rational else root, size))
    finite.sort(key=lambda e: (_sort_key(sympy.N(e[0], 30)), -e[1]))
    infinite.sort(reverse=True)
    return ElementaryDivisorList(finite, infinite)
