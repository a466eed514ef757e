"""Riemann-Liouville nabla fractional differences and singular fractional systems.

With ``c_d = (d+1)^{rising(-n-1)} / Gamma(-n)`` the operator of order ``n``
based at 0 is ``(nabla^n Y)_k = sum_{j=0}^{k} c_{k-j} Y_j``. The weights obey
``c_0 = 1`` and ``c_{d+1} = c_d (d - n) / (d + 1)``, which is how they are
computed; :func:`nabla_direct` evaluates the defining Gamma-function sum
instead and serves as the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import kernels
from . import linalg as la
from .discretize import DiscretizedSystem, SampleSequence, input_term
from .errors import GammaPole, InsufficientHistory, StepMatrixSingular
from .linalg import DEFAULT_TOL, Tolerance
from .pencil import Pencil, _require_regular


def check_order(n: float) -> float:
    n = float(n)
    if not (0 < n < 1 or 1 < n < 2):
        raise ValueError(f"fractional order must lie in (0, 1) or (1, 2), got {n}")
    return n


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _gamma_sign(x: float) -> int:
    if x > 0:
        return 1
    # Gamma alternates sign between consecutive negative integers
    return -1 if math.floor(-x) % 2 == 0 else 1


def rising_factorial(k: float, a: float) -> float:
    """``Gamma(k + a) / Gamma(k)``.

    Large arguments go through log-Gamma with the sign tracked separately.
    When both arguments sit on poles the ratio is the limit
    ``(-1)^(M-N) N! / M!`` for ``k = -N``, ``k + a = -M``; a pole of
    ``Gamma(k)`` alone gives 0.
    """
    k, a = float(k), float(a)
    top, bottom = k + a, k
    if a == 0:
        return 1.0
    top_pole, bottom_pole = _is_pole(top), _is_pole(bottom)
    if top_pole and bottom_pole:
        N, M = int(-bottom), int(-top)
        return (-1.0) ** (M - N) * math.exp(math.lgamma(N + 1) - math.lgamma(M + 1))
    if bottom_pole:
        return 0.0
    if top_pole:
        raise GammaPole(f"Gamma({top}) is infinite")
    if max(abs(top), abs(bottom)) < 170:
        return math.gamma(top) / math.gamma(bottom)
    sign = _gamma_sign(top) * _gamma_sign(bottom)
    return sign * math.exp(math.lgamma(top) - math.lgamma(bottom))


@dataclass(frozen=True)
class NablaCoefficients:
    n: float
    c: np.ndarray

    def __len__(self):
        return self.c.size


def nabla_coefficients(n: float, K: int) -> NablaCoefficients:
    """Weights c_0..c_K by the product recurrence."""
    n = check_order(n)
    if K < 0:
        raise ValueError("K must be nonnegative")
    return NablaCoefficients(n, kernels.nabla_coefficients(n, int(K)))


def direct_coefficient(n: float, d: int) -> float:
    """``(d+1)^{rising(-n-1)} / Gamma(-n)`` straight from the definition."""
    return rising_factorial(d + 1, -n - 1) / math.gamma(-n)


def _as_sequence(seq) -> SampleSequence:
    return seq if isinstance(seq, SampleSequence) else SampleSequence(0, seq)


def nabla_apply(seq, n: float, k: int, alpha: int = 0) -> np.ndarray:
    """``(nabla_alpha^n Y)_k = sum_{j=alpha}^{k} c_{k-j} Y_j``."""
    seq = _as_sequence(seq)
    n = check_order(n)
    if k < alpha or not seq.covers(alpha, k):
        raise InsufficientHistory(f"nabla at {k} needs samples {alpha}..{k}")
    c = kernels.nabla_coefficients(n, k - alpha)
    block = seq.vectors[alpha - seq.start_index: k - seq.start_index + 1]
    return kernels.history_sum(c, block, k - alpha, 0)


def nabla_direct(seq, n: float, k: int, alpha: int = 0) -> np.ndarray:
    """Same operator, summed term by term from rising factorials."""
    seq = _as_sequence(seq)
    n = check_order(n)
    if k < alpha or not seq.covers(alpha, k):
        raise InsufficientHistory(f"nabla at {k} needs samples {alpha}..{k}")
    g = math.gamma(-n)
    acc = np.zeros(seq.dim)
    for j in range(alpha, k + 1):
        acc += rising_factorial(k - j + 1, -n - 1) / g * seq[j]
    return acc


@dataclass(frozen=True)
class FractionalSystem:
    """``F nabla_0^n Y_k = G Y_k + V_k``, k >= 1."""

    F: np.ndarray
    G: np.ndarray
    n: float
    tol: Tolerance = DEFAULT_TOL
    step_invertible: bool = field(init=False)

    def __post_init__(self):
        pencil = Pencil(self.F, self.G)
        _require_regular(pencil, self.tol)
        object.__setattr__(self, "F", pencil.F)
        object.__setattr__(self, "G", pencil.G)
        object.__setattr__(self, "n", check_order(self.n))
        S = pencil.F - pencil.G
        ok = la.matrix_rank(S, self.tol) == pencil.m if pencil.m else True
        object.__setattr__(self, "step_invertible", ok)

    @property
    def m(self) -> int:
        return self.F.shape[0]


def solve_fractional_system(fsys: FractionalSystem, inputs, Y0, K: int) -> SampleSequence:
    """March ``(F - G) Y_k = V_k - F sum_{j<k} c_{k-j} Y_j`` for k = 1..K."""
    inputs = _as_sequence(inputs)
    Y0 = np.asarray(Y0, dtype=float).reshape(-1)
    m = fsys.m
    if K > 0 and not inputs.covers(1, K):
        raise InsufficientHistory(f"inputs must cover 1..{K}")
    if not fsys.step_invertible:
        raise StepMatrixSingular("F - G is singular; the implicit step cannot be solved")
    S = fsys.F - fsys.G
    SinvF = la.solve_linear(S, fsys.F, fsys.tol)
    W = np.zeros((K + 1, m))
    if K > 0:
        W[1:] = la.solve_linear(S, inputs.vectors[1 - inputs.start_index: K + 1 - inputs.start_index].T,
                                fsys.tol).T
    c = kernels.nabla_coefficients(fsys.n, K)
    Y = kernels.fractional_march(c, SinvF, W, Y0)
    return SampleSequence(0, Y)


def fractional_residual(fsys: FractionalSystem, Y, inputs, K: int) -> float:
    """Max over k = 1..K of |F nabla^n Y_k - G Y_k - V_k|_inf, via :func:`nabla_direct`."""
    Y, inputs = _as_sequence(Y), _as_sequence(inputs)
    worst = 0.0
    for k in range(1, K + 1):
        r = fsys.F @ nabla_direct(Y, fsys.n, k) - fsys.G @ Y[k] - inputs[k]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


# -- discrete recursion and its telescoped form ---------------------------------

def direct_iteration(A, U, Y0, K: int) -> SampleSequence:
    """``Y_{k+1} = A Y_k + U_k``."""
    U = _as_sequence(U)
    A = np.asarray(A, dtype=float)
    Y = [np.asarray(Y0, dtype=float).reshape(-1)]
    for k in range(K):
        Y.append(A @ Y[-1] + U[k])
    return SampleSequence(0, np.array(Y))


def telescope_recursion(A, U, Y0, K: int) -> SampleSequence:
    """Summed form ``Y_k = sum_{j=1}^{k-1} (A - I) Y_j + A Y_0 + sum_{j<k} U_j``."""
    U = _as_sequence(U)
    if K > 0 and not U.covers(0, K - 1):
        raise InsufficientHistory(f"U must cover 0..{K - 1}")
    A = np.asarray(A, dtype=float)
    Ublock = U.vectors[-U.start_index: K - U.start_index] if K > 0 else np.zeros((0, A.shape[0]))
    return SampleSequence(0, kernels.telescope(A, Ublock, np.asarray(Y0, dtype=float), int(K)))


@dataclass(frozen=True)
class CorrespondenceReport:
    """How far ``A - I`` is from the lag weights ``c_{d-1} F``.

    ``deltas[d-1]`` is ``|(A - I) - c_{d-1} F|_inf`` for lag d at order ``n``.
    """

    n: float
    deltas: list
    best_n: float
    best_objective: float
    verdict: str  # "exact" | "approximate" | "none"
    aggregate_inputs: np.ndarray | None = None

    @property
    def corresponds(self) -> bool:
        return self.verdict != "none"


def _lag_deltas(D, F, n, K):
    c = kernels.nabla_coefficients(n, max(K - 1, 0))
    return [la.maxabs(D - c[d - 1] * F) for d in range(1, K + 1)]


def correspondence_diagnostic(dsys: DiscretizedSystem, F, n: float, K: int, inputs=None,
                              exact_tol: float = 1e-9, approx_tol: float = 1e-2) -> CorrespondenceReport:
    """Test the lag-by-lag identification of ``A - I`` with ``c_{d-1} F``, d = 1..K.

    ``A`` does not depend on the lag, so the identification can hold at one
    lag at most unless ``F`` vanishes; the report measures the mismatch
    instead of assuming it away. When ``inputs`` are given, the telescoped
    aggregates ``U_0 + ... + U_{k-1}`` are included.
    """
    n = check_order(n)
    F = la.as_float(F)
    D = dsys.A - np.eye(dsys.m)
    deltas = _lag_deltas(D, F, n, K)

    def objective(x):
        return float(sum(_lag_deltas(D, F, x, K)))

    best_n, best_obj = n, objective(n) if K else 0.0
    if K:
        for lo, hi in ((1e-6, 1 - 1e-6), (1 + 1e-6, 2 - 1e-6)):
            grid = np.linspace(lo, hi, 201)
            vals = [objective(x) for x in grid]
            i = int(np.argmin(vals))
            a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
            res = scipy.optimize.minimize_scalar(objective, bounds=(a, b), method="bounded",
                                                 options={"xatol": 1e-12})
            cand = (float(res.x), float(res.fun)) if res.fun <= vals[i] else (float(grid[i]), vals[i])
            if cand[1] < best_obj:
                best_n, best_obj = cand

    worst = max(deltas, default=0.0)
    scale = max(1.0, la.maxabs(F), la.maxabs(D))
    if worst <= exact_tol * scale:
        verdict = "exact"
    elif worst <= approx_tol:
        verdict = "approximate"
    else:
        verdict = "none"

    aggregate = None
    if inputs is not None:
        inputs = _as_sequence(inputs).extended_back(-(dsys.q_star - 1) if dsys.q_star > 1 else 0)
        U = np.array([input_term(dsys, inputs, k) for k in range(K)]).reshape(K, dsys.m)
        aggregate = np.vstack([np.zeros((1, dsys.m)), np.cumsum(U, axis=0)])
    return CorrespondenceReport(n, deltas, best_n, best_obj, verdict, aggregate)
