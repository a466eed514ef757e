"""Zero-order-hold discretization ``Y_{k+1} = A Y_k + U_k``.

``A = F(T, 0)`` and the slow input map ``Qp (int_0^T exp(Jp l) dl) Bp`` are
exact for inputs held constant over each sampling interval. The fast part
needs input derivatives, which are replaced by backward differences over the
sampled inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .continuous import DescriptorSystem, _real_if_close, fundamental_matrix, solve_continuous
from .errors import InsufficientHistory
from .signals import InputSignal


@dataclass
class SampleSequence:
    """Vectors indexed by consecutive integers starting at ``start_index``."""

    start_index: int
    vectors: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        self.vectors = v

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def stop_index(self) -> int:
        """One past the last available index."""
        return self.start_index + len(self)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def covers(self, lo: int, hi: int) -> bool:
        return self.start_index <= lo and hi < self.stop_index

    def __getitem__(self, k: int) -> np.ndarray:
        if not self.start_index <= k < self.stop_index:
            raise InsufficientHistory(
                f"sample {k} requested, available {self.start_index}..{self.stop_index - 1}")
        return self.vectors[k - self.start_index]

    def extended_back(self, lo: int) -> "SampleSequence":
        """Copy reaching back to index ``lo`` by repeating the first sample."""
        if lo >= self.start_index:
            return self
        pad = np.repeat(self.vectors[:1], self.start_index - lo, axis=0)
        return SampleSequence(lo, np.vstack([pad, self.vectors]), dict(self.metadata))


@dataclass(frozen=True)
class DiscretizedSystem:
    T: float
    A: np.ndarray
    Phi_int: np.ndarray  # m x r
    fast_coeffs: list  # Qq Hq^i Bq / T^i, i < q*
    fast_weights: list  # weights on V_{k-i}, ..., V_{k+1} for each i
    q_star: int
    stencil: str = "consistent"

    @property
    def memory_depth(self) -> int:
        return self.q_star + 1

    @property
    def m(self) -> int:
        return self.A.shape[0]


def backward_diff(samples: SampleSequence, k: int, i: int, T: float) -> np.ndarray:
    """i-th backward difference at k over T^i: an estimate of V^(i)(kT).

    Weights are ``(-1)^(i-j) C(i, j)`` on ``V_{k-i+j}``, so the newest
    sample always carries ``+1`` (``(V_k - V_{k-1}) / T`` for i = 1).
    """
    if i < 0:
        raise ValueError("order must be nonnegative")
    if not samples.covers(k - i, k):
        raise InsufficientHistory(f"backward difference of order {i} at {k} needs samples {k - i}..{k}")
    acc = np.zeros(samples.dim)
    for j in range(i + 1):
        acc += (-1) ** (i - j) * math.comb(i, j) * samples[k - i + j]
    return acc / T**i


def fast_correction_coeffs(i: int) -> tuple:
    """Weights ``(-1)^(j+1) C(i+1, j)`` on ``V_{k-i+j}``, j = 0..i+1 ("alternating" stencil)."""
    if i < 0:
        raise ValueError("order must be nonnegative")
    return tuple((-1) ** (j + 1) * math.comb(i + 1, j) for j in range(i + 2))


def consistent_correction_coeffs(i: int) -> tuple:
    """Weights ``(-1)^(i+j) C(i+1, j)`` on ``V_{k-i+j}``.

    This is ``-(backward difference of order i+1 at k+1)``, which is what
    ``V^(i)_k - V^(i)_{k+1}`` becomes once each derivative is replaced by a
    backward difference. It agrees with the alternating form for odd ``i`` and
    has the opposite sign for even ``i``.
    """
    sign = (-1) ** (i + 1)
    return tuple(sign * w for w in fast_correction_coeffs(i))


def discretize(sys: DescriptorSystem, T: float, stencil: str = "consistent") -> DiscretizedSystem:
    """Assemble A, the slow input map and the fast correction terms for period T.

    ``stencil="alternating"`` uses :func:`fast_correction_coeffs` verbatim; the
    default uses :func:`consistent_correction_coeffs`.
    """
    if T <= 0:
        raise ValueError("sampling period must be positive")
    if stencil not in ("consistent", "alternating"):
        raise ValueError(f"unknown stencil {stencil!r}")
    dec = sys.dec
    A = fundamental_matrix(dec, T, 0.0)
    phi = la.phi_integral(dec.Jp, T) if dec.p else np.zeros((0, 0))
    Phi_int = _real_if_close(dec.Qp @ phi @ sys.Bp, "slow input map")
    coeffs, weights = [], []
    Hi = np.eye(dec.q, dtype=dec.Hq.dtype)
    pick = consistent_correction_coeffs if stencil == "consistent" else fast_correction_coeffs
    for i in range(dec.q_star):
        coeffs.append(_real_if_close(dec.Qq @ Hi @ sys.Bq / T**i, "fast coefficient"))
        weights.append(pick(i))
        Hi = Hi @ dec.Hq
    return DiscretizedSystem(float(T), A, Phi_int, coeffs, weights, dec.q_star, stencil)


def input_term(dsys: DiscretizedSystem, inputs: SampleSequence, k: int) -> np.ndarray:
    """``U_k``; needs samples k - q* + 1 .. k + 1 (just k when q* = 0)."""
    U = dsys.Phi_int @ inputs[k]
    for i, (C, w) in enumerate(zip(dsys.fast_coeffs, dsys.fast_weights)):
        combo = sum(wj * inputs[k - i + j] for j, wj in enumerate(w))
        U = U + C @ combo
    return U


def discrete_simulate(dsys: DiscretizedSystem, Y0, inputs: SampleSequence, steps: int | None = None,
                      extend_history: bool = True) -> SampleSequence:
    """Iterate ``Y_{k+1} = A Y_k + U_k`` for k = 0..steps-1.

    Samples before the first supplied one are filled by holding that sample
    when ``extend_history`` is set; the result's metadata records it.
    """
    lo = -(dsys.q_star - 1) if dsys.q_star > 1 else 0
    need_ahead = 1 if dsys.q_star > 0 else 0
    if steps is None:
        steps = max(inputs.stop_index - need_ahead, 0)
    padded = False
    if extend_history and inputs.start_index > lo:
        inputs = inputs.extended_back(lo)
        padded = True
    if steps > 0 and not inputs.covers(lo, steps - 1 + need_ahead):
        raise InsufficientHistory(
            f"{steps} steps need input samples {lo}..{steps - 1 + need_ahead}, "
            f"have {inputs.start_index}..{inputs.stop_index - 1}")
    Y = np.asarray(Y0, dtype=float).reshape(-1)
    out = [Y]
    for k in range(steps):
        Y = dsys.A @ Y + input_term(dsys, inputs, k)
        out.append(Y)
    return SampleSequence(0, np.array(out).reshape(steps + 1, dsys.m), {"history_extended": padded})


def _max_error(sys, dsys, Y0, V, K):
    lo = -(dsys.q_star - 1) if dsys.q_star > 1 else 0
    # pre-history comes from the signal itself
    inputs = SampleSequence(lo, V.samples(dsys.T, lo, K + 2))
    disc = discrete_simulate(dsys, Y0, inputs, K)
    times = dsys.T * np.arange(K + 1)
    cont = solve_continuous(sys, Y0, V, times, t0=0.0)
    return float(np.max(np.abs(disc.vectors - cont.states))) if K else 0.0


def compare_with_continuous(sys: DescriptorSystem, dsys: DiscretizedSystem, Y0, V: InputSignal, K: int):
    """(max_k |Y_k - Y(kT)|_inf, observed order from halving T).

    The order is ``nan`` when both errors sit at roundoff level.
    """
    err = _max_error(sys, dsys, Y0, V, K)
    half = discretize(sys, dsys.T / 2, dsys.stencil)
    err_half = _max_error(sys, half, Y0, V, 2 * K)
    if err <= 1e-12 and err_half <= 1e-12:
        order = float("nan")
    else:
        order = math.log2(err / err_half) if err_half > 0 else float("inf")
    return err, order
