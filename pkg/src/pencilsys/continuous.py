"""Closed-form solutions of F Y'(t) = G Y(t) + B V(t) for regular pencils.

In Weierstrass coordinates ``Y = Q Z`` the system splits into a slow part
``Z_p' = Jp Z_p + Bp V`` and a fast part ``Hq Z_q' = Z_q + Bq V`` whose only
smooth solution is ``Z_q = -sum_i Hq^i Bq V^(i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import (
    DimensionMismatch,
    GridTooCoarse,
    IllConditioned,
    InconsistentInitialCondition,
)
from .linalg import DEFAULT_TOL, Tolerance
from .pencil import Pencil, WeierstrassDecomposition, verify_decomposition, weierstrass_decompose
from .signals import InputSignal


@dataclass(frozen=True)
class DescriptorSystem:
    pencil: Pencil
    B: np.ndarray
    dec: WeierstrassDecomposition
    tol: Tolerance = DEFAULT_TOL

    @property
    def m(self) -> int:
        return self.pencil.m

    @property
    def r(self) -> int:
        return self.B.shape[1]

    @property
    def F(self):
        return self.pencil.F

    @property
    def G(self):
        return self.pencil.G

    @property
    def PB(self) -> np.ndarray:
        return self.dec.P @ self.B

    @property
    def Bp(self) -> np.ndarray:
        return self.PB[: self.dec.p]

    @property
    def Bq(self) -> np.ndarray:
        return self.PB[self.dec.p:]


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if len(self.states) != self.times.size:
            raise DimensionMismatch("one state per time is required")


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    K_t0: np.ndarray
    projected_Y0: np.ndarray
    defect: float


def build_system(F, G, B, tol: Tolerance = DEFAULT_TOL) -> DescriptorSystem:
    pencil = Pencil(F, G)
    B = la.as_float(B)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.shape[0] != pencil.m:
        raise DimensionMismatch(f"B has {B.shape[0]} rows, pencil dimension is {pencil.m}")
    dec = weierstrass_decompose(pencil, tol)
    return DescriptorSystem(pencil, B, dec, tol)


def _real_if_close(x, what="result"):
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        return x
    imag = la.maxabs(x.imag)
    if imag <= 1e-8 * max(1.0, la.maxabs(x.real)):
        return x.real.copy()
    raise IllConditioned(f"{what} has a non-negligible imaginary part ({imag:.2e})")


def fast_part(sys: DescriptorSystem, V: InputSignal, t: float) -> np.ndarray:
    """``-sum_{i < q*} Hq^i Bq V^(i)(t)``."""
    dec = sys.dec
    out = np.zeros(dec.q, dtype=np.result_type(dec.Hq, sys.Bq, float))
    Hi = np.eye(dec.q, dtype=out.dtype)
    for i in range(dec.q_star):
        out -= Hi @ (sys.Bq @ V.derivative(t, i))
        Hi = Hi @ dec.Hq
    return out


def K_vector(sys: DescriptorSystem, V: InputSignal, t: float, t0: float) -> np.ndarray:
    """Stacked [slow convolution integral; fast derivative sum] (z-coordinates)."""
    if V.r != sys.r:
        raise DimensionMismatch(f"input has dimension {V.r}, B has {sys.r} columns")
    slow = V.convolve(sys.dec.Jp, sys.Bp, t0, t)
    return np.concatenate([slow, fast_part(sys, V, t)])


def consistency_check(sys: DescriptorSystem, Y0, V: InputSignal, t0: float) -> ConsistencyReport:
    """Is ``Y0`` in colspan(Qp) + Q K(t0)? Reports the Euclidean defect."""
    Y0 = np.asarray(Y0, dtype=float).reshape(-1)
    if Y0.size != sys.m:
        raise DimensionMismatch(f"Y0 has {Y0.size} entries, expected {sys.m}")
    K0 = K_vector(sys, V, t0, t0)
    offset = sys.dec.Q @ K0
    rel = Y0 - offset
    basis = la.orth_columns(sys.dec.Qp, sys.tol) if sys.dec.p else np.zeros((sys.m, 0))
    proj = basis @ (basis.conj().T @ rel)
    defect = float(np.linalg.norm(rel - proj))
    projected = _real_if_close(offset + proj, "projected initial state")
    scale = max(1.0, float(np.linalg.norm(Y0)))
    return ConsistencyReport(defect <= sys.tol.residual_tol * scale, K0, projected, defect)


def _require_consistent(sys, Y0, V, t0):
    report = consistency_check(sys, Y0, V, t0)
    if not report.consistent:
        raise InconsistentInitialCondition(
            f"Y0 is not a consistent initial state (defect {report.defect:.3e})", report)
    return report


def solve_continuous(sys: DescriptorSystem, Y0, V: InputSignal, t_grid, t0: float | None = None) -> Trajectory:
    """``Y(t) = Qp exp(Jp (t - t0)) Z_p(t0) + Q K(t)`` on each grid point."""
    t_grid = np.asarray(t_grid, dtype=float).reshape(-1)
    t0 = float(t_grid[0]) if t0 is None else float(t0)
    Y0 = np.asarray(Y0, dtype=float).reshape(-1)
    report = _require_consistent(sys, Y0, V, t0)
    dec = sys.dec
    Zp0 = la.solve_linear(dec.Q, Y0.astype(dec.Q.dtype), sys.tol)[: dec.p]
    states = []
    for t in t_grid:
        Y = dec.Qp @ (la.mat_exp(dec.Jp, t - t0) @ Zp0) + dec.Q @ K_vector(sys, V, t, t0)
        states.append(_real_if_close(Y, "trajectory"))
    meta = {"method": "weierstrass", "t0": t0, "defect": report.defect,
            "decomposition_residuals": verify_decomposition(dec, sys.pencil)}
    return Trajectory(t_grid, np.array(states).reshape(len(t_grid), sys.m), meta)


def fundamental_matrix(dec: WeierstrassDecomposition, t: float, t0: float) -> np.ndarray:
    """``Q diag(exp(Jp (t - t0)), I_q) Q^{-1}``."""
    if dec.m == 0:
        return np.zeros((0, 0))
    middle = la.block_diag(la.mat_exp(dec.Jp, t - t0), np.eye(dec.q)) if dec.p else np.eye(dec.q)
    return _real_if_close(dec.Q @ middle @ dec.Q_inv, "fundamental matrix")


def fundamental_generator(dec: WeierstrassDecomposition) -> np.ndarray:
    """``Q diag(Jp, 0) Q^{-1}``, so that F(t, s) = exp(generator (t - s))."""
    middle = la.block_diag(dec.Jp, np.zeros((dec.q, dec.q))) if dec.p else np.zeros((dec.q, dec.q))
    return dec.Q @ middle @ dec.Q_inv


def solve_via_fundamental(sys: DescriptorSystem, Y0, V: InputSignal, t_grid, t0: float | None = None) -> Trajectory:
    """Fundamental-matrix form of the solution.

    The forcing integral is taken over the full m-dimensional generator of
    F(t, s) instead of the p-dimensional Jp, so it exercises a separate path
    from :func:`solve_continuous`.
    """
    t_grid = np.asarray(t_grid, dtype=float).reshape(-1)
    t0 = float(t_grid[0]) if t0 is None else float(t0)
    Y0 = np.asarray(Y0, dtype=float).reshape(-1)
    report = _require_consistent(sys, Y0, V, t0)
    dec = sys.dec
    gen = fundamental_generator(dec)
    forcing = dec.Qp @ sys.Bp
    fast0 = fast_part(sys, V, t0)
    states = []
    for t in t_grid:
        Y = (fundamental_matrix(dec, t, t0) @ Y0
             + V.convolve(gen, forcing, t0, t)
             + dec.Qq @ (fast_part(sys, V, t) - fast0))
        states.append(_real_if_close(Y, "trajectory"))
    meta = {"method": "fundamental", "t0": t0, "defect": report.defect}
    return Trajectory(t_grid, np.array(states).reshape(len(t_grid), sys.m), meta)


def residual_check(sys: DescriptorSystem, traj: Trajectory, V: InputSignal) -> float:
    """Max over interior points of |F Y' - G Y - B V|_inf, Y' by central differences."""
    t = traj.times
    if t.size < 3:
        raise GridTooCoarse("residual_check needs at least 3 grid points")
    h = np.diff(t)
    if np.max(np.abs(h - h[0])) > 1e-9 * max(1.0, abs(h[0])):
        raise ValueError("residual_check needs a uniform grid")
    Y = np.asarray(traj.states)
    dY = (Y[2:] - Y[:-2]) / (t[2:] - t[:-2])[:, None]
    F, G = la.as_float(sys.F), la.as_float(sys.G)
    worst = 0.0
    for k in range(1, t.size - 1):
        res = F @ dY[k - 1] - G @ Y[k] - sys.B @ V.value(t[k])
        worst = max(worst, float(np.max(np.abs(res))) if res.size else 0.0)
    return worst
