"""Vector-valued inputs V(t) with exact derivatives.

Smooth inputs (polynomials, exponential sums, sinusoids, and their sums) are
represented as outputs of a linear exosystem ``V(t) = C exp(S (t - t_ref)) w``.
That gives exact derivatives ``C S^i exp(...) w`` of any order and closed-form
convolution integrals through one augmented matrix exponential.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np
import scipy.integrate
import scipy.linalg

from .errors import DerivativeUnavailable, DimensionMismatch
from .linalg import mat_exp, phi_integral


class InputSignal(ABC):
    """An input V: R -> R^r."""

    r: int

    @abstractmethod
    def value(self, t: float) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, t: float, order: int) -> np.ndarray:
        ...

    def __call__(self, t: float) -> np.ndarray:
        return self.value(t)

    def convolve(self, A, Bmat, t0: float, t: float) -> np.ndarray:
        """``int_{t0}^{t} exp(A (t - s)) Bmat V(s) ds`` by adaptive quadrature."""
        A = np.asarray(A)
        Bmat = np.asarray(Bmat)
        if A.shape[0] == 0 or t == t0:
            return np.zeros(A.shape[0], dtype=np.result_type(A, Bmat, float))

        def integrand(s):
            return mat_exp(A, t - s) @ (Bmat @ self.value(s))

        return scipy.integrate.quad_vec(integrand, t0, t, epsabs=1e-13, epsrel=1e-12)[0]

    def samples(self, T: float, start: int, stop: int) -> np.ndarray:
        """Rows V(kT) for k = start, ..., stop - 1."""
        return np.array([self.value(k * T) for k in range(start, stop)]).reshape(-1, self.r)


class ExosystemSignal(InputSignal):
    """``V(t) = C exp(S (t - t_ref)) w``."""

    def __init__(self, S, C, w, t_ref: float = 0.0):
        self.S = np.atleast_2d(np.asarray(S, dtype=float))
        self.C = np.atleast_2d(np.asarray(C, dtype=float))
        self.w = np.asarray(w, dtype=float).reshape(-1)
        self.t_ref = float(t_ref)
        n = self.S.shape[0]
        if self.S.shape != (n, n) or self.C.shape[1] != n or self.w.shape != (n,):
            raise DimensionMismatch("inconsistent exosystem dimensions")
        self.r = self.C.shape[0]

    def state(self, t: float) -> np.ndarray:
        return mat_exp(self.S, t - self.t_ref) @ self.w

    def value(self, t):
        return self.C @ self.state(t)

    def derivative(self, t, order):
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        return self.C @ np.linalg.matrix_power(self.S, order) @ self.state(t)

    def convolve(self, A, Bmat, t0, t):
        A = np.asarray(A)
        Bmat = np.asarray(Bmat)
        n, k = A.shape[0], self.S.shape[0]
        if n == 0:
            return np.zeros(0, dtype=np.result_type(A, Bmat, float))
        aug = np.zeros((n + k, n + k), dtype=np.result_type(A, Bmat, float))
        aug[:n, :n] = A
        aug[:n, n:] = Bmat @ self.C
        aug[n:, n:] = self.S
        return mat_exp(aug, t - t0)[:n, n:] @ self.state(t0)

    def __add__(self, other):
        if not isinstance(other, ExosystemSignal):
            return NotImplemented
        if other.r != self.r:
            raise DimensionMismatch("cannot add signals of different dimension")
        # align both to t_ref = 0
        S = scipy.linalg.block_diag(self.S, other.S)
        C = np.hstack([self.C, other.C])
        w = np.concatenate([self.state(0.0), other.state(0.0)])
        return ExosystemSignal(S, C, w, 0.0)

    def __mul__(self, a: float):
        return ExosystemSignal(self.S, a * self.C, self.w, self.t_ref)

    __rmul__ = __mul__


def polynomial(coeffs) -> ExosystemSignal:
    """``V(t) = sum_k coeffs[:, k] t**k`` (columns lowest degree first)."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    r, n = coeffs.shape
    # state (1, t, t^2/2!, ...); d/dt shifts each entry down by one
    S = np.eye(n, k=-1)
    C = coeffs * np.array([math.factorial(k) for k in range(n)])
    w = np.zeros(n)
    w[0] = 1.0
    return ExosystemSignal(S, C, w, 0.0)


def constant(value) -> ExosystemSignal:
    return polynomial(np.asarray(value, dtype=float).reshape(-1, 1))


def exponential_sum(amplitudes, rates) -> ExosystemSignal:
    """``V(t) = sum_l amplitudes[:, l] exp(rates[l] t)``."""
    amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=float))
    rates = np.asarray(rates, dtype=float).reshape(-1)
    if amplitudes.shape[1] != rates.size:
        raise DimensionMismatch("need one amplitude column per rate")
    return ExosystemSignal(np.diag(rates), amplitudes, np.ones(rates.size), 0.0)


def sinusoid(sin_amplitude, cos_amplitude, omega: float, offset=None) -> ExosystemSignal:
    """``V(t) = a sin(omega t) + b cos(omega t) + offset``."""
    a = np.asarray(sin_amplitude, dtype=float).reshape(-1)
    b = np.asarray(cos_amplitude, dtype=float).reshape(-1)
    c = np.zeros_like(a) if offset is None else np.asarray(offset, dtype=float).reshape(-1)
    if not (a.shape == b.shape == c.shape):
        raise DimensionMismatch("sinusoid amplitudes and offset must share a dimension")
    S = np.array([[0.0, omega, 0.0], [-omega, 0.0, 0.0], [0.0, 0.0, 0.0]])
    C = np.column_stack([a, b, c])
    return ExosystemSignal(S, C, np.array([0.0, 1.0, 1.0]), 0.0)


class ZOHSignal(InputSignal):
    """Piecewise-constant input: ``V(t) = values[k]`` on ``[t_start + kT, t_start + (k+1)T)``.

    Before ``t_start`` the first sample is held, after the last interval the
    last one. Derivatives of order >= 1 are zero.
    """

    def __init__(self, values, T: float, t_start: float = 0.0):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.shape[0] == 0:
            raise ValueError("need at least one sample")
        if T <= 0:
            raise ValueError("sampling period must be positive")
        self.values = values
        self.T = float(T)
        self.t_start = float(t_start)
        self.r = values.shape[1]

    def index(self, t: float) -> int:
        k = math.floor((t - self.t_start) / self.T + 1e-12)
        return min(max(k, 0), self.values.shape[0] - 1)

    def value(self, t):
        return self.values[self.index(t)].copy()

    def derivative(self, t, order):
        if order == 0:
            return self.value(t)
        return np.zeros(self.r)

    def convolve(self, A, Bmat, t0, t):
        A = np.asarray(A)
        Bmat = np.asarray(Bmat)
        n = A.shape[0]
        out = np.zeros(n, dtype=np.result_type(A, Bmat, float))
        if n == 0 or t <= t0:
            return out
        # breakpoints inside (t0, t)
        k0 = math.floor((t0 - self.t_start) / self.T) + 1
        k1 = math.ceil((t - self.t_start) / self.T)
        cuts = [t0] + [self.t_start + k * self.T for k in range(k0, k1)
                       if t0 < self.t_start + k * self.T < t] + [t]
        for a, b in zip(cuts[:-1], cuts[1:]):
            v = self.value(0.5 * (a + b))
            out = out + mat_exp(A, t - b) @ phi_integral(A, b - a) @ (Bmat @ v)
        return out


class CallableSignal(InputSignal):
    """User-supplied V(t) with optional derivative callables ``[V', V'', ...]``."""

    def __init__(self, func, r: int, derivatives=()):
        self.func = func
        self.r = r
        self.derivatives = list(derivatives)

    def value(self, t):
        return np.asarray(self.func(t), dtype=float).reshape(self.r)

    def derivative(self, t, order):
        if order == 0:
            return self.value(t)
        if order > len(self.derivatives):
            raise DerivativeUnavailable(f"derivative of order {order} was not supplied")
        return np.asarray(self.derivatives[order - 1](t), dtype=float).reshape(self.r)
