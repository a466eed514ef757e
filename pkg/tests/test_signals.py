import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from pencilsys import signals
from pencilsys.errors import DerivativeUnavailable


def test_polynomial_values_and_derivatives():
    V = signals.polynomial([[1.0, 2.0, 3.0]])  # 1 + 2t + 3t^2
    assert V.value(2.0)[0] == pytest.approx(17.0)
    assert V.derivative(2.0, 1)[0] == pytest.approx(14.0)
    assert V.derivative(2.0, 2)[0] == pytest.approx(6.0)
    assert V.derivative(2.0, 3)[0] == pytest.approx(0.0, abs=1e-14)


def test_sinusoid_derivatives():
    V = signals.sinusoid([1.0], [2.0], 3.0, [0.5])
    t = 0.7
    assert V.value(t)[0] == pytest.approx(math.sin(3 * t) + 2 * math.cos(3 * t) + 0.5)
    assert V.derivative(t, 1)[0] == pytest.approx(3 * math.cos(3 * t) - 6 * math.sin(3 * t))
    assert V.derivative(t, 2)[0] == pytest.approx(-9 * math.sin(3 * t) - 18 * math.cos(3 * t))


def test_exponential_sum():
    V = signals.exponential_sum([[1.0, -2.0]], [0.5, -1.0])
    assert V.value(1.0)[0] == pytest.approx(math.exp(0.5) - 2 * math.exp(-1))
    assert V.derivative(1.0, 2)[0] == pytest.approx(0.25 * math.exp(0.5) - 2 * math.exp(-1))


def test_sum_and_scaling():
    V = signals.constant([1.0]) + 2 * signals.polynomial([[0.0, 1.0]])
    assert V.value(3.0)[0] == pytest.approx(7.0)
    assert V.derivative(3.0, 1)[0] == pytest.approx(2.0)


def test_scalar_convolution_closed_form():
    V = signals.constant([2.0])
    K = V.convolve(np.array([[-1.0]]), np.array([[1.0]]), 0.0, 1.5)
    assert K[0] == pytest.approx((1 - math.exp(-1.5)) * 2.0, rel=1e-13)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1, 1), st.floats(0.1, 3), st.floats(0.1, 2.0))
def test_exosystem_convolution_matches_quadrature(a, omega, t):
    V = signals.sinusoid([1.0], [0.5], omega, [0.2])
    A = np.array([[a, 1.0], [0.0, -1.0]])
    Bm = np.array([[1.0], [2.0]])
    got = V.convolve(A, Bm, 0.0, t)
    want = scipy.integrate.quad_vec(lambda s: scipy.linalg.expm(A * (t - s)) @ Bm @ V.value(s), 0, t,
                                    epsabs=1e-13)[0]
    assert np.allclose(got, want, atol=1e-10)


def test_zoh_holds_and_convolves_piecewise():
    Z = signals.ZOHSignal([[1.0], [-1.0], [3.0]], 0.5)
    assert Z.value(-1.0)[0] == 1.0 and Z.value(0.6)[0] == -1.0 and Z.value(9.0)[0] == 3.0
    assert Z.derivative(0.6, 1)[0] == 0.0
    A, Bm = np.array([[-2.0]]), np.array([[1.0]])
    # piecewise closed form
    want, t = 0.0, 1.4
    for k, v in enumerate([1.0, -1.0, 3.0]):
        lo, hi = 0.5 * k, min(0.5 * (k + 1), t)
        if hi > lo:
            want += v * (math.exp(-2 * (t - hi)) - math.exp(-2 * (t - lo))) / 2
    assert Z.convolve(A, Bm, 0.0, t)[0] == pytest.approx(want, rel=1e-12)


def test_callable_signal_without_derivatives():
    V = signals.CallableSignal(lambda t: [math.sin(t)], 1, [lambda t: [math.cos(t)]])
    assert V.derivative(0.0, 1)[0] == 1.0
    with pytest.raises(DerivativeUnavailable):
        V.derivative(0.0, 2)


def test_samples_layout():
    V = signals.polynomial([[0.0, 1.0], [1.0, 0.0]])
    S = V.samples(0.5, -1, 2)
    assert S.shape == (3, 2)
    assert np.allclose(S[:, 0], [-0.5, 0.0, 0.5])
