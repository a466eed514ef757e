"""The compiled kernels and the pure-Python fallback must agree."""

import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pencilsys import _kernels_py as pure
from pencilsys import kernels

try:
    from pencilsys import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_env_var_forces_fallback():
    out = subprocess.run([sys.executable, "-c", "from pencilsys import kernels; print(kernels.BACKEND)"],
                         env={**os.environ, "PENCILSYS_PURE_PYTHON": "1"}, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "python"


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.99), st.integers(0, 80))
def test_coefficients_agree(n, K):
    assert np.array_equal(compiled.nabla_coefficients(n, K), pure.nabla_coefficients(n, K))


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.99), arrays(float, (20, 3), elements=st.floats(-5, 5)))
def test_history_kernels_agree(n, Y):
    c = pure.nabla_coefficients(n, 19)
    assert np.allclose(compiled.nabla_all(c, Y), pure.nabla_all(c, Y), rtol=1e-13, atol=1e-13)
    assert np.allclose(compiled.history_sum(c, Y, 19, 0), pure.history_sum(c, Y, 19, 0), rtol=1e-13, atol=1e-13)


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.99), arrays(float, (2, 2), elements=st.floats(-1, 1)),
       arrays(float, (16, 2), elements=st.floats(-1, 1)))
def test_march_agrees(n, SinvF, W):
    c = pure.nabla_coefficients(n, 15)
    Y0 = np.array([1.0, -0.5])
    a = compiled.fractional_march(c, SinvF, W, Y0)
    b = pure.fractional_march(c, SinvF, W, Y0)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_ext
@settings(max_examples=30, deadline=None)
@given(arrays(float, (3, 3), elements=st.floats(-1, 1)), arrays(float, (10, 3), elements=st.floats(-1, 1)))
def test_telescope_agrees(A, U):
    Y0 = np.array([0.5, 0.0, -1.0])
    assert np.allclose(compiled.telescope(A, U, Y0, 10), pure.telescope(A, U, Y0, 10), rtol=1e-12, atol=1e-12)
