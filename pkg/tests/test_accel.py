import os
import subprocess
import sys

import numpy as np
import pytest

from dfcalc import _accel

needs_numba = pytest.mark.skipif(_accel.numba_impl is None, reason="numba not available")


@needs_numba
@pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0, 2.75, -0.5])
def test_kernel_coeffs_agree(alpha):
    a = _accel.numpy_impl.kernel_coeffs(alpha, 200)
    b = _accel.numba_impl.kernel_coeffs(alpha, 200)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_numba
@pytest.mark.parametrize("n", [0, 1, 7, 64])
def test_convolve_agree(n):
    rng = np.random.default_rng(n)
    c = _accel.numpy_impl.kernel_coeffs(0.4, max(n, 1))
    x = rng.standard_normal(n)
    assert np.allclose(_accel.numpy_impl.causal_convolve(c, x), _accel.numba_impl.causal_convolve(c, x), rtol=1e-12, atol=1e-14)


def test_env_flag_forces_numpy():
    code = "from dfcalc import _accel; print(_accel.USING_NUMBA, _accel.numba_impl is None)"
    env = dict(os.environ, DFCALC_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out == ["False", "True"]


def test_dispatch_matches_reference():
    x = np.arange(1.0, 9.0)
    c = _accel.kernel_coeffs(1.0, 7)
    assert np.array_equal(_accel.causal_convolve(c, x), np.cumsum(x))
