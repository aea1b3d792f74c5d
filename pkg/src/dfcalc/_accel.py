"""Float hot loops: numba kernels with a pure-numpy fallback.

Set ``DFCALC_NO_NUMBA=1`` to force the numpy path (also used automatically
when numba is not importable). Both implementations stay importable as
``numba_impl`` / ``numpy_impl`` so the benchmark and the tests can compare them.
"""
import os
import types

import numpy as np

__all__ = [
    "USING_NUMBA",
    "kernel_coeffs",
    "causal_convolve",
    "numpy_impl",
    "numba_impl",
]


def _np_kernel_coeffs(alpha, m_max):
    m = np.arange(1, m_max + 1, dtype=np.float64)
    steps = (m + (alpha - 1.0)) / m
    out = np.empty(m_max + 1, dtype=np.float64)
    out[0] = 1.0
    out[1:] = np.cumprod(steps)
    return out


def _np_causal_convolve(c, x):
    n = x.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.float64)
    return np.convolve(c[:n], x)[:n]


numpy_impl = types.SimpleNamespace(
    kernel_coeffs=_np_kernel_coeffs,
    causal_convolve=_np_causal_convolve,
)


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def kernel_coeffs(alpha, m_max):
        out = np.empty(m_max + 1, dtype=np.float64)
        out[0] = 1.0
        for m in range(1, m_max + 1):
            out[m] = out[m - 1] * (m + alpha - 1.0) / m
        return out

    @njit(cache=True)
    def causal_convolve(c, x):
        n = x.shape[0]
        y = np.zeros(n, dtype=np.float64)
        for k in range(n):
            acc = 0.0
            for j in range(k + 1):
                acc += c[k - j] * x[j]
            y[k] = acc
        return y

    return types.SimpleNamespace(
        kernel_coeffs=kernel_coeffs,
        causal_convolve=causal_convolve,
    )


numba_impl = None
if not os.environ.get("DFCALC_NO_NUMBA"):
    try:
        numba_impl = _build_numba()
    except ImportError:  # numba missing: numpy path only
        numba_impl = None

USING_NUMBA = numba_impl is not None
_impl = numba_impl if USING_NUMBA else numpy_impl


def kernel_coeffs(alpha, m_max):
    """Float kernel weights ``c_0..c_{m_max}`` by the ratio recurrence."""
    return _impl.kernel_coeffs(float(alpha), int(m_max))


def causal_convolve(c, x):
    """``y[k] = sum_{j<=k} c[k-j] * x[j]`` for float arrays."""
    return _impl.causal_convolve(
        np.ascontiguousarray(c, dtype=np.float64),
        np.ascontiguousarray(x, dtype=np.float64),
    )
