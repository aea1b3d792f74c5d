"""Time the float kernel loops: numba vs the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 64 256 1024] [--repeat 50]

Also times a full float nabla-left RL difference through the public API,
which uses whichever implementation is active (DFCALC_NO_NUMBA=1 forces numpy).
"""
import argparse
import time

import numpy as np

from dfcalc import Grid, GridFunction, OperatorSpec, apply
from dfcalc import _accel


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024, 4096])
    parser.add_argument("--repeat", type=int, default=30)
    parser.add_argument("--alpha", type=float, default=0.5)
    args = parser.parse_args(argv)

    impls = [("numpy", _accel.numpy_impl)]
    if _accel.numba_impl is not None:
        impls.append(("numba", _accel.numba_impl))
        # compile outside the timed region
        _accel.numba_impl.kernel_coeffs(args.alpha, 4)
        _accel.numba_impl.causal_convolve(np.ones(4), np.ones(4))
    else:
        print("numba not available (or DFCALC_NO_NUMBA set): numpy only")

    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'impl':>6} {'coeffs [us]':>12} {'convolve [us]':>14}")
    for n in args.sizes:
        x = rng.standard_normal(n)
        ref = None
        for name, impl in impls:
            c = impl.kernel_coeffs(args.alpha, n)
            y = impl.causal_convolve(c, x)
            if ref is None:
                ref = y
            else:
                assert np.allclose(y, ref, rtol=1e-12, atol=1e-12), f"{name} disagrees at n={n}"
            t_c = best_of(lambda: impl.kernel_coeffs(args.alpha, n), args.repeat)
            t_v = best_of(lambda: impl.causal_convolve(c, x), args.repeat)
            print(f"{n:>6} {name:>6} {t_c * 1e6:>12.1f} {t_v * 1e6:>14.1f}")

    active = "numba" if _accel.USING_NUMBA else "numpy"
    spec = OperatorSpec("nabla", "left", "rl", args.alpha, 0.0)
    for n in args.sizes:
        f = GridFunction(Grid(0.0, n), rng.standard_normal(n), "float")
        t = best_of(lambda: apply(spec, f), args.repeat)
        print(f"apply nabla-left-rl n={n} ({active}): {t * 1e6:.1f} us")


if __name__ == "__main__":
    main()
