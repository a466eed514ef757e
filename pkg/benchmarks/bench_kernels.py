"""Time the compiled history kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--K 2000] [--m 4] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from pencilsys import _kernels_py as pure

try:
    from pencilsys import _kernels as compiled
except ImportError:
    compiled = None


def cases(K, m, rng):
    c = pure.nabla_coefficients(0.5, K)
    Y = rng.normal(size=(K + 1, m))
    SinvF = rng.normal(size=(m, m)) / m
    W = rng.normal(size=(K + 1, m))
    A = rng.normal(size=(m, m)) / m
    Kt = min(K, 400)  # the literal telescoped sum is quadratic in K
    U = rng.normal(size=(Kt, m))
    return {
        "nabla_coefficients": lambda mod: mod.nabla_coefficients(0.5, K),
        "nabla_all": lambda mod: mod.nabla_all(c, Y),
        "fractional_march": lambda mod: mod.fractional_march(c, SinvF, W, Y[0]),
        f"telescope (K={Kt})": lambda mod: mod.telescope(A, U, Y[0], Kt),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--K", type=int, default=2000)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"K={args.K} m={args.m}, best of {args.repeat}")
    print(f"{'kernel':<24}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in cases(args.K, args.m, rng).items():
        t_py = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:<24}{t_py:>12.4f}{'n/a':>12}{'':>10}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:<24}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
