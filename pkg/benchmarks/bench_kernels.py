"""Time the numba kernels against the numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeat R]

Both backends are imported from the same process; the dispatch switch
(MIXEDPOWERS_NUMBA) only decides which one the library calls.
"""

import argparse
import math
import timeit

import numpy as np

from mixedpowers import kernels
from mixedpowers._accel import HAVE_NUMBA
from mixedpowers.exact_series import RationalPoly


def workload(points):
    polys = [RationalPoly((1, 1)), RationalPoly((1, -1)), RationalPoly((1, 3, 3, 1))]
    coeffs, lengths = kernels.pack_polys(polys)
    theta = np.linspace(-math.pi, math.pi, points)
    return {
        "circle_integrand": lambda fn: fn(theta, 0.45 + 0j, 200.0, coeffs, lengths,
                                          np.array([900.0, 99.0, 1.0]), np.array([1.0, -2.0], dtype=complex)),
        "circle_log_modulus": lambda fn: fn(theta, 0.45, coeffs, lengths, np.array([1.0, 0.11, 0.2])),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print(f"{'kernel':<20} {'backend':<8} {'best ms':>10} {'speedup':>8}")
    for name, call in workload(args.points).items():
        timings = {}
        results = {}
        for backend in backends:
            fn = getattr(kernels, f"{name}_{backend}")
            results[backend] = call(fn)  # warm-up and JIT compile
            timings[backend] = min(timeit.repeat(lambda: call(fn), number=1, repeat=args.repeat))
        if len(results) == 2:
            assert np.allclose(results["numpy"], results["numba"], rtol=1e-10, atol=1e-12), name
        base = timings["numpy"]
        for backend in backends:
            t = timings[backend]
            print(f"{name:<20} {backend:<8} {1e3 * t:>10.2f} {base / t:>7.2f}x")


if __name__ == "__main__":
    main()
