"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run once untimed so numba compilation is excluded.
"""
import argparse
import timeit

import numpy as np

from compbern import kernels
from compbern._accel import HAS_NUMBA


def cases(rng):
    v = np.sin(7 * np.linspace(0, 1, 2049)) + 0.01 * rng.normal(size=2049)
    coeffs = rng.normal(size=(4096, 33))
    y = rng.uniform(size=4096)
    nodes = rng.normal(size=8 * 16 + 1)
    x = rng.uniform(size=20000)
    hull_w = np.maximum.accumulate(np.abs(rng.normal(size=20001)))
    hull_t = np.linspace(0, 1, hull_w.size)
    return {
        "lag_profile (N=2048)": ("lag_profile", (v,)),
        "second_difference_profile (N=2048)": ("second_difference_profile", (v,)),
        "decasteljau (4096 x deg 32)": ("decasteljau", (coeffs, y)),
        "composite_from_nodes (n=8, m=16, 20000 x)": ("composite_from_nodes", (nodes, 8, 16, x)),
        "upper_hull (20001 points)": ("upper_hull", (hull_t, hull_w)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<44}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (base, call_args) in cases(rng).items():
        fast = getattr(kernels, base + "_numba")
        slow = getattr(kernels, base + "_numpy")
        np.testing.assert_allclose(fast(*call_args), slow(*call_args), atol=1e-12)
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat)) * 1e3
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<44}{t_slow:>12.3f}{t_fast:>12.3f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
