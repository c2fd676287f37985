"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py [--sizes 2000 10000 50000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from qsdcluster import SbmParams, build_transition_view, generate_plsbm, giant_component
from qsdcluster import _kernels_numba as nb
from qsdcluster import _kernels_numpy as npk


def _best(fn, repeat):
    fn()  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[2000, 10000, 50000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'n':>7} {'kernel':<16} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for n in args.sizes:
        g = giant_component(generate_plsbm(SbmParams(n, 4, 1, 0.1), seed=1)).graph
        v = build_transition_view(g, 1)
        scale = 1.0 / np.sqrt(v.degrees)
        empty = np.zeros((0, v.size))
        y0 = np.sqrt(v.degrees)
        x = np.random.default_rng(0).standard_normal(v.size)
        mask = np.ones(g.n, dtype=np.bool_)
        ell = g.ell.astype(np.float64)
        cases = {
            "csr_matvec": lambda k: k.csr_matvec(v.indptr, v.indices, v.data, x),
            "power_iteration": lambda k: k.power_iteration(v.indptr, v.indices, v.data, scale, y0, 1.0, empty, 1e-10, 200_000),
            "component_labels": lambda k: k.component_labels(g.indptr, g.indices, mask),
            "revealed_vote": lambda k: k.revealed_vote(g.indptr, g.indices, ell),
        }
        for name, case in cases.items():
            t_nb = _best(lambda: case(nb), args.repeat)
            t_np = _best(lambda: case(npk), args.repeat)
            print(f"{g.n:>7} {name:<16} {1e3 * t_nb:>10.3f} {1e3 * t_np:>10.3f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
