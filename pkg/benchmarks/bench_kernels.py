"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--sizes 20 50 100] [--repeat 3]

Times the Jacobi eigensolver on Dirichlet matrices of random weighted
graphs and the sparse Laplacian rows on a long line window, for each
backend, and checks that both backends agree.
"""

import argparse
import time

import numpy as np

from wavegraph import _kernels_py
from wavegraph.graph import line_graph_window
from wavegraph.spectral import dirichlet_matrix
from wavegraph.suites import random_weighted_graph

try:
    from wavegraph import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def dirichlet_S(n, rng):
    while True:
        g = random_weighted_graph(rng, max_vertices=n + 8)
        if len(g.vertices) > n:
            return dirichlet_matrix(g, g.vertices[:n]).S


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 100])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = [("python", _kernels_py)]
    if _compiled is not None:
        backends.append(("cython", _compiled))
    else:
        print("compiled extension not built; timing the fallback only")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'size':>6}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        S = dirichlet_S(n, rng)
        times, eigs = [], []
        for _, mod in backends:
            times.append(best_of(lambda: mod.jacobi_eigh(S), args.repeat))
            eigs.append(np.sort(mod.jacobi_eigh(S)[0]))
        if len(eigs) == 2:
            assert np.allclose(eigs[0], eigs[1], atol=1e-10)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{'jacobi_eigh':<16}{n:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)

    g = line_graph_window(50_000)
    indptr, indices, coef = g.csr()
    values = rng.uniform(-1, 1, size=len(g.vertices))
    rows = np.arange(1, len(g.vertices) - 1, dtype=np.int64)
    times, outs = [], []
    for _, mod in backends:
        times.append(best_of(lambda: mod.laplacian_rows(indptr, indices, coef, values, rows), args.repeat))
        outs.append(mod.laplacian_rows(indptr, indices, coef, values, rows))
    if len(outs) == 2:
        assert np.allclose(outs[0], outs[1], atol=1e-12)
    speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else ""
    print(f"{'laplacian_rows':<16}{len(rows):>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
