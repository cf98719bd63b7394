"""Benchmark the compiled graph kernels against the pure-Python fallback.

Runs single-source Dijkstra and common-neighbor counting on random graphs of
increasing size with both backends and prints a timing table plus the
speedup.  Results are checked for bitwise agreement while timing, so this
doubles as a stress test of the backend contract.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 200,500,1000] [--repeats 3]
"""

import argparse
import time

import numpy as np

from crossnet.kernels import pykern

try:
    from crossnet.kernels import _ckern as ckern
except ImportError:
    ckern = None


def random_csr(rng, n, m):
    """Undirected random graph as CSR with uniform edge lengths."""
    pairs = set()
    while len(pairs) < m:
        i, j = rng.integers(0, n, size=2)
        if i != j:
            pairs.add((min(int(i), int(j)), max(int(i), int(j))))
    deg = np.zeros(n, dtype=np.int64)
    for i, j in pairs:
        deg[i] += 1
        deg[j] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.zeros(indptr[-1], dtype=np.int64)
    lengths = np.zeros(indptr[-1], dtype=np.float64)
    fill = indptr[:-1].copy()
    for i, j in sorted(pairs):
        w = float(rng.uniform(0.01, 2.0))
        for a, b in ((i, j), (j, i)):
            indices[fill[a]] = b
            lengths[fill[a]] = w
            fill[a] += 1
    for i in range(n):
        order = np.argsort(indices[indptr[i]:indptr[i + 1]], kind="stable")
        indices[indptr[i]:indptr[i + 1]] = indices[indptr[i]:indptr[i + 1]][order]
        lengths[indptr[i]:indptr[i + 1]] = lengths[indptr[i]:indptr[i + 1]][order]
    return indptr, indices, lengths


def timeit(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="200,500,1000",
                    help="comma-separated node counts")
    ap.add_argument("--density", type=float, default=4.0,
                    help="edges per node")
    ap.add_argument("--sources", type=int, default=20,
                    help="Dijkstra sources per graph")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if ckern is None:
        print("compiled backend not built; nothing to compare")
        return 1

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<10} {'n':>6} {'pure (s)':>10} {'compiled (s)':>13} "
          f"{'speedup':>8}")
    for n in sizes:
        m = int(args.density * n)
        indptr, indices, lengths = random_csr(rng, n, m)
        sources = rng.integers(0, n, size=args.sources)

        def run_dijkstra(impl):
            def go():
                return np.vstack([impl.dijkstra_lengths(indptr, indices,
                                                        lengths, int(s))
                                  for s in sources])
            return go

        tp, rp = timeit(run_dijkstra(pykern), args.repeats)
        tc, rc = timeit(run_dijkstra(ckern), args.repeats)
        assert rp.tobytes() == rc.tobytes(), "backend mismatch (dijkstra)"
        print(f"{'dijkstra':<10} {n:>6} {tp:>10.4f} {tc:>13.4f} "
              f"{tp / tc:>7.1f}x")

        tp, rp = timeit(lambda: pykern.common_neighbor_counts(indptr, indices),
                        args.repeats)
        tc, rc = timeit(lambda: ckern.common_neighbor_counts(indptr, indices),
                        args.repeats)
        for a, b in zip(rp, rc):
            assert np.array_equal(a, b), "backend mismatch (counts)"
        print(f"{'counts':<10} {n:>6} {tp:>10.4f} {tc:>13.4f} "
              f"{tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
