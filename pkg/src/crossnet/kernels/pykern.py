"""Pure-Python graph kernels.

Reference implementations of the two hot loops: single-source Dijkstra over a
CSR graph and common-neighbor counting for Jaccard candidate pairs.  The
compiled twin in ``_ckern.pyx`` must produce bit-identical results; ties in
the Dijkstra heap are broken by node id in both so traversal order is pinned.
"""

from __future__ import annotations

import heapq

import numpy as np

BACKEND = "pure"


def dijkstra_lengths(indptr: np.ndarray, indices: np.ndarray,
                     lengths: np.ndarray, source: int) -> np.ndarray:
    """Shortest-path distances from ``source`` over nonnegative edge lengths.

    The graph is CSR (``indptr``/``indices``/``lengths``); unreachable nodes
    get +inf.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf, dtype=np.float64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            nd = d + lengths[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def common_neighbor_counts(indptr: np.ndarray, indices: np.ndarray):
    """Count shared neighbors for every unordered pair with at least one.

    Adjacency must be undirected (both directions present), deduplicated,
    self-loop free, with each row sorted ascending.  Returns parallel arrays
    (ii, jj, counts) with i < j, ordered by (i, j).
    """
    n = indptr.shape[0] - 1
    out_i, out_j, out_c = [], [], []
    for i in range(n):
        nbrs = indices[indptr[i]:indptr[i + 1]]
        if nbrs.size == 0:
            continue
        pooled = np.concatenate([indices[indptr[u]:indptr[u + 1]] for u in nbrs])
        cnt = np.bincount(pooled, minlength=n)
        cand = np.nonzero(cnt[i + 1:])[0] + i + 1
        if cand.size == 0:
            continue
        out_i.append(np.full(cand.size, i, dtype=np.int64))
        out_j.append(cand.astype(np.int64))
        out_c.append(cnt[cand].astype(np.int64))
    if not out_i:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    return np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_c)
