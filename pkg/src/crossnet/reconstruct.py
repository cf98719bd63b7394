"""Rebuild a single network as an undirected weighted similarity graph.

Only the follow relation feeds this: two users look similar when their friend
sets (in- and out-neighbors pooled) overlap.  Candidate pairs are enumerated
through inverted neighbor lists, so pairs with no common neighbor are never
touched, then each user keeps only its top ceil(sqrt(|L_i|)) candidates by
similarity and an edge survives if either endpoint kept it.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, NegativeWeightError
from .model import SingleNetwork, UserIndex


def jaccard(f_i, f_j) -> float:
    """Jaccard coefficient of two friend sets; 0 when both are empty."""
    f_i, f_j = set(f_i), set(f_j)
    union = len(f_i | f_j)
    if union == 0:
        return 0.0
    return len(f_i & f_j) / union


class SimilarityGraph:
    """Undirected weighted graph with similarities in (0, 1].

    Edges are stored once as (i, j, sim) with i < j, sorted.  Shortest-path
    machinery (CSR arrays with edge length -ln sim, per-source strength rows)
    is built lazily and cached, since extension reuses the same sources many
    times.
    """

    def __init__(self, users: UserIndex, edges):
        n = len(users)
        seen = set()
        norm = []
        for i, j, s in edges:
            i, j, s = int(i), int(j), float(s)
            if i == j:
                raise DimensionMismatchError(f"self-loop on ordinal {i}")
            if not 0.0 < s <= 1.0:
                raise NegativeWeightError(f"similarity {s} outside (0, 1]")
            if i > j:
                i, j = j, i
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionMismatchError(f"edge ({i}, {j}) out of range")
            if (i, j) in seen:
                raise DimensionMismatchError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j, s))
        norm.sort()
        self.users = users
        self.edges = tuple(norm)
        self._csr = None
        self._ns_cache: dict = {}

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def csr(self):
        """(indptr, indices, lengths) with both directions materialized."""
        if self._csr is None:
            n = self.n
            deg = np.zeros(n, dtype=np.int64)
            for i, j, _ in self.edges:
                deg[i] += 1
                deg[j] += 1
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = np.zeros(indptr[-1], dtype=np.int64)
            lengths = np.zeros(indptr[-1], dtype=np.float64)
            fill = indptr[:-1].copy()
            for i, j, s in self.edges:
                w = -math.log(s)
                indices[fill[i]] = j
                lengths[fill[i]] = w
                fill[i] += 1
                indices[fill[j]] = i
                lengths[fill[j]] = w
                fill[j] += 1
            self._csr = (indptr, indices, lengths)
        return self._csr

    def strength_row(self, source: int) -> np.ndarray:
        """NS from ``source`` to every node: exp(-shortest -ln(sim) distance).

        Equals the maximum product of similarities over paths; 1 at the
        source, 0 for disconnected nodes.  Rows are cached per source.
        """
        row = self._ns_cache.get(source)
        if row is None:
            indptr, indices, lengths = self.csr()
            dist = kernels.dijkstra_lengths(indptr, indices, lengths, source)
            with np.errstate(over="ignore"):
                row = np.exp(-dist)
            row[~np.isfinite(dist)] = 0.0
            self._ns_cache[source] = row
        return row


def reconstruct(g: SingleNetwork, threshold: float = 0.0) -> SimilarityGraph:
    """Similarity graph from a follow network.

    All user pairs sharing at least one friend get a Jaccard score over their
    friend sets; scores strictly above ``threshold`` form the candidate list
    L_i of each endpoint; each user keeps its top ceil(sqrt(|L_i|)) candidates
    (ties broken toward the smaller ordinal), and the union of kept edges is
    returned.
    """
    nbrs = g.undirected_neighbors()
    n = g.n
    deg = np.array([b.size for b in nbrs], dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = (np.concatenate(nbrs) if n and indptr[-1] > 0
               else np.zeros(0, dtype=np.int64))
    ii, jj, counts = kernels.common_neighbor_counts(indptr, indices)

    union = deg[ii] + deg[jj] - counts
    sims = counts / union
    keep_mask = sims > threshold
    ii, jj, sims = ii[keep_mask], jj[keep_mask], sims[keep_mask]

    per_user: list = [[] for _ in range(n)]
    for i, j, s in zip(ii.tolist(), jj.tolist(), sims.tolist()):
        per_user[i].append((j, s))
        per_user[j].append((i, s))

    kept = set()
    for i in range(n):
        cand = per_user[i]
        if not cand:
            continue
        cand.sort(key=lambda t: (-t[1], t[0]))
        top = math.ceil(math.sqrt(len(cand)))
        for j, _ in cand[:top]:
            kept.add((i, j) if i < j else (j, i))

    sim_of = {(int(i), int(j)): float(s)
              for i, j, s in zip(ii, jj, sims)}
    edges = [(i, j, sim_of[(i, j)]) for i, j in sorted(kept)]
    return SimilarityGraph(g.users, edges)
