"""Choosing the number of communities.

The solver needs k up front, so we bracket it: run seeded Louvain (the
fast-unfolding heuristic) on each layer a few times, take the per-layer mean
community counts, and widen the min/max of those means by 2 on each side.
Directed layers are symmetrized as (A + A^T) / 2 first.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyGraphError
from .model import MultiplexNetwork, require_nonneg, require_symmetric

log = logging.getLogger(__name__)


def modularity(adj: np.ndarray, labels: np.ndarray) -> float:
    """Newman modularity of a partition on a symmetric weighted graph.

    Doubled-edge convention: m2 counts every undirected edge twice, degrees
    are row sums plus the diagonal (a self loop adds twice to its degree).
    """
    adj = np.asarray(adj, dtype=np.float64)
    labels = np.asarray(labels)
    diag = np.diag(adj)
    k = adj.sum(axis=1) + diag
    m2 = k.sum()
    if m2 <= 0.0:
        raise EmptyGraphError("graph has no edges")
    q = 0.0
    for com in np.unique(labels):
        mask = labels == com
        sub = adj[np.ix_(mask, mask)]
        in_c = sub.sum() + np.diag(sub).sum()
        tot_c = k[mask].sum()
        q += in_c / m2 - (tot_c / m2) ** 2
    return float(q)


def _one_level(nbrs, self_w, k, m2, rng):
    """Single Louvain level: greedy node moves until a full pass is silent.

    ``nbrs`` is a list of (neighbor, weight) lists without self loops.
    Returns (community array, True if anything moved).
    """
    n = len(nbrs)
    com = np.arange(n)
    tot = k.copy()
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in rng.permutation(n):
            ci = com[i]
            # weights from i to each adjacent community
            wcom = {}
            for j, w in nbrs[i]:
                cj = com[j]
                wcom[cj] = wcom.get(cj, 0.0) + w
            tot[ci] -= k[i]
            base = wcom.get(ci, 0.0) - tot[ci] * k[i] / m2
            best_c, best_gain = ci, base
            for cj in sorted(wcom):
                if cj == ci:
                    continue
                gain = wcom[cj] - tot[cj] * k[i] / m2
                if gain > best_gain:
                    best_c, best_gain = cj, gain
            tot[best_c] += k[i]
            if best_c != ci:
                com[i] = best_c
                improved = True
                moved_any = True
    return com, moved_any


def _aggregate(nbrs, self_w, com):
    """Collapse communities into super-nodes; returns (nbrs, self_w, mapping)."""
    old, mapping = np.unique(com, return_inverse=True)
    nc = len(old)
    new_self = np.zeros(nc)
    acc = [dict() for _ in range(nc)]
    for i, lst in enumerate(nbrs):
        ci = mapping[i]
        new_self[ci] += self_w[i]
        for j, w in lst:
            cj = mapping[j]
            if ci == cj:
                new_self[ci] += w / 2.0
            else:
                acc[ci][cj] = acc[ci].get(cj, 0.0) + w
    new_nbrs = [sorted(d.items()) for d in acc]
    return new_nbrs, new_self, mapping


def louvain(adj: np.ndarray, seed: int = 0):
    """Fast-unfolding community detection on a symmetric weighted graph.

    Returns (labels, modularity).  Labels are renumbered to 0..K-1 in order
    of first appearance by node ordinal.  The node visiting order inside each
    pass is shuffled from ``seed``, so runs are reproducible but different
    seeds can land in different local optima.
    """
    adj = np.asarray(adj, dtype=np.float64)
    require_nonneg(adj, "adjacency")
    require_symmetric(adj, "adjacency")
    n = adj.shape[0]
    rng = np.random.default_rng(seed)

    nbrs = []
    for i in range(n):
        row = adj[i]
        js = np.nonzero(row)[0]
        nbrs.append([(int(j), float(row[j])) for j in js if j != i])
    self_w = np.diag(adj).astype(np.float64).copy()
    k = adj.sum(axis=1) + np.diag(adj)
    m2 = float(k.sum())
    if m2 <= 0.0:
        raise EmptyGraphError("graph has no edges")

    labels = np.arange(n)
    while True:
        com, moved = _one_level(nbrs, self_w, k, m2, rng)
        if not moved:
            break
        # mapping[i] is the compact community id of current node i, so the
        # original-node labels project through it directly
        nbrs, self_w, mapping = _aggregate(nbrs, self_w, com)
        labels = mapping[labels]
        k = np.array([self_w[i] * 2.0 + sum(w for _, w in nbrs[i])
                      for i in range(len(nbrs))])
        if len(nbrs) == 1:
            break

    # renumber by first appearance
    remap = {}
    out = np.empty(n, dtype=np.int64)
    for i, c in enumerate(labels):
        if c not in remap:
            remap[c] = len(remap)
        out[i] = remap[c]
    return out, modularity(adj, out)


@dataclass(frozen=True)
class ModularityReport:
    """Per-layer Louvain summary across repeated runs."""

    label: str
    num_communities: tuple
    modularity: tuple

    @property
    def mean_communities(self) -> float:
        return float(np.mean(self.num_communities))

    @property
    def mean_modularity(self) -> float:
        return float(np.mean(self.modularity))


def estimate_k(net: MultiplexNetwork, runs: int = 10, seed: int = 0):
    """Bracket the community count for a hybrid network.

    Runs Louvain ``runs`` times per layer (directed layers symmetrized),
    averages the community counts, and returns
    ``((lo, hi), [ModularityReport, ...])`` where lo/hi are the floor/ceil of
    the min/max layer means widened by 2, clipped to at least 2.  Layers with
    no edges are skipped with a warning.
    """
    mats = [(label, (a + a.T) / 2.0) for label, a in net.directed]
    mats += [(label, x) for label, x in net.symmetric]
    reports = []
    for li, (label, sym) in enumerate(mats):
        if sym.sum() + np.diag(sym).sum() <= 0.0:
            log.warning("layer %r has no edges; skipping in k estimate", label)
            continue
        counts, mods = [], []
        for r in range(runs):
            run_seed = int(np.random.SeedSequence((seed, li, r)).generate_state(1)[0])
            lab, q = louvain(sym, seed=run_seed)
            counts.append(int(lab.max()) + 1)
            mods.append(q)
        reports.append(ModularityReport(label=label, num_communities=tuple(counts),
                                        modularity=tuple(mods)))
    if not reports:
        raise EmptyGraphError("no layer has any edges; cannot estimate k")
    means = [r.mean_communities for r in reports]
    lo = max(2, math.floor(min(means)) - 2)
    hi = max(lo, math.ceil(max(means)) + 2)
    return (lo, hi), reports
