"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive: plain loops, no shared code with the
library, so agreement is meaningful.
"""

import math

import numpy as np


def naive_objective(A_list, X_list, U, H, W, S, a, b, c, d,
                    consistency="user", epsilon=1e-12):
    """Elementwise recomputation of the joint objective, loops only."""
    total = 0.0
    for t, A in enumerate(A_list):
        model = U[t] @ H[t] @ U[t].T
        for i in range(A.shape[0]):
            for j in range(A.shape[1]):
                total += a[t] * (A[i, j] - model[i, j]) ** 2
    for g, X in enumerate(X_list):
        model = W[g] @ W[g].T
        for i in range(X.shape[0]):
            for j in range(X.shape[1]):
                total += b[g] * (X[i, j] - model[i, j]) ** 2

    def normalized(M):
        out = np.zeros_like(M)
        for i in range(M.shape[0]):
            s = M[i].sum()
            if s > epsilon:
                out[i] = M[i] / s
        return out

    for t in range(len(A_list)):
        N = normalized(U[t])
        if consistency == "user":
            D = N @ N.T - S @ S.T
        else:
            D = N.T @ N - S.T @ S
        for i in range(D.shape[0]):
            for j in range(D.shape[1]):
                total += c[t] * D[i, j] ** 2
    for g in range(len(X_list)):
        N = normalized(W[g])
        if consistency == "user":
            D = N @ N.T - S @ S.T
        else:
            D = N.T @ N - S.T @ S
        for i in range(D.shape[0]):
            for j in range(D.shape[1]):
                total += d[g] * D[i, j] ** 2
    return total


def brute_reconstruct(undirected_neighbors, threshold=0.0):
    """All-pairs Jaccard + per-user top-ceil(sqrt) pruning, no inverted lists.

    ``undirected_neighbors`` is a list of neighbor id sets.  Returns the set
    of surviving (i, j) pairs with i < j and their similarities.
    """
    n = len(undirected_neighbors)
    nbrs = [set(x) for x in undirected_neighbors]
    cand = {}
    for i in range(n):
        for j in range(i + 1, n):
            inter = len(nbrs[i] & nbrs[j])
            if inter == 0:
                continue
            sim = inter / len(nbrs[i] | nbrs[j])
            if sim > threshold:
                cand[(i, j)] = sim
    per_user = [[] for _ in range(n)]
    for (i, j), s in cand.items():
        per_user[i].append((j, s))
        per_user[j].append((i, s))
    kept = set()
    for i in range(n):
        lst = sorted(per_user[i], key=lambda t: (-t[1], t[0]))
        top = math.ceil(math.sqrt(len(lst)))
        for j, _ in lst[:top]:
            kept.add((min(i, j), max(i, j)))
    return {e: cand[e] for e in kept}


def bellman_ford(n, edges, source):
    """Distances over undirected weighted edges [(i, j, length), ...]."""
    dist = [math.inf] * n
    dist[source] = 0.0
    both = [(i, j, w) for i, j, w in edges] + [(j, i, w) for i, j, w in edges]
    for _ in range(n - 1):
        changed = False
        for i, j, w in both:
            if dist[i] + w < dist[j]:
                dist[j] = dist[i] + w
                changed = True
        if not changed:
            break
    return np.array(dist)


def tfidf_cosine(tokens_a, tokens_b):
    """Direct TF-IDF cosine over two pooled token bags, N = 2 documents."""
    from collections import Counter

    bag_a = Counter(t.lower() for t in tokens_a)
    bag_b = Counter(t.lower() for t in tokens_b)
    vocab = sorted(set(bag_a) | set(bag_b))
    dot = norm_a = norm_b = 0.0
    for term in vocab:
        df = (term in bag_a) + (term in bag_b)
        idf = math.log((1 + 2) / (1 + df)) + 1.0
        va = bag_a.get(term, 0) * idf
        vb = bag_b.get(term, 0) * idf
        dot += va * vb
        norm_a += va * va
        norm_b += vb * vb
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / math.sqrt(norm_a * norm_b)


def pairwise_nmi(labels_a, labels_b):
    """NMI from explicit probability sums (arithmetic normalization)."""
    la = list(labels_a)
    lb = list(labels_b)
    n = len(la)
    ua = sorted(set(la))
    ub = sorted(set(lb))
    pxy = np.zeros((len(ua), len(ub)))
    for x, y in zip(la, lb):
        pxy[ua.index(x), ub.index(y)] += 1.0 / n
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    hx = -sum(p * math.log(p) for p in px if p > 0)
    hy = -sum(p * math.log(p) for p in py if p > 0)
    if hx == 0.0 or hy == 0.0:
        return 0.0
    mi = 0.0
    for i in range(len(ua)):
        for j in range(len(ub)):
            if pxy[i, j] > 0:
                mi += pxy[i, j] * math.log(pxy[i, j] / (px[i] * py[j]))
    return mi / (0.5 * (hx + hy))
