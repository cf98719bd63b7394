"""Comparison methods: k-means, ConcatNMF, ColNMF, MultiNMF.

All four cluster the hybrid network's overlapping users and emit the same
CommunityAssignment shape as the joint solver, so the evaluation harness does
not care which method produced a result.  The NMF baselines factor
symmetrized views with standard multiplicative rules; k-means and ConcatNMF
work on a fused single matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDataError,
    InvalidSpecError,
    NumericalBlowupError,
)
from .model import (
    CommunityAssignment,
    MultiplexNetwork,
    UserIndex,
    require_nonneg,
)
from .solver import FLOOR

_EPS = 1e-12


@dataclass(frozen=True)
class FusedNetwork:
    """Weighted sum of all hybrid layers, directed ones symmetrized."""

    users: UserIndex
    fused: np.ndarray

    @classmethod
    def from_multiplex(cls, net: MultiplexNetwork, weights=None,
                       include_symmetric: bool = True) -> "FusedNetwork":
        layers = [(a + a.T) / 2.0 for _, a in net.directed]
        if include_symmetric:
            layers += [x for _, x in net.symmetric]
        if not layers:
            raise InvalidSpecError("no layers to fuse")
        if weights is None:
            weights = [1.0] * len(layers)
        if len(weights) != len(layers):
            raise InvalidSpecError(
                f"{len(weights)} fusion weights for {len(layers)} layers")
        fused = np.zeros_like(layers[0])
        for w, layer in zip(weights, layers):
            fused += float(w) * layer
        require_nonneg(fused, "fused matrix")
        return cls(users=net.users, fused=fused)

    @property
    def n(self) -> int:
        return len(self.users)


def _views(net: MultiplexNetwork, lambda_v):
    """Symmetrized view list shared by ColNMF/MultiNMF, with weights."""
    views = [(a + a.T) / 2.0 for _, a in net.directed]
    views += [x for _, x in net.symmetric]
    if not views:
        raise InvalidSpecError("no views to factor")
    if lambda_v is None:
        lam = [1.0] * len(views)
    elif np.isscalar(lambda_v):
        lam = [float(lambda_v)] * len(views)
    else:
        lam = [float(v) for v in lambda_v]
        if len(lam) != len(views):
            raise InvalidSpecError(
                f"{len(lam)} view weights for {len(views)} views")
    return views, lam


def _check_finite(*arrays) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NumericalBlowupError("non-finite factor entry")


def kmeans_baseline(fn: FusedNetwork, k: int, seed: int = 0,
                    max_iter: int = 300) -> CommunityAssignment:
    """Lloyd's algorithm with k-means++ seeding on the fused matrix rows."""
    if k < 2:
        raise InvalidSpecError("k must be >= 2")
    X = fn.fused
    n = X.shape[0]
    if np.unique(X, axis=0).shape[0] < k:
        raise DegenerateDataError(f"fewer than {k} distinct rows")
    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centers = np.empty((k, n), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = X[first]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        probs = d2 / d2.sum()
        idx = int(rng.choice(n, p=probs))
        centers[c] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[c]) ** 2, axis=1))

    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(dists, axis=1)
        for c in range(k):
            if not np.any(new_labels == c):
                # steal the point farthest from its center
                worst = int(np.argmax(dists[np.arange(n), new_labels]))
                new_labels[worst] = c
                dists[worst] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = X[labels == c].mean(axis=0)

    membership = np.zeros((n, k), dtype=np.float64)
    membership[np.arange(n), labels] = 1.0
    return CommunityAssignment(membership=membership, labels=labels)


def concat_nmf(fn: FusedNetwork, k: int, seed: int = 0, max_iter: int = 300,
               rel_tol: float = 1e-6) -> CommunityAssignment:
    """Symmetric NMF of the fused matrix: X ~ W W^T, sqrt-form updates."""
    if k < 2:
        raise InvalidSpecError("k must be >= 2")
    X = fn.fused
    rng = np.random.default_rng(seed)
    W = 1.0 - rng.random((X.shape[0], k))
    prev = None
    for _ in range(max_iter):
        num = X @ W
        den = W @ (W.T @ W)
        W = np.maximum(W * np.sqrt(num / (den + _EPS)), FLOOR)
        _check_finite(W)
        R = X - W @ W.T
        obj = float(np.sum(R * R))
        if prev is not None and abs(prev - obj) / max(abs(prev), 1e-300) < rel_tol:
            break
        prev = obj
    return CommunityAssignment.from_membership(W)


def col_nmf(net: MultiplexNetwork, k: int, lambda_v=None, seed: int = 0,
            max_iter: int = 300, rel_tol: float = 1e-6) -> CommunityAssignment:
    """Collective factorization: every view shares one result matrix S.

    Minimizes sum_v lambda_v ||A_v - U_v S^T||_F^2 by alternating plain-ratio
    multiplicative updates.
    """
    if k < 2:
        raise InvalidSpecError("k must be >= 2")
    views, lam = _views(net, lambda_v)
    n = views[0].shape[0]
    rng = np.random.default_rng(seed)
    U = [1.0 - rng.random((n, k)) for _ in views]
    S = 1.0 - rng.random((n, k))
    prev = None
    for _ in range(max_iter):
        StS = S.T @ S
        for v, A in enumerate(views):
            U[v] = U[v] * ((A @ S) / (U[v] @ StS + _EPS))
        num = np.zeros_like(S)
        den = np.zeros((k, k))
        for v, A in enumerate(views):
            num += lam[v] * (A.T @ U[v])
            den += lam[v] * (U[v].T @ U[v])
        S = S * (num / (S @ den + _EPS))
        _check_finite(S, *U)
        obj = 0.0
        for v, A in enumerate(views):
            R = A - U[v] @ S.T
            obj += lam[v] * float(np.sum(R * R))
        if prev is not None and abs(prev - obj) / max(abs(prev), 1e-300) < rel_tol:
            break
        prev = obj
    return CommunityAssignment.from_membership(S)


def multi_nmf(net: MultiplexNetwork, k: int, lambda_v=None, seed: int = 0,
              max_iter: int = 300, rel_tol: float = 1e-6) -> CommunityAssignment:
    """Per-view factorization with a consensus matrix.

    Minimizes sum_v ||A_v - U_v V_v^T||_F^2 + lambda_v ||V_v - S||_F^2; the
    consensus step sets S to the lambda-weighted mean of the V_v, which is
    its exact minimizer.
    """
    if k < 2:
        raise InvalidSpecError("k must be >= 2")
    views, lam = _views(net, lambda_v)
    n = views[0].shape[0]
    rng = np.random.default_rng(seed)
    U = [1.0 - rng.random((n, k)) for _ in views]
    V = [1.0 - rng.random((n, k)) for _ in views]
    lam_sum = sum(lam)
    if lam_sum <= 0.0:
        raise InvalidSpecError("lambda weights must not all be zero")
    S = sum(lv * Vv for lv, Vv in zip(lam, V)) / lam_sum
    prev = None
    for _ in range(max_iter):
        for v, A in enumerate(views):
            U[v] = U[v] * ((A @ V[v]) / (U[v] @ (V[v].T @ V[v]) + _EPS))
            num = A.T @ U[v] + lam[v] * S
            den = V[v] @ (U[v].T @ U[v]) + lam[v] * V[v]
            V[v] = V[v] * (num / (den + _EPS))
        S = sum(lv * Vv for lv, Vv in zip(lam, V)) / lam_sum
        _check_finite(S, *U, *V)
        obj = 0.0
        for v, A in enumerate(views):
            R = A - U[v] @ V[v].T
            D = V[v] - S
            obj += float(np.sum(R * R)) + lam[v] * float(np.sum(D * D))
        if prev is not None and abs(prev - obj) / max(abs(prev), 1e-300) < rel_tol:
            break
        prev = obj
    return CommunityAssignment.from_membership(S)
