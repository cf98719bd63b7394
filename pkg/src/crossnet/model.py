"""Core data model.

Matrices are plain numpy ``float64`` arrays throughout; the helpers here
enforce the invariants (finiteness, nonnegativity, symmetry) at construction
boundaries instead of wrapping arrays in a class.  A hybrid network over the
overlapping users is a :class:`MultiplexNetwork` (dense layers), while each
full social network is a :class:`SingleNetwork` (edge lists, since these are
larger and sparse).  Soft community memberships travel as
:class:`CommunityAssignment`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricInputError,
    DimensionMismatchError,
    NegativeWeightError,
    UnknownUserError,
)

SYMMETRY_TOL = 1e-9


def require_finite(arr: np.ndarray, name: str = "matrix") -> None:
    if not np.all(np.isfinite(arr)):
        raise NegativeWeightError(f"{name} contains non-finite entries")


def require_nonneg(arr: np.ndarray, name: str = "matrix") -> None:
    require_finite(arr, name)
    if arr.size and arr.min() < 0.0:
        raise NegativeWeightError(f"{name} contains negative entries")


def require_symmetric(arr: np.ndarray, name: str = "matrix",
                      tol: float = SYMMETRY_TOL) -> None:
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} is not square: {arr.shape}")
    dev = np.abs(arr - arr.T).max() if arr.size else 0.0
    if dev > tol:
        raise AsymmetricInputError(
            f"{name} deviates from symmetry by {dev:.3e} (tol {tol:.0e})")


def as_dense(arr, name: str = "matrix") -> np.ndarray:
    """Coerce to a float64 C-contiguous array."""
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    require_finite(out, name)
    return out


class UserIndex:
    """Immutable bidirectional mapping between user ids and row ordinals.

    Ordinals follow the lexicographic order of the ids, so an index built from
    the same id set is always identical regardless of input order.
    """

    __slots__ = ("_ids", "_pos")

    def __init__(self, ids):
        ids = tuple(ids)
        if len(set(ids)) != len(ids):
            raise UnknownUserError("duplicate user ids in index")
        self._ids = ids
        self._pos = {u: i for i, u in enumerate(ids)}

    @classmethod
    def from_ids(cls, ids) -> "UserIndex":
        """Build an index from an arbitrary iterable, sorted lexicographically."""
        return cls(sorted(set(ids)))

    @property
    def ids(self) -> tuple:
        return self._ids

    def ordinal(self, user_id: str) -> int:
        try:
            return self._pos[user_id]
        except KeyError:
            raise UnknownUserError(f"unknown user id: {user_id!r}") from None

    def id(self, ordinal: int) -> str:
        return self._ids[ordinal]

    def __contains__(self, user_id) -> bool:
        return user_id in self._pos

    def __len__(self) -> int:
        return len(self._ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, UserIndex) and self._ids == other._ids

    def __hash__(self):
        return hash(self._ids)

    def __repr__(self) -> str:
        return f"UserIndex({len(self._ids)} users)"


@dataclass(frozen=True)
class MultiplexNetwork:
    """Hybrid network over the overlapping users.

    ``directed`` holds the asymmetric relation layers A^(t) (weights >= 0,
    zero diagonal not required), ``symmetric`` the similarity layers X^(g).
    All layers share the same user index and are dense n x n arrays.
    """

    users: UserIndex
    directed: tuple = ()    # tuple[(label, ndarray), ...]
    symmetric: tuple = ()   # tuple[(label, ndarray), ...]

    def __post_init__(self):
        n = len(self.users)
        object.__setattr__(self, "directed", tuple(self.directed))
        object.__setattr__(self, "symmetric", tuple(self.symmetric))
        for label, a in self.directed:
            if a.shape != (n, n):
                raise DimensionMismatchError(
                    f"layer {label!r} has shape {a.shape}, expected {(n, n)}")
            require_nonneg(a, f"layer {label!r}")
        for label, x in self.symmetric:
            if x.shape != (n, n):
                raise DimensionMismatchError(
                    f"layer {label!r} has shape {x.shape}, expected {(n, n)}")
            require_nonneg(x, f"layer {label!r}")
            require_symmetric(x, f"layer {label!r}")

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def p(self) -> int:
        return len(self.directed)

    @property
    def q(self) -> int:
        return len(self.symmetric)


@dataclass(frozen=True)
class SingleNetwork:
    """One full social network as a directed weighted edge list.

    Kept sparse: realistic networks are much larger than the overlap, and the
    expansion stage only ever walks adjacency lists.  Parallel arrays
    ``src``/``dst``/``weight`` are sorted by (src, dst) with duplicates summed.
    """

    label: str
    users: UserIndex
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        n = len(self.users)
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        w = np.asarray(self.weight, dtype=np.float64)
        if not (src.shape == dst.shape == w.shape):
            raise DimensionMismatchError("edge arrays have mismatched lengths")
        if src.size:
            if src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n:
                raise UnknownUserError("edge endpoint out of range")
        require_nonneg(w, f"network {self.label!r} weights")
        order = np.lexsort((dst, src))
        object.__setattr__(self, "src", src[order])
        object.__setattr__(self, "dst", dst[order])
        object.__setattr__(self, "weight", w[order])

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def undirected_neighbors(self) -> list:
        """Friend sets: in- and out-neighbors pooled, self loops dropped.

        Returns a list of sorted int64 arrays, one per user.
        """
        nbrs = [set() for _ in range(self.n)]
        for s, d in zip(self.src.tolist(), self.dst.tolist()):
            if s != d:
                nbrs[s].add(d)
                nbrs[d].add(s)
        return [np.fromiter(sorted(b), dtype=np.int64, count=len(b))
                for b in nbrs]


def harden(membership: np.ndarray) -> np.ndarray:
    """Collapse a soft membership matrix to integer labels.

    Ties go to the smallest community index (argmax semantics); rows that are
    entirely zero have no evidence at all and come back as label -1
    (unassigned).
    """
    m = np.asarray(membership, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatchError("membership must be 2-D")
    labels = np.argmax(m, axis=1).astype(np.int64)
    labels[np.all(m == 0.0, axis=1)] = -1
    return labels


@dataclass(frozen=True)
class CommunityAssignment:
    """Row-normalized soft membership plus hardened labels.

    Each membership row sums to 1 within 1e-9, except all-zero rows which stay
    zero and carry label -1.
    """

    membership: np.ndarray
    labels: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        m = as_dense(self.membership, "membership")
        require_nonneg(m, "membership")
        if m.ndim != 2:
            raise DimensionMismatchError("membership must be 2-D")
        labels = self.labels
        if labels is None:
            labels = harden(m)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (m.shape[0],):
            raise DimensionMismatchError("labels length != membership rows")
        sums = m.sum(axis=1)
        bad = (labels >= 0) & (np.abs(sums - 1.0) > 1e-9)
        if np.any(bad):
            raise DimensionMismatchError(
                "assigned membership rows must sum to 1")
        object.__setattr__(self, "membership", m)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_membership(cls, raw: np.ndarray) -> "CommunityAssignment":
        """Normalize a nonnegative factor row-wise; zero rows stay unassigned."""
        m = as_dense(raw, "membership")
        require_nonneg(m, "membership")
        sums = m.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            norm = np.where(sums > 0.0, m / np.where(sums == 0.0, 1.0, sums), 0.0)
        return cls(membership=norm)

    @property
    def n(self) -> int:
        return int(self.membership.shape[0])

    @property
    def k(self) -> int:
        return int(self.membership.shape[1])
