"""Grow stub communities inside each single network.

A stub community found on the hybrid network names a seed set of overlapping
users.  Inside every reconstructed similarity graph, each non-seed user gets
a connection strength against the seed set (the mean, over seeds, of the
strongest-path similarity product), and users above the admission
threshold Rec_t join the grown community.  Per-network results are then
merged into cross-network communities, members tagged with the networks they
came from.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptySeedError, InvalidSpecError
from .model import CommunityAssignment, UserIndex
from .reconstruct import SimilarityGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecPolicy:
    """Admission threshold policy: fixed value or per-stub score percentile.

    The percentile form takes the given percentile of the nonzero
    cl-strength scores of the stub's non-seed users in that network, so the
    cut adapts to each stub's score scale.
    """

    kind: str = "percentile"
    value: float = 80.0

    def __post_init__(self):
        if self.kind not in ("percentile", "fixed"):
            raise InvalidSpecError(f"unknown rec policy kind {self.kind!r}")
        if self.kind == "percentile" and not 0.0 <= self.value <= 100.0:
            raise InvalidSpecError("percentile must be in [0, 100]")
        if self.kind == "fixed" and self.value < 0.0:
            raise InvalidSpecError("fixed threshold must be >= 0")

    @classmethod
    def parse(cls, text: str) -> "RecPolicy":
        """Parse 'percentile:P' or 'fixed:V'."""
        kind, sep, val = text.partition(":")
        if not sep:
            raise InvalidSpecError(
                f"rec policy {text!r} must look like percentile:80 or fixed:0.2")
        try:
            return cls(kind=kind.strip(), value=float(val))
        except ValueError as exc:
            raise InvalidSpecError(f"bad rec policy value {val!r}") from exc

    def threshold(self, scores: np.ndarray) -> float:
        """Realized Rec_t for one stub given its non-seed score vector."""
        if self.kind == "fixed":
            return float(self.value)
        nz = scores[scores > 0.0]
        if nz.size == 0:
            return 0.0
        return float(np.percentile(nz, self.value))


@dataclass(frozen=True)
class StubCommunitySet:
    """Seed sets over the overlapping-user index, plus per-network mappings.

    ``communities[t]`` is a frozenset of hybrid ordinals; ``mapping[label]``
    sends hybrid ordinals to that network's ordinals for the users that exist
    there (identity of user ids defines the overlap).
    """

    users: UserIndex
    communities: tuple
    mapping: dict

    def __post_init__(self):
        seen: set = set()
        for comm in self.communities:
            if seen & comm:
                raise InvalidSpecError("stub communities must be disjoint")
            seen |= comm
        for o in seen:
            if not 0 <= o < len(self.users):
                raise DimensionMismatchError(f"seed ordinal {o} out of range")

    @classmethod
    def from_assignment(cls, assignment: CommunityAssignment,
                        users: UserIndex, network_users: dict,
                        visible=None) -> "StubCommunitySet":
        """Build seeds from hardened labels.

        ``network_users`` maps network label -> UserIndex.  ``visible``
        optionally restricts seeds to a subset of hybrid ordinals (the
        implicit-overlap protocol hides the rest); unassigned users (label
        -1) never seed anything.
        """
        if assignment.n != len(users):
            raise DimensionMismatchError("assignment rows != user count")
        vis = None if visible is None else set(int(v) for v in visible)
        comms = []
        for t in range(assignment.k):
            members = np.flatnonzero(assignment.labels == t)
            if vis is not None:
                members = [int(m) for m in members if int(m) in vis]
            comms.append(frozenset(int(m) for m in members))
        mapping = {}
        for label, nu in network_users.items():
            mapping[label] = {o: nu.ordinal(uid)
                              for o, uid in enumerate(users.ids) if uid in nu}
        return cls(users=users, communities=tuple(comms), mapping=mapping)

    @property
    def k(self) -> int:
        return len(self.communities)


@dataclass(frozen=True)
class NetworkExtension:
    """Grown communities in one network: frozensets of network ordinals."""

    label: str
    users: UserIndex
    communities: tuple
    rec_values: tuple


@dataclass(frozen=True)
class ExtensionResult:
    """Per-network grown communities plus the merged cross-network view.

    ``merged[t]`` maps user id -> sorted tuple of network labels where that
    user sits in community t (the provenance tags).
    """

    per_network: tuple
    merged: tuple


def connection_strength(g: SimilarityGraph, i: int, j: int) -> float:
    """NS between two users: exp(-dist) under edge length -ln(sim).

    1 when i == j, 0 when disconnected; equals the best product of
    similarities along any path, so one strong edge beats a weak chain.
    """
    return float(g.strength_row(i)[j])


def cl_strength(g: SimilarityGraph, i: int, seed) -> float:
    """Connection strength of user i against a seed set: mean NS over seeds."""
    seed = sorted(set(int(s) for s in seed))
    if not seed:
        raise EmptySeedError("seed set is empty")
    return float(np.mean([g.strength_row(s)[i] for s in seed]))


def _cl_matrix(g: SimilarityGraph, seeds) -> np.ndarray:
    """Mean NS row over present seed members (vectorized cl_strength)."""
    rows = [g.strength_row(s) for s in seeds]
    return np.mean(rows, axis=0)


def extend(g: SimilarityGraph, label: str, stubs: StubCommunitySet,
           rec: RecPolicy = RecPolicy()) -> NetworkExtension:
    """Grow every stub community inside one network.

    Seeds are mapped through the stub set's id mapping; a stub with no
    present seed stays seeds-only here (logged, not fatal).  Non-seed users
    join community t when their cl-strength strictly exceeds Rec_t; a user
    may join several communities.
    """
    if label not in stubs.mapping:
        raise DimensionMismatchError(f"no user mapping for network {label!r}")
    mp = stubs.mapping[label]
    n = g.n
    communities = []
    rec_values = []
    for t, comm in enumerate(stubs.communities):
        seeds = sorted(mp[o] for o in comm if o in mp)
        if not seeds:
            log.warning("stub %d has no seed present in network %r; "
                        "staying seeds-only", t, label)
            communities.append(frozenset())
            rec_values.append(0.0)
            continue
        cl = _cl_matrix(g, seeds)
        non_seed = np.ones(n, dtype=bool)
        non_seed[seeds] = False
        rec_t = rec.threshold(cl[non_seed])
        admitted = np.flatnonzero(non_seed & (cl > rec_t))
        communities.append(frozenset(int(x) for x in admitted) | frozenset(seeds))
        rec_values.append(rec_t)
    return NetworkExtension(label=label, users=g.users,
                            communities=tuple(communities),
                            rec_values=tuple(rec_values))


def merge(per_network) -> ExtensionResult:
    """Integrate per-network grown communities into cross-network ones.

    Members are keyed by user id; a user present in several networks'
    community t appears once with all its network tags.
    """
    per_network = tuple(per_network)
    if not per_network:
        raise InvalidSpecError("nothing to merge")
    ks = {len(ext.communities) for ext in per_network}
    if len(ks) != 1:
        raise DimensionMismatchError("networks extended with different k")
    k = ks.pop()
    merged = []
    for t in range(k):
        tags: dict = {}
        for ext in per_network:
            for o in sorted(ext.communities[t]):
                uid = ext.users.id(o)
                tags.setdefault(uid, []).append(ext.label)
        merged.append({uid: tuple(sorted(nets)) for uid, nets in tags.items()})
    return ExtensionResult(per_network=per_network, merged=tuple(merged))
