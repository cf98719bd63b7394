"""Planted-truth synthetic data.

Generates a hybrid multiplex network over overlapping users plus paired
single networks that embed the same users among extras, so every pipeline
stage can run against known ground truth.  Directed layers are
planted-partition draws (within-block probability p_in, across p_out, weight
1); symmetric layers draw similarities around sim_in/sim_out means.  Single
networks reuse the planted labels for the shared users and give each extra
user a uniformly chosen community.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError
from .model import MultiplexNetwork, SingleNetwork, UserIndex


def _as_per_layer(value, count: int, name: str) -> tuple:
    if np.isscalar(value):
        return (float(value),) * count
    vec = tuple(float(v) for v in value)
    if len(vec) != count:
        raise InvalidSpecError(f"{name} has {len(vec)} entries for {count} layers")
    return vec


@dataclass(frozen=True)
class SynthSpec:
    """Generator parameters.

    ``p_in``/``p_out`` apply to the hybrid directed layers (scalar or one
    value per layer); single networks reuse them unless ``single_p_in`` /
    ``single_p_out`` override.  ``noise`` flips that fraction of directed
    edge indicators after planting.
    """

    n_overlap: int = 120
    k_true: int = 4
    p: int = 3
    q: int = 1
    p_in: object = 0.3
    p_out: object = 0.02
    sim_in: float = 0.6
    sim_out: float = 0.1
    sim_std: float = 0.1
    n_networks: int = 2
    extras_per_network: int = 80
    single_p_in: object = None
    single_p_out: object = None
    noise: float = 0.0
    skew: float = 0.0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.k_true < 2:
            raise InvalidSpecError("k_true must be >= 2")
        if self.n_overlap < self.k_true:
            raise InvalidSpecError("need at least k_true overlapping users")
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise InvalidSpecError("need at least one layer (p + q >= 1)")
        pin = _as_per_layer(self.p_in, self.p, "p_in")
        pout = _as_per_layer(self.p_out, self.p, "p_out")
        for a, b in zip(pin, pout):
            if not (0.0 <= b < a <= 1.0):
                raise InvalidSpecError(
                    f"need 0 <= p_out < p_in <= 1, got p_in={a}, p_out={b}")
        if not (0.0 <= self.sim_out < self.sim_in <= 1.0):
            raise InvalidSpecError("need 0 <= sim_out < sim_in <= 1")
        if self.sim_std < 0:
            raise InvalidSpecError("sim_std must be >= 0")
        if not 0.0 <= self.noise < 0.5:
            raise InvalidSpecError("noise must be in [0, 0.5)")
        if self.skew < 0:
            raise InvalidSpecError("skew must be >= 0")
        if self.n_networks < 0 or self.extras_per_network < 0:
            raise InvalidSpecError("counts must be nonnegative")

    def hybrid_probs(self) -> tuple:
        return (_as_per_layer(self.p_in, self.p, "p_in"),
                _as_per_layer(self.p_out, self.p, "p_out"))

    def single_probs(self) -> tuple:
        pin = self.p_in if self.single_p_in is None else self.single_p_in
        pout = self.p_out if self.single_p_out is None else self.single_p_out
        pin = float(pin) if np.isscalar(pin) else float(pin[0])
        pout = float(pout) if np.isscalar(pout) else float(pout[0])
        if not (0.0 <= pout < pin <= 1.0):
            raise InvalidSpecError("single-network probabilities out of order")
        return pin, pout


@dataclass(frozen=True)
class GroundTruth:
    """Planted labels for the overlap and for each single network.

    ``overlap_labels`` aligns with the hybrid UserIndex; ``network_labels``
    aligns each array with that network's own UserIndex.  All labels are in
    [0, k_true).
    """

    k_true: int
    overlap_ids: tuple
    overlap_labels: np.ndarray
    network_labels: dict = field(default_factory=dict)


def _block_sizes(n: int, k: int, skew: float) -> list:
    """Balanced sizes (+-1) by default; skew tilts them geometrically."""
    if skew == 0.0:
        return [n // k + (1 if i < n % k else 0) for i in range(k)]
    w = (1.0 + skew) ** np.arange(k)
    raw = n * w / w.sum()
    sizes = np.maximum(np.floor(raw).astype(int), 1)
    # distribute the remainder by largest fractional part, index order on ties
    order = np.argsort(-(raw - np.floor(raw)), kind="stable")
    i = 0
    while sizes.sum() < n:
        sizes[order[i % k]] += 1
        i += 1
    while sizes.sum() > n:
        j = int(np.argmax(sizes))
        sizes[j] -= 1
    return sizes.tolist()


def _planted_directed(rng, labels, p_in: float, p_out: float,
                      noise: float) -> np.ndarray:
    same = labels[:, None] == labels[None, :]
    P = np.where(same, p_in, p_out)
    A = rng.random(P.shape) < P
    flip = rng.random(P.shape) < noise
    A ^= flip
    np.fill_diagonal(A, False)
    return A.astype(np.float64)


def generate(spec: SynthSpec):
    """Build (MultiplexNetwork, [SingleNetwork, ...], GroundTruth)."""
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.n_overlap
    k = spec.k_true
    sizes = _block_sizes(n, k, spec.skew)
    overlap_labels = np.repeat(np.arange(k), sizes)

    width = max(4, len(str(n - 1)))
    overlap_ids = tuple(f"u{i:0{width}d}" for i in range(n))
    hybrid_users = UserIndex(overlap_ids)  # zero-padded ids sort in order

    pin, pout = spec.hybrid_probs()
    directed = []
    for t in range(spec.p):
        A = _planted_directed(rng, overlap_labels, pin[t], pout[t], spec.noise)
        directed.append((f"rel{t}", A))
    symmetric = []
    for g in range(spec.q):
        same = overlap_labels[:, None] == overlap_labels[None, :]
        mean = np.where(same, spec.sim_in, spec.sim_out)
        M = np.clip(rng.normal(mean, spec.sim_std), 0.0, 1.0)
        X = np.triu(M, 1)
        X = X + X.T
        np.fill_diagonal(X, 1.0)
        symmetric.append((f"sim{g}", X))
    net = MultiplexNetwork(users=hybrid_users, directed=tuple(directed),
                           symmetric=tuple(symmetric))

    s_pin, s_pout = spec.single_probs()
    networks = []
    network_labels = {}
    ew = max(4, len(str(max(spec.extras_per_network - 1, 0))))
    for w in range(spec.n_networks):
        label = f"net{w}"
        extra_ids = tuple(f"{label}x{i:0{ew}d}"
                          for i in range(spec.extras_per_network))
        gen_ids = overlap_ids + extra_ids
        extra_labels = rng.integers(0, k, size=spec.extras_per_network)
        gen_labels = np.concatenate([overlap_labels, extra_labels])
        A = _planted_directed(rng, gen_labels, s_pin, s_pout, spec.noise)
        users = UserIndex.from_ids(gen_ids)
        # generation order != index order (extras sort first); remap
        perm = np.array([users.ordinal(uid) for uid in gen_ids])
        src_gen, dst_gen = np.nonzero(A)
        network = SingleNetwork(label=label, users=users,
                                src=perm[src_gen], dst=perm[dst_gen],
                                weight=np.ones(src_gen.size))
        networks.append(network)
        lab = np.empty(len(users), dtype=np.int64)
        lab[perm] = gen_labels
        network_labels[label] = lab

    truth = GroundTruth(k_true=k, overlap_ids=overlap_ids,
                        overlap_labels=overlap_labels,
                        network_labels=network_labels)
    return net, networks, truth


def hide_overlap(truth: GroundTruth, fraction: float, seed: int = 0,
                 labels: np.ndarray = None):
    """Split overlapping users into visible seeds and hidden users.

    Per community, round(fraction * size) users (half rounds up) stay
    visible; the rest are hidden.  ``labels`` overrides the planted labels,
    letting the caller split along a solver's stub communities instead.
    Returns sorted ordinal arrays (visible, hidden).
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidSpecError("fraction must be in (0, 1)")
    lab = truth.overlap_labels if labels is None else np.asarray(labels)
    rng = np.random.default_rng(seed)
    visible, hidden = [], []
    for t in np.unique(lab):
        members = np.flatnonzero(lab == t)
        perm = rng.permutation(members)
        n_vis = int(np.floor(fraction * len(members) + 0.5))
        visible.extend(perm[:n_vis].tolist())
        hidden.extend(perm[n_vis:].tolist())
    return np.array(sorted(visible), dtype=np.int64), \
        np.array(sorted(hidden), dtype=np.int64)
