import dataclasses

import numpy as np
import pytest

from crossnet.errors import InvalidSpecError
from crossnet.synth import GroundTruth, SynthSpec, generate, hide_overlap


def test_defaults_validate_and_generate():
    spec = SynthSpec()
    spec.validate()
    net, networks, truth = generate(spec)
    assert net.n == 120
    assert (net.p, net.q) == (3, 1)
    assert len(networks) == 2
    assert truth.k_true == 4
    assert len(truth.overlap_labels) == 120


def test_balanced_block_sizes():
    spec = SynthSpec(n_overlap=10, k_true=3, p=1, q=0, n_networks=0)
    _, _, truth = generate(spec)
    sizes = np.bincount(truth.overlap_labels)
    assert sorted(sizes.tolist()) == [3, 3, 4]


def test_skewed_block_sizes_partition():
    spec = SynthSpec(n_overlap=100, k_true=4, skew=1.0, p=1, q=0, n_networks=0)
    _, _, truth = generate(spec)
    sizes = np.bincount(truth.overlap_labels, minlength=4)
    assert sizes.sum() == 100
    assert sizes.min() >= 1
    assert sizes.max() > sizes.min()


def test_block_diagonal_when_p_out_zero():
    spec = SynthSpec(n_overlap=40, k_true=4, p=2, q=0, p_in=0.5, p_out=0.0,
                     noise=0.0, n_networks=0)
    net, _, truth = generate(spec)
    same = truth.overlap_labels[:, None] == truth.overlap_labels[None, :]
    for _, A in net.directed:
        assert np.all(A[~same] == 0.0)


def test_within_block_count_matches_expectation():
    # directed planted partition: E[within-block edges] = p_in * sum b(b-1)
    spec = SynthSpec(n_overlap=60, k_true=3, p=1, q=0, p_in=0.3, p_out=0.05,
                     n_networks=0)
    sizes = [20, 20, 20]
    pairs = sum(b * (b - 1) for b in sizes)
    expected = 0.3 * pairs
    trials = 100
    counts = []
    for s in range(trials):
        net, _, truth = generate(dataclasses.replace(spec, rng_seed=s))
        A = net.directed[0][1]
        same = truth.overlap_labels[:, None] == truth.overlap_labels[None, :]
        np.fill_diagonal(same, False)
        counts.append(float(A[same].sum()))
    sigma_single = np.sqrt(pairs * 0.3 * 0.7)
    sigma_mean = sigma_single / np.sqrt(trials)
    assert abs(np.mean(counts) - expected) <= 3.0 * sigma_mean


def test_realistic_scale_edge_calibration():
    # probabilities solved from the expected-count formula so the three
    # directed layers land near 982 / 2065 / 6243 edges over 1575 users
    n, k = 1575, 4
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    pairs = sum(b * (b - 1) for b in sizes)
    targets = (982.0, 2065.0, 6243.0)
    p_in = tuple(t / pairs for t in targets)
    spec = SynthSpec(n_overlap=n, k_true=k, p=3, q=1,
                     p_in=p_in, p_out=0.0, n_networks=0, rng_seed=7)
    net, _, _ = generate(spec)
    assert net.n == 1575
    for (label, A), t, p in zip(net.directed, targets, p_in):
        got = float(A.sum())
        sigma = np.sqrt(pairs * p * (1.0 - p))
        assert abs(got - t) <= 4.0 * sigma, (label, got, t)


def test_symmetric_layer_shape():
    spec = SynthSpec(n_overlap=50, k_true=2, p=0, q=2, n_networks=0)
    net, _, _ = generate(spec)
    for _, X in net.symmetric:
        np.testing.assert_array_equal(X, X.T)
        assert np.all(np.diag(X) == 1.0)
        assert X.min() >= 0.0 and X.max() <= 1.0


def test_similarity_means_separate_blocks():
    spec = SynthSpec(n_overlap=80, k_true=2, p=0, q=1, sim_in=0.7,
                     sim_out=0.1, sim_std=0.05, n_networks=0)
    net, _, truth = generate(spec)
    X = net.symmetric[0][1].copy()
    np.fill_diagonal(X, np.nan)
    same = truth.overlap_labels[:, None] == truth.overlap_labels[None, :]
    within = np.nanmean(X[same])
    across = np.nanmean(X[~same])
    assert within == pytest.approx(0.7, abs=0.05)
    assert across == pytest.approx(0.1, abs=0.05)


def test_single_networks_embed_overlap_with_consistent_labels():
    spec = SynthSpec(n_overlap=30, k_true=3, p=1, q=1, n_networks=2,
                     extras_per_network=20)
    net, networks, truth = generate(spec)
    for g in networks:
        assert len(g.users) == 50
        lab = truth.network_labels[g.label]
        for o, uid in enumerate(truth.overlap_ids):
            assert uid in g.users
            assert lab[g.users.ordinal(uid)] == truth.overlap_labels[o]


def test_single_network_probability_overrides():
    spec = SynthSpec(n_overlap=40, k_true=2, p=1, q=0, p_in=0.3, p_out=0.02,
                     n_networks=1, extras_per_network=0,
                     single_p_in=1.0, single_p_out=0.0)
    _, networks, truth = generate(spec)
    g = networks[0]
    lab = truth.network_labels[g.label]
    # p_in = 1, p_out = 0: the network is exactly the complete block graph
    same_count = sum(int(b * (b - 1)) for b in np.bincount(lab))
    assert g.n_edges == same_count
    assert all(lab[s] == lab[d] for s, d in zip(g.src, g.dst))


def test_generation_is_deterministic():
    spec = SynthSpec(n_overlap=25, k_true=2, rng_seed=5)
    net1, nets1, _ = generate(spec)
    net2, nets2, _ = generate(spec)
    for (_, a), (_, b) in zip(net1.directed, net2.directed):
        np.testing.assert_array_equal(a, b)
    for g1, g2 in zip(nets1, nets2):
        np.testing.assert_array_equal(g1.src, g2.src)
        np.testing.assert_array_equal(g1.weight, g2.weight)
    net3, _, _ = generate(dataclasses.replace(spec, rng_seed=6))
    assert not np.array_equal(net1.directed[0][1], net3.directed[0][1])


def test_spec_validation_errors():
    for bad in (
        SynthSpec(k_true=1),
        SynthSpec(n_overlap=2, k_true=4),
        SynthSpec(p=0, q=0),
        SynthSpec(p_in=0.2, p_out=0.3),
        SynthSpec(sim_in=0.1, sim_out=0.5),
        SynthSpec(noise=0.7),
        SynthSpec(skew=-1.0),
        SynthSpec(extras_per_network=-1),
    ):
        with pytest.raises(InvalidSpecError):
            bad.validate()


# --- hiding protocol ---------------------------------------------------------

def _truth_with_sizes(sizes):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    ids = tuple(f"u{i:04d}" for i in range(labels.size))
    return GroundTruth(k_true=len(sizes), overlap_ids=ids,
                       overlap_labels=labels)


def test_hide_overlap_two_thirds_of_thirty():
    truth = _truth_with_sizes([30])
    visible, hidden = hide_overlap(truth, 2.0 / 3.0, seed=0)
    assert len(visible) == 20
    assert len(hidden) == 10


def test_hide_overlap_small_community_rounds_half_up():
    truth = _truth_with_sizes([2])
    visible, hidden = hide_overlap(truth, 2.0 / 3.0, seed=0)
    # 2/3 * 2 = 1.33 -> 1 visible under round-half-up
    assert len(visible) == 1
    assert len(hidden) == 1
    truth3 = _truth_with_sizes([3])
    visible, hidden = hide_overlap(truth3, 0.5, seed=0)
    # 0.5 * 3 = 1.5 rounds up to 2 visible
    assert len(visible) == 2


def test_hide_overlap_partitions_everyone():
    truth = _truth_with_sizes([13, 7, 22])
    visible, hidden = hide_overlap(truth, 2.0 / 3.0, seed=3)
    both = np.concatenate([visible, hidden])
    assert sorted(both.tolist()) == list(range(42))
    assert set(visible.tolist()).isdisjoint(hidden.tolist())
    # per-community proportions within one user of the fraction
    for t, size in enumerate([13, 7, 22]):
        members = np.flatnonzero(truth.overlap_labels == t)
        n_vis = len(set(members.tolist()) & set(visible.tolist()))
        assert abs(n_vis - 2.0 / 3.0 * size) <= 1.0


def test_hide_overlap_custom_labels_and_seeding():
    truth = _truth_with_sizes([10, 10])
    other = np.array([0] * 5 + [1] * 10 + [2] * 5)
    v1, h1 = hide_overlap(truth, 0.5, seed=1, labels=other)
    assert len(v1) + len(h1) == 20
    v2, h2 = hide_overlap(truth, 0.5, seed=1, labels=other)
    np.testing.assert_array_equal(v1, v2)
    v3, _ = hide_overlap(truth, 0.5, seed=2, labels=other)
    assert not np.array_equal(v1, v3)
    with pytest.raises(InvalidSpecError):
        hide_overlap(truth, 1.0)
