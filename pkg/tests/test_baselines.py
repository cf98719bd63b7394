import numpy as np
import pytest

from _datasets import planted_blocks
from crossnet.baselines import (
    FusedNetwork,
    col_nmf,
    concat_nmf,
    kmeans_baseline,
    multi_nmf,
)
from crossnet.errors import DegenerateDataError, InvalidSpecError
from crossnet.evaluate import nmi
from crossnet.model import MultiplexNetwork, UserIndex


def _planted_net(rng, n=80, k=4, p_in=0.35, p_out=0.03):
    A1, labels = planted_blocks(n, k, p_in, p_out, rng, directed=True)
    X, _ = planted_blocks(n, k, p_in, p_out, rng, directed=False)
    users = UserIndex.from_ids([f"u{i:03d}" for i in range(n)])
    net = MultiplexNetwork(users=users, directed=(("r", A1),),
                           symmetric=(("s", X),))
    return net, labels


def test_fused_network_symmetrizes_and_weights():
    users = UserIndex.from_ids(["a", "b"])
    A = np.array([[0.0, 2.0], [0.0, 0.0]])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    net = MultiplexNetwork(users=users, directed=(("r", A),),
                           symmetric=(("s", X),))
    fn = FusedNetwork.from_multiplex(net, weights=[2.0, 1.0])
    np.testing.assert_allclose(fn.fused, [[0.0, 3.0], [3.0, 0.0]])
    with pytest.raises(InvalidSpecError):
        FusedNetwork.from_multiplex(net, weights=[1.0])


def test_kmeans_separated_blocks():
    rng = np.random.default_rng(0)
    net, labels = _planted_net(rng)
    fn = FusedNetwork.from_multiplex(net)
    # k-means++ can seed two centers in one block; best of 3 restarts
    best = max(nmi(kmeans_baseline(fn, k=4, seed=s).labels, labels)
               for s in range(3))
    assert best >= 0.9
    a = kmeans_baseline(fn, k=4, seed=0)
    # hard assignment: one-hot rows
    assert set(np.unique(a.membership)) <= {0.0, 1.0}
    assert a.membership.sum() == a.n


def test_kmeans_rejects_degenerate_input():
    users = UserIndex.from_ids(["a", "b", "c"])
    X = np.ones((3, 3))
    net = MultiplexNetwork(users=users, directed=(), symmetric=(("s", X),))
    fn = FusedNetwork.from_multiplex(net)
    with pytest.raises(DegenerateDataError):
        kmeans_baseline(fn, k=2)


def test_kmeans_never_leaves_empty_clusters():
    rng = np.random.default_rng(5)
    net, _ = _planted_net(rng, n=30, k=2)
    fn = FusedNetwork.from_multiplex(net)
    a = kmeans_baseline(fn, k=6, seed=3)
    assert len(set(a.labels.tolist())) == 6


@pytest.mark.parametrize("method", [concat_nmf])
def test_concat_nmf_recovers_blocks(method):
    rng = np.random.default_rng(1)
    net, labels = _planted_net(rng)
    fn = FusedNetwork.from_multiplex(net)
    a = method(fn, k=4, seed=0, max_iter=500)
    assert nmi(a.labels, labels) >= 0.8


@pytest.mark.parametrize("method", [col_nmf, multi_nmf])
def test_view_nmfs_recover_blocks(method):
    rng = np.random.default_rng(2)
    net, labels = _planted_net(rng)
    a = method(net, k=4, seed=0, max_iter=500)
    assert nmi(a.labels, labels) >= 0.8


def test_all_methods_deterministic():
    rng = np.random.default_rng(3)
    net, _ = _planted_net(rng, n=40, k=2)
    fn = FusedNetwork.from_multiplex(net)
    for fn_call in (
        lambda: kmeans_baseline(fn, 2, seed=9),
        lambda: concat_nmf(fn, 2, seed=9, max_iter=50),
        lambda: col_nmf(net, 2, seed=9, max_iter=50),
        lambda: multi_nmf(net, 2, seed=9, max_iter=50),
    ):
        a1, a2 = fn_call(), fn_call()
        np.testing.assert_array_equal(a1.membership, a2.membership)


def test_nmf_baselines_validate_k_and_views():
    users = UserIndex.from_ids(["a", "b"])
    net = MultiplexNetwork(users=users, directed=(), symmetric=())
    with pytest.raises(InvalidSpecError):
        col_nmf(net, k=2)
    rng = np.random.default_rng(4)
    net2, _ = _planted_net(rng, n=20, k=2)
    with pytest.raises(InvalidSpecError):
        multi_nmf(net2, k=1)
    with pytest.raises(InvalidSpecError):
        col_nmf(net2, k=2, lambda_v=[1.0])  # 2 views, 1 weight
    with pytest.raises(InvalidSpecError):
        multi_nmf(net2, k=2, lambda_v=[0.0, 0.0])
