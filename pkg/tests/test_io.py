import json

import numpy as np
import pytest

from crossnet import io
from crossnet.errors import (
    AsymmetricInputError,
    IoFailureError,
    NegativeWeightError,
)
from crossnet.model import CommunityAssignment, UserIndex


def test_fmt9_fixed_width_fraction():
    assert io.fmt9(1.0) == "1.000000000"
    assert io.fmt9(0.5) == "0.500000000"
    assert io.fmt9(1e-12) == "0.000000000"


def test_edge_tsv_round_trip(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("# comment\na\tb\t0.5\nb\tc\n")
    edges = io.read_edge_tsv(p)
    assert edges == [("a", "b", 0.5), ("b", "c", 1.0)]
    io.save_edge_tsv(p, [("x", "y", 0.25), ("a", "b", 1.0)])
    assert p.read_text() == "a\tb\t1.000000000\nx\ty\t0.250000000\n"


def test_edge_tsv_negative_weight(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("a\tb\t-1.0\n")
    with pytest.raises(NegativeWeightError):
        io.read_edge_tsv(p)


def test_edge_tsv_missing_file(tmp_path):
    with pytest.raises(IoFailureError):
        io.read_edge_tsv(tmp_path / "nope.tsv")


def test_dense_csv_round_trip(tmp_path):
    p = tmp_path / "m.csv"
    ids = ["a", "b", "c"]
    M = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 1.0]])
    io.save_dense_csv(p, ids, M)
    ids2, M2 = io.read_dense_csv(p)
    assert ids2 == ids
    np.testing.assert_allclose(M2, M, atol=1e-9)


def test_dense_csv_rejects_asymmetry(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b\n1,0.5\n0.9,1\n")
    with pytest.raises(AsymmetricInputError):
        io.read_dense_csv(p)


def test_load_multiplex_union_and_fixed_universe(tmp_path):
    d = tmp_path / "rel.tsv"
    d.write_text("a\tb\t1.0\n")
    s = tmp_path / "sim.tsv"
    s.write_text("b\tc\t0.5\nc\tb\t0.5\n")
    net = io.load_multiplex(directed=[("rel", d)], symmetric=[("sim", s)])
    assert net.users.ids == ("a", "b", "c")
    assert net.directed[0][1][0, 1] == 1.0
    assert net.symmetric[0][1][1, 2] == 0.5

    net2 = io.load_multiplex(
        directed=[("rel", d)], symmetric=[("sim", s)],
        users=["a", "b", "c", "d"],
    )
    assert net2.n == 4


def test_symmetric_triples_disagreement(tmp_path):
    s = tmp_path / "sim.tsv"
    s.write_text("a\tb\t0.5\nb\ta\t0.7\n")
    with pytest.raises(AsymmetricInputError):
        io.load_multiplex(directed=[], symmetric=[("sim", s)])


def test_load_single_network_sums_duplicates(tmp_path):
    p = tmp_path / "n.tsv"
    p.write_text("a\tb\t1.0\na\tb\t2.0\nb\tc\t1.0\n")
    g = io.load_single_network("net", p)
    w = {(g.users.id(int(i)), g.users.id(int(j))): wt
         for i, j, wt in zip(g.src, g.dst, g.weight)}
    assert w[("a", "b")] == 3.0
    assert g.n_edges == 2


def test_assignment_round_trip(tmp_path):
    users = UserIndex.from_ids(["a", "b", "c"])
    M = np.array([[1.0, 0.0], [0.0, 1.0], [0.25, 0.75]])
    a = CommunityAssignment(membership=M)
    base = tmp_path / "assign"
    io.save_assignment(a, users, base)
    assert (tmp_path / "assign.csv").exists()
    assert (tmp_path / "assign.json").exists()
    a2, users2 = io.load_assignment(base)
    assert users2.ids == users.ids
    np.testing.assert_allclose(a2.membership, M, atol=1e-9)
    # csv carries hardened labels
    lines = (tmp_path / "assign.csv").read_text().strip().splitlines()
    assert lines[0] == "user_id,label"
    assert lines[1:] == ["a,0", "b,1", "c,1"]


def test_assignment_round_trip_survives_quantization(tmp_path):
    # a soft k=4 row whose entries each round DOWN ~5e-10, so the written
    # row sums to 1 - 2e-9: loading must renormalize instead of rejecting
    users = UserIndex.from_ids(["a", "b"])
    drifty = np.array([0.099999999, 0.199999999, 0.299999999, 0.400000001])
    drifty = drifty + 4.99e-10
    M = np.vstack([drifty, [1.0, 0.0, 0.0, 0.0]])
    a = CommunityAssignment(membership=M)
    base = tmp_path / "assign"
    io.save_assignment(a, users, base)
    doc = json.loads((tmp_path / "assign.json").read_text())
    written = np.array(doc["membership"][0], dtype=np.float64)
    assert abs(written.sum() - 1.0) > 1e-9  # the drift really happened
    a2, _ = io.load_assignment(base)
    np.testing.assert_allclose(a2.membership.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_array_equal(a2.labels, a.labels)


def test_similarity_tsv_round_trip(tmp_path):
    users = UserIndex.from_ids(["a", "b", "c"])
    p = tmp_path / "sim.tsv"
    io.save_similarity_tsv(p, users, [(0, 2, 0.5), (0, 1, 1.0)])
    users2, pairs = io.load_similarity_tsv(p, users)
    assert users2 is users
    assert pairs == [(0, 1, 1.0), (0, 2, 0.5)]


def test_trace_csv(tmp_path):
    p = tmp_path / "trace.csv"
    io.save_trace_csv(p, [3.0, 2.5])
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "iter,objective"
    assert lines[1].startswith("0,3.0")


def test_write_json_deterministic(tmp_path):
    p = tmp_path / "x.json"
    io.write_json(p, {"b": 1, "a": [1, 2]})
    q = tmp_path / "y.json"
    io.write_json(q, {"a": [1, 2], "b": 1})
    assert p.read_bytes() == q.read_bytes()
