"""File formats and loaders.

Edge lists are tab-separated ``src<TAB>dst<TAB>weight`` with ``#`` comments.
Symmetric layers come either as mirrored TSV triples or as a dense CSV whose
header row carries the user ids.  Assignments are written twice: a
``user_id,label`` CSV and a JSON document with the soft membership.  All
numeric output uses a fixed 9-fractional-digit format so repeated runs are
byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricInputError,
    DimensionMismatchError,
    IoFailureError,
    NegativeWeightError,
    UnknownUserError,
)
from .model import CommunityAssignment, MultiplexNetwork, SingleNetwork, UserIndex

log = logging.getLogger(__name__)


def fmt9(x: float) -> str:
    """Fixed 9-fractional-digit decimal; normalizes negative zero."""
    v = float(x)
    if v == 0.0:
        v = 0.0
    return f"{v:.9f}"


# -- low-level readers --------------------------------------------------------

def _open_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc


def read_edge_tsv(path) -> list:
    """Parse a TSV edge list into (src, dst, weight) string/float triples."""
    triples = []
    for ln, line in enumerate(_open_lines(path), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            parts.append("1")
        if len(parts) != 3:
            raise IoFailureError(f"{path}:{ln}: expected src<TAB>dst<TAB>weight")
        try:
            w = float(parts[2])
        except ValueError as exc:
            raise IoFailureError(f"{path}:{ln}: bad weight {parts[2]!r}") from exc
        if not np.isfinite(w):
            raise IoFailureError(f"{path}:{ln}: non-finite weight")
        if w < 0.0:
            raise NegativeWeightError(f"{path}:{ln}: negative weight {w}")
        triples.append((parts[0], parts[1], w))
    return triples


def read_dense_csv(path):
    """Parse a dense symmetric CSV: header row of user ids, value rows below.

    Returns (ids, matrix).  Symmetry is checked to 1e-9 and then enforced
    exactly by averaging with the transpose.
    """
    lines = _open_lines(path)
    rows = [r for r in csv.reader(lines) if r]
    if len(rows) < 2:
        raise IoFailureError(f"{path}: dense CSV needs a header and value rows")
    ids = [c.strip() for c in rows[0]]
    n = len(ids)
    if len(rows) != n + 1:
        raise IoFailureError(f"{path}: expected {n} value rows, got {len(rows) - 1}")
    try:
        mat = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise IoFailureError(f"{path}: non-numeric matrix entry") from exc
    if mat.shape != (n, n):
        raise IoFailureError(f"{path}: ragged rows, expected {n} columns")
    if not np.all(np.isfinite(mat)):
        raise IoFailureError(f"{path}: non-finite matrix entry")
    if mat.size and mat.min() < 0.0:
        raise NegativeWeightError(f"{path}: negative matrix entry")
    dev = np.abs(mat - mat.T).max()
    if dev > 1e-9:
        raise AsymmetricInputError(
            f"{path}: matrix deviates from symmetry by {dev:.3e}")
    mat = (mat + mat.T) / 2.0
    return ids, mat


def _read_symmetric_triples(path) -> dict:
    """Mirrored TSV triples -> {(id_lo, id_hi): value} with consistency check."""
    entries = {}
    for a, b, v in read_edge_tsv(path):
        key = (a, b) if a <= b else (b, a)
        if key in entries and abs(entries[key] - v) > 1e-9:
            raise AsymmetricInputError(
                f"{path}: entries for ({a}, {b}) disagree: "
                f"{entries[key]} vs {v}")
        if key in entries:
            entries[key] = (entries[key] + v) / 2.0
        else:
            entries[key] = v
    return entries


# -- network loaders ----------------------------------------------------------

def load_multiplex(directed=(), symmetric=(), users=None) -> MultiplexNetwork:
    """Assemble a hybrid network from layer files.

    ``directed`` and ``symmetric`` are sequences of (label, path).  Symmetric
    paths ending in ``.csv`` are read as dense matrices, anything else as
    mirrored triples.  When ``users`` is given it fixes the id universe and
    any edge mentioning an outside id raises; otherwise the universe is the
    lexicographically sorted union of ids seen across all files.
    """
    d_raw = [(label, read_edge_tsv(path)) for label, path in directed]
    s_raw = []
    for label, path in symmetric:
        if str(path).endswith(".csv"):
            s_raw.append((label, "dense", read_dense_csv(path)))
        else:
            s_raw.append((label, "triples", _read_symmetric_triples(path)))

    if users is not None:
        index = UserIndex.from_ids(users)
    else:
        seen = set()
        for _, triples in d_raw:
            for a, b, _ in triples:
                seen.add(a)
                seen.add(b)
        for _, kind, payload in s_raw:
            if kind == "dense":
                seen.update(payload[0])
            else:
                for a, b in payload:
                    seen.add(a)
                    seen.add(b)
        index = UserIndex.from_ids(seen)

    n = len(index)
    d_layers = []
    for label, triples in d_raw:
        a = np.zeros((n, n), dtype=np.float64)
        for s, d, w in triples:
            a[index.ordinal(s), index.ordinal(d)] += w
        d_layers.append((label, a))

    s_layers = []
    for label, kind, payload in s_raw:
        x = np.zeros((n, n), dtype=np.float64)
        if kind == "dense":
            ids, mat = payload
            ords = [index.ordinal(u) for u in ids]
            x[np.ix_(ords, ords)] = mat
        else:
            for (a, b), v in payload.items():
                i, j = index.ordinal(a), index.ordinal(b)
                x[i, j] = v
                x[j, i] = v
        s_layers.append((label, x))

    return MultiplexNetwork(users=index, directed=tuple(d_layers),
                            symmetric=tuple(s_layers))


def load_single_network(label: str, path, users=None) -> SingleNetwork:
    """Load one full network from a TSV edge list (duplicates summed)."""
    triples = read_edge_tsv(path)
    if users is not None:
        index = UserIndex.from_ids(users)
    else:
        seen = set()
        for a, b, _ in triples:
            seen.add(a)
            seen.add(b)
        index = UserIndex.from_ids(seen)
    agg = {}
    for a, b, w in triples:
        key = (index.ordinal(a), index.ordinal(b))
        agg[key] = agg.get(key, 0.0) + w
    if agg:
        src, dst = (np.array(t, dtype=np.int64) for t in zip(*agg.keys()))
        weight = np.array(list(agg.values()), dtype=np.float64)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        weight = np.zeros(0, dtype=np.float64)
    return SingleNetwork(label=label, users=index, src=src, dst=dst,
                         weight=weight)


# -- writers ------------------------------------------------------------------

def _write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def save_edge_tsv(path, triples) -> None:
    """Write (src_id, dst_id, weight) triples, sorted, 9-digit weights."""
    rows = sorted((str(a), str(b), w) for a, b, w in triples)
    _write_text(path, "".join(f"{a}\t{b}\t{fmt9(w)}\n" for a, b, w in rows))


def save_dense_csv(path, ids, mat) -> None:
    mat = np.asarray(mat, dtype=np.float64)
    lines = [",".join(ids)]
    for row in mat:
        lines.append(",".join(fmt9(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def save_trace_csv(path, objectives) -> None:
    """Objective trace: header then one (iter, objective) row per iteration."""
    lines = ["iter,objective"]
    for i, obj in enumerate(objectives):
        lines.append(f"{i},{obj:.12e}")
    _write_text(path, "\n".join(lines) + "\n")


def save_assignment(assignment: CommunityAssignment, users: UserIndex,
                    path) -> None:
    """Write ``<path>.csv`` (user_id,label) and ``<path>.json`` (membership).

    ``path`` is the basename; extensions are appended.  Unassigned rows write
    label -1.
    """
    if assignment.n != len(users):
        raise DimensionMismatchError("assignment rows != user count")
    base = str(path)
    csv_lines = ["user_id,label"]
    for i, uid in enumerate(users.ids):
        csv_lines.append(f"{uid},{int(assignment.labels[i])}")
    _write_text(base + ".csv", "\n".join(csv_lines) + "\n")

    rows = []
    for row in assignment.membership:
        rows.append("[" + ", ".join(fmt9(v) for v in row) + "]")
    users_json = json.dumps(list(users.ids))
    body = (
        "{\n"
        f'  "k": {assignment.k},\n'
        '  "membership": [\n    ' + ",\n    ".join(rows) + "\n  ],\n"
        f'  "users": {users_json}\n'
        "}\n"
    )
    _write_text(base + ".json", body)


def load_assignment(path):
    """Read an assignment written by :func:`save_assignment`.

    Accepts the basename or either concrete file; returns
    (CommunityAssignment, UserIndex).  Near-1 membership rows are
    renormalized to undo the writer's nine-digit quantization.
    """
    base = str(path)
    for ext in (".json", ".csv"):
        if base.endswith(ext):
            base = base[: -len(ext)]
    try:
        with open(base + ".json", "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailureError(f"cannot read {base}.json: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoFailureError(f"{base}.json: invalid JSON: {exc}") from exc
    for key in ("k", "membership", "users"):
        if key not in doc:
            raise IoFailureError(f"{base}.json: missing key {key!r}")
    membership = np.asarray(doc["membership"], dtype=np.float64)
    if membership.ndim != 2 or membership.shape[1] != int(doc["k"]):
        raise IoFailureError(f"{base}.json: membership shape mismatch")
    # nine-digit rows can drift off 1 by up to k * 5e-10, which trips the
    # assignment invariant for k >= 3; snap near-1 rows back and leave
    # anything genuinely unnormalized for the validation below
    sums = membership.sum(axis=1, keepdims=True)
    near = np.abs(sums - 1.0) <= 1e-6
    membership = np.where(near,
                          membership / np.where(sums == 0.0, 1.0, sums),
                          membership)
    index = UserIndex(doc["users"])
    if membership.shape[0] != len(index):
        raise IoFailureError(f"{base}.json: membership rows != users")
    labels = None
    csv_path = Path(base + ".csv")
    if csv_path.exists():
        labels = np.zeros(len(index), dtype=np.int64)
        lines = _open_lines(csv_path)
        if not lines or lines[0].strip() != "user_id,label":
            raise IoFailureError(f"{csv_path}: missing user_id,label header")
        seen = 0
        for line in lines[1:]:
            line = line.strip()
            if not line:
                continue
            uid, _, lab = line.rpartition(",")
            try:
                labels[index.ordinal(uid)] = int(lab)
            except ValueError as exc:
                raise IoFailureError(f"{csv_path}: bad label {lab!r}") from exc
            seen += 1
        if seen != len(index):
            raise IoFailureError(f"{csv_path}: {seen} rows for {len(index)} users")
    assignment = CommunityAssignment(membership=membership, labels=labels)
    return assignment, index


def save_similarity_tsv(path, users: UserIndex, edges) -> None:
    """Write an undirected similarity graph as id pairs with 9-digit weights."""
    triples = []
    for i, j, s in edges:
        a, b = users.id(int(i)), users.id(int(j))
        if b < a:
            a, b = b, a
        triples.append((a, b, s))
    save_edge_tsv(path, triples)


def load_similarity_tsv(path, users=None):
    """Read a similarity graph TSV; returns (UserIndex, [(i, j, sim), ...])."""
    triples = read_edge_tsv(path)
    if users is None:
        seen = set()
        for a, b, _ in triples:
            seen.add(a)
            seen.add(b)
        users = UserIndex.from_ids(seen)
    edges = []
    for a, b, s in triples:
        i, j = users.ordinal(a), users.ordinal(b)
        if i == j:
            raise IoFailureError(f"{path}: self-similarity for {a!r}")
        edges.append((min(i, j), max(i, j), s))
    edges.sort()
    return users, edges


def write_json(path, payload) -> None:
    """Stable JSON: sorted keys, 2-space indent, trailing newline."""
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoFailureError(f"{path}: invalid JSON: {exc}") from exc
