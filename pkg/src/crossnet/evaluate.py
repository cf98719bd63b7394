"""Metrics and the end-to-end experimental pipeline.

Three metrics: TF-IDF cosine similarity between the texts a community
produces on different networks, the implicit-overlap discovery ratio P_t
(hidden users reappearing in the grown community of the same index), and NMI
against planted labels when ground truth exists.  ``run_pipeline`` chains
generate/load -> solve -> reconstruct -> extend -> merge -> metrics, once per
k value, and also measures the random-assignment null for the discovery
ratio.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import io as cio
from .errors import (
    EmptyCorpusError,
    EmptyHiddenSetError,
    InvalidSpecError,
    LengthMismatchError,
)
from .extend import (
    ExtensionResult,
    RecPolicy,
    StubCommunitySet,
    extend,
    merge,
)
from .kestimate import estimate_k
from .model import CommunityAssignment
from .reconstruct import SimilarityGraph, reconstruct
from .solver import SolverConfig, solve
from .synth import SynthSpec, generate, hide_overlap

log = logging.getLogger(__name__)


# -- metrics ------------------------------------------------------------------

def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information, arithmetic-mean normalization.

    1 for identical partitions up to relabeling; 0 when either side has zero
    entropy (the all-in-one convention) or the labelings are independent.
    """
    la = np.asarray(labels_a)
    lb = np.asarray(labels_b)
    if la.shape != lb.shape or la.ndim != 1:
        raise LengthMismatchError(
            f"label vectors differ in shape: {la.shape} vs {lb.shape}")
    if la.size == 0:
        raise LengthMismatchError("empty label vectors")
    n = la.size
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    contingency = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(contingency, (ia, ib), 1.0)
    pxy = contingency / n
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    hx = -np.sum(px[px > 0] * np.log(px[px > 0]))
    hy = -np.sum(py[py > 0] * np.log(py[py > 0]))
    if hx == 0.0 or hy == 0.0:
        return 0.0
    mask = pxy > 0
    outer = px[:, None] * py[None, :]
    mi = np.sum(pxy[mask] * np.log(pxy[mask] / outer[mask]))
    return float(mi / (0.5 * (hx + hy)))


def _pool_tokens(corpus) -> Counter:
    """Pool a corpus (strings or token lists) into one lowercase bag."""
    bag: Counter = Counter()
    for doc in corpus:
        if isinstance(doc, str):
            bag.update(doc.lower().split())
        else:
            bag.update(str(tok).lower() for tok in doc)
    return bag


def text_similarity(corpus_a, corpus_b) -> float:
    """TF-IDF cosine between two pooled user-document collections.

    Each side becomes one bag of terms (tf = raw count); idf over the two
    pooled documents is ln((1+N)/(1+df)) + 1 with N = 2.
    """
    bag_a = _pool_tokens(corpus_a)
    bag_b = _pool_tokens(corpus_b)
    if not bag_a or not bag_b:
        raise EmptyCorpusError("corpus with no tokens")
    vocab = sorted(set(bag_a) | set(bag_b))
    va = np.zeros(len(vocab))
    vb = np.zeros(len(vocab))
    for idx, term in enumerate(vocab):
        df = (term in bag_a) + (term in bag_b)
        idf = math.log(3.0 / (1.0 + df)) + 1.0
        va[idx] = bag_a.get(term, 0) * idf
        vb[idx] = bag_b.get(term, 0) * idf
    denom = np.linalg.norm(va) * np.linalg.norm(vb)
    if denom == 0.0:
        return 0.0
    return float(np.dot(va, vb) / denom)


def discovery_ratio(hidden_by_stub: dict, result: ExtensionResult,
                    mode: str = "all") -> dict:
    """P_t per stub community: hidden users found in the grown communities.

    ``hidden_by_stub`` maps stub index -> iterable of hidden user ids.  A
    hidden user counts as discovered when it appears in community t of every
    network where its account exists (``mode="all"``) or of at least one
    (``mode="any"``).  Stubs with no hidden users are skipped; if none has
    any, EmptyHiddenSet is raised.
    """
    if mode not in ("all", "any"):
        raise InvalidSpecError(f"unknown discovery mode {mode!r}")
    ratios = {}
    for t, hidden in sorted(hidden_by_stub.items()):
        hidden = list(hidden)
        if not hidden:
            log.warning("stub %d has no hidden users; P_t undefined", t)
            continue
        tags = result.merged[t] if t < len(result.merged) else {}
        found = 0
        for uid in hidden:
            present = [ext.label for ext in result.per_network
                       if uid in ext.users]
            if not present:
                continue
            got = tags.get(uid, ())
            hit = (all(lbl in got for lbl in present) if mode == "all"
                   else any(lbl in got for lbl in present))
            found += bool(hit)
        ratios[t] = min(1.0, found / len(hidden))
    if not ratios:
        raise EmptyHiddenSetError("no stub community has hidden users")
    return ratios


# -- pipeline -----------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    """Per-k outcome of one method: per-community metrics plus aggregates."""

    method: str
    k: int
    text_similarity: dict = field(default_factory=dict)
    discovery: dict = field(default_factory=dict)
    nmi: float = None
    null_discovery: float = None

    @property
    def mean_text_similarity(self):
        if not self.text_similarity:
            return None
        return float(np.mean(list(self.text_similarity.values())))

    @property
    def mean_discovery(self):
        if not self.discovery:
            return None
        return float(np.mean(list(self.discovery.values())))


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one experiment needs.

    Exactly one of ``synth`` / ``hybrid_files`` supplies the hybrid network.
    ``network_files`` lists (label, path) follow TSVs for the single
    networks (ignored in synth mode, which generates its own).  ``corpora``
    maps network label -> {user_id: document or [documents]}.
    """

    synth: SynthSpec = None
    hybrid_files: dict = None
    network_files: tuple = ()
    corpora: dict = None
    k: int = None
    sweep: tuple = None
    estimate_runs: int = 10
    solver: dict = field(default_factory=dict)
    threshold: float = 0.0
    rec_policy: RecPolicy = RecPolicy()
    visible_fraction: float = 2.0 / 3.0
    do_discovery: bool = True
    discovery_mode: str = "all"
    null_trials: int = 10
    seed: int = 0
    jobs: int = 1

    def validate(self) -> None:
        if (self.synth is None) == (self.hybrid_files is None):
            raise InvalidSpecError(
                "exactly one of synth spec or hybrid input files is required")
        if self.k is None and self.sweep is None and self.estimate_runs < 1:
            raise InvalidSpecError("need k, a sweep range, or estimate runs")
        if self.sweep is not None:
            lo, hi = self.sweep
            if lo < 2 or hi < lo:
                raise InvalidSpecError(f"bad sweep range {self.sweep}")
        if not 0.0 < self.visible_fraction < 1.0:
            raise InvalidSpecError("visible_fraction must be in (0, 1)")
        if self.null_trials < 0 or self.jobs < 1:
            raise InvalidSpecError("null_trials must be >= 0 and jobs >= 1")


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts))
               .generate_state(1)[0])


def _materialize(cfg: PipelineConfig):
    """Resolve inputs: (net, [SingleNetwork], truth or None)."""
    if cfg.synth is not None:
        spec = cfg.synth
        if spec.rng_seed != cfg.seed:
            spec = replace(spec, rng_seed=cfg.seed)
        net, networks, truth = generate(spec)
        return net, networks, truth
    hf = cfg.hybrid_files
    net = cio.load_multiplex(directed=hf.get("directed", ()),
                             symmetric=hf.get("symmetric", ()),
                             users=hf.get("users"))
    networks = [cio.load_single_network(label, path)
                for label, path in cfg.network_files]
    return net, networks, None


def _community_text_similarity(result: ExtensionResult, corpora: dict) -> dict:
    """Mean pairwise text similarity per merged community.

    For each community and each pair of networks, compares the pooled
    documents of that community's members on one network against the other;
    communities with no comparable pair are omitted.
    """
    out = {}
    by_label = {ext.label: ext for ext in result.per_network}
    labels = sorted(lbl for lbl in by_label if lbl in corpora)
    for t in range(len(result.merged)):
        sims = []
        for ai in range(len(labels)):
            for bi in range(ai + 1, len(labels)):
                la, lb = labels[ai], labels[bi]
                docs = []
                for lbl in (la, lb):
                    ext = by_label[lbl]
                    corp = corpora[lbl]
                    bag = []
                    for o in sorted(ext.communities[t]):
                        doc = corp.get(ext.users.id(o))
                        if doc is None:
                            continue
                        bag.extend(doc if isinstance(doc, list) else [doc])
                    docs.append(bag)
                if docs[0] and docs[1]:
                    sims.append(text_similarity(docs[0], docs[1]))
        if sims:
            out[t] = float(np.mean(sims))
    return out


def _extend_all(graphs: dict, stubs: StubCommunitySet,
                rec: RecPolicy) -> ExtensionResult:
    parts = [extend(graphs[label], label, stubs, rec)
             for label in sorted(graphs)]
    return merge(parts)


def _discovery_with_null(net, graphs, assignment, cfg, k, truth):
    """Implicit-overlap protocol: hide, extend from visible, score, null."""
    labels = assignment.labels
    assigned = labels >= 0
    split_seed = _derived_seed(cfg.seed, 41, k)
    visible, hidden = hide_overlap(truth, cfg.visible_fraction,
                                   seed=split_seed, labels=labels)
    visible = visible[assigned[visible]]
    hidden = hidden[assigned[hidden]]
    if hidden.size == 0:
        return None, None, None
    network_users = {lbl: graphs[lbl].users for lbl in graphs}

    def run(assign_labels):
        memb = np.zeros((net.n, k))
        ok = assign_labels >= 0
        memb[np.flatnonzero(ok), assign_labels[ok]] = 1.0
        asn = CommunityAssignment(membership=memb, labels=assign_labels)
        stubs = StubCommunitySet.from_assignment(
            asn, net.users, network_users, visible=visible)
        result = _extend_all(graphs, stubs, cfg.rec_policy)
        hidden_by_stub = {
            t: [net.users.id(int(h)) for h in hidden if assign_labels[h] == t]
            for t in range(k)}
        try:
            ratios = discovery_ratio(hidden_by_stub, result,
                                     mode=cfg.discovery_mode)
        except EmptyHiddenSetError:
            return None, result
        return ratios, result

    ratios, result = run(labels)
    null_means = []
    for trial in range(cfg.null_trials):
        rng = np.random.default_rng(_derived_seed(cfg.seed, 43, k, trial))
        rand_labels = rng.integers(0, k, size=net.n).astype(np.int64)
        null_ratios, _ = run(rand_labels)
        if null_ratios:
            null_means.append(float(np.mean(list(null_ratios.values()))))
    null = float(np.mean(null_means)) if null_means else None
    return ratios, null, result


def _run_one_k(net, graphs, truth, cfg: PipelineConfig, k: int):
    """Solve at one k and push the result through extension and metrics."""
    solver_cfg = SolverConfig(k=k, rng_seed=_derived_seed(cfg.seed, 11, k),
                              **cfg.solver)
    _, assignment, trace = solve(net, solver_cfg)
    nmi_val = None
    if truth is not None:
        nmi_val = nmi(truth.overlap_labels, assignment.labels)

    ratios, null, result = None, None, None
    if graphs and cfg.do_discovery and len(graphs) >= 2:
        ratios, null, result = _discovery_with_null(
            net, graphs, assignment, cfg, k, truth)
    if result is None and graphs:
        network_users = {lbl: graphs[lbl].users for lbl in graphs}
        stubs = StubCommunitySet.from_assignment(assignment, net.users,
                                                 network_users)
        result = _extend_all(graphs, stubs, cfg.rec_policy)

    sims = {}
    if result is not None and cfg.corpora:
        sims = _community_text_similarity(result, cfg.corpora)

    report = EvaluationReport(method="cmn_nmf", k=k,
                              text_similarity=sims,
                              discovery=ratios or {},
                              nmi=nmi_val,
                              null_discovery=null)
    artifacts = {"assignment": assignment, "trace": trace,
                 "extension": result}
    return report, artifacts


def _k_list(cfg: PipelineConfig, net) -> list:
    if cfg.k is not None:
        return [int(cfg.k)]
    if cfg.sweep is not None:
        lo, hi = cfg.sweep
        return list(range(int(lo), int(hi) + 1))
    (lo, hi), _ = estimate_k(net, runs=cfg.estimate_runs, seed=cfg.seed)
    log.info("estimated k range: %d..%d", lo, hi)
    return list(range(lo, hi + 1))


def run_pipeline(cfg: PipelineConfig):
    """Execute the full experiment; returns (reports, artifacts).

    ``reports`` has one EvaluationReport per k (ascending).  ``artifacts``
    carries the per-k assignment/trace/extension objects plus the
    reconstructed similarity graphs, for callers that persist outputs.  In
    synth mode ``cfg.seed`` overrides the spec's own rng_seed, so one flag
    pins the whole run.
    """
    cfg.validate()
    net, networks, truth = _materialize(cfg)
    graphs = {}
    for single in networks:
        log.info("reconstructing %s (%d users, %d edges)",
                 single.label, single.n, single.n_edges)
        graphs[single.label] = reconstruct(single, cfg.threshold)
    ks = _k_list(cfg, net)

    results = []
    if cfg.jobs > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_run_one_k, net, graphs, truth, cfg, k)
                       for k in ks]
            results = [f.result() for f in futures]
    else:
        for k in ks:
            log.info("pipeline: k = %d", k)
            results.append(_run_one_k(net, graphs, truth, cfg, k))

    reports = [r for r, _ in results]
    artifacts = {
        "k_list": ks,
        "net": net,
        "truth": truth,
        "graphs": graphs,
        "per_k": {k: art for k, (_, art) in zip(ks, results)},
    }
    return reports, artifacts
