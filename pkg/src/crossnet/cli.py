"""Command-line entry point.

One subcommand per stage plus the full pipeline:

    synth        write a planted synthetic dataset
    estimate-k   bracket the community count via repeated Louvain
    solve        joint NMF on a hybrid network
    reconstruct  similarity graph from a follow-edge list
    extend       grow stub communities inside similarity graphs
    pipeline     generate/load -> solve -> reconstruct -> extend -> evaluate
    bench        compare the solver against the baselines

Configuration comes from a JSON file (--config) with flag overrides (flags
win).  Every run derives all randomness from --seed and writes a
manifest.json (resolved config + versions) beside its outputs, so reruns are
bitwise-identical.  Exit codes: 0 success, 1 usage, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import io as cio
from .baselines import (
    FusedNetwork,
    col_nmf,
    concat_nmf,
    kmeans_baseline,
    multi_nmf,
)
from .errors import DataError, NumericalError
from .evaluate import PipelineConfig, nmi, run_pipeline
from .extend import RecPolicy, StubCommunitySet
from .extend import extend as extend_op
from .extend import merge as merge_op
from .io import fmt9
from .kestimate import estimate_k
from .reconstruct import SimilarityGraph, reconstruct
from .solver import SolverConfig, solve
from .synth import SynthSpec, generate

log = logging.getLogger("crossnet")


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="crossnet",
                     description="Cross-network community detection")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p, out_default="crossnet_out"):
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config file; flags override its values")
        p.add_argument("--seed", type=int, default=None,
                       help="root seed for all randomness (default 0)")
        p.add_argument("--out", type=Path, default=Path(out_default),
                       help="output directory")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("synth", help="generate a planted dataset")
    common(p)

    p = sub.add_parser("estimate-k", help="bracket k via Louvain runs")
    common(p)
    p.add_argument("--runs", type=int, default=None,
                   help="Louvain runs per layer (default 10)")

    p = sub.add_parser("solve", help="joint NMF on a hybrid network")
    common(p)
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("reconstruct", help="similarity graph from follow edges")
    common(p)
    p.add_argument("--edges", type=Path, default=None,
                   help="follow-edge TSV (src<TAB>dst<TAB>weight)")
    p.add_argument("--threshold", type=float, default=None,
                   help="minimum Jaccard similarity, exclusive (default 0)")

    p = sub.add_parser("extend", help="grow stub communities in each network")
    common(p)
    p.add_argument("--rec-policy", type=str, default=None,
                   help="percentile:P or fixed:V (default percentile:80)")

    p = sub.add_parser("pipeline", help="full experiment")
    common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--sweep", type=str, default=None, metavar="A:B",
                   help="inclusive k range, e.g. 14:20")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--rec-policy", type=str, default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel workers across the k sweep (default 1)")

    p = sub.add_parser("bench", help="method comparison on one input")
    common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--runs", type=int, default=None,
                   help="seeds per method (default 5)")

    return parser


# -- config plumbing ----------------------------------------------------------

def _load_config(args) -> tuple:
    """Returns (config dict, base dir for relative paths)."""
    if args.config is None:
        return {}, Path.cwd()
    cfg = cio.load_json(args.config)
    if not isinstance(cfg, dict):
        raise DataError(f"{args.config}: config must be a JSON object")
    return cfg, args.config.parent


def _pick(flag, cfg: dict, key: str, default):
    """Flag wins, then config value, then default."""
    if flag is not None:
        return flag
    return cfg.get(key, default)


def _rel(base: Path, p) -> str:
    p = Path(p)
    return str(p if p.is_absolute() else base / p)


def _network_from_config(cfg: dict, base: Path):
    net_cfg = cfg.get("network")
    if not net_cfg:
        raise DataError("config lacks a 'network' section")
    directed = [(label, _rel(base, path))
                for label, path in net_cfg.get("directed", [])]
    symmetric = [(label, _rel(base, path))
                 for label, path in net_cfg.get("symmetric", [])]
    return cio.load_multiplex(directed=directed, symmetric=symmetric,
                              users=net_cfg.get("users"))


def _versions() -> dict:
    return {
        "crossnet": __version__,
        "numpy": np.__version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
    }


def _write_manifest(out: Path, command: str, config: dict, seed: int,
                    outputs) -> None:
    payload = {
        "command": command,
        "config": config,
        "outputs": sorted(str(o) for o in outputs),
        "seed": seed,
        "versions": _versions(),
    }
    cio.write_json(out / "manifest.json", payload)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


# -- subcommands ----------------------------------------------------------------

def _cmd_synth(args) -> int:
    cfg, base = _load_config(args)
    seed = _pick(args.seed, cfg, "seed", 0)
    spec_dict = dict(cfg.get("synth", {}))
    spec_dict["rng_seed"] = seed
    spec = SynthSpec(**spec_dict)
    net, networks, truth = generate(spec)

    out = args.out
    outputs = []
    for label, a in net.directed:
        name = f"{label}.tsv"
        src, dst = np.nonzero(a)
        triples = [(net.users.id(int(i)), net.users.id(int(j)), float(a[i, j]))
                   for i, j in zip(src, dst)]
        cio.save_edge_tsv(out / name, triples)
        outputs.append(name)
    for label, x in net.symmetric:
        name = f"{label}.csv"
        cio.save_dense_csv(out / name, list(net.users.ids), x)
        outputs.append(name)
    for single in networks:
        name = f"{single.label}.tsv"
        triples = [(single.users.id(int(s)), single.users.id(int(d)), float(w))
                   for s, d, w in zip(single.src, single.dst, single.weight)]
        cio.save_edge_tsv(out / name, triples)
        outputs.append(name)

    truth_doc = {
        "k_true": truth.k_true,
        "network_labels": {
            lbl: {uid: int(v) for uid, v in
                  zip(single.users.ids, truth.network_labels[lbl])}
            for lbl, single in ((s.label, s) for s in networks)
        },
        "overlap_labels": {uid: int(v) for uid, v in
                           zip(truth.overlap_ids, truth.overlap_labels)},
    }
    cio.write_json(out / "truth.json", truth_doc)
    outputs.append("truth.json")

    inputs_doc = {
        "network": {
            "directed": [[label, f"{label}.tsv"] for label, _ in net.directed],
            "symmetric": [[label, f"{label}.csv"] for label, _ in net.symmetric],
            "users": list(net.users.ids),
        },
        "networks": [[s.label, f"{s.label}.tsv"] for s in networks],
    }
    cio.write_json(out / "inputs.json", inputs_doc)
    outputs.append("inputs.json")

    _write_manifest(out, "synth", {"synth": spec_dict}, seed, outputs)
    log.info("wrote %d files to %s", len(outputs) + 1, out)
    return 0


def _cmd_estimate_k(args) -> int:
    cfg, base = _load_config(args)
    seed = _pick(args.seed, cfg, "seed", 0)
    runs = int(_pick(args.runs, cfg, "runs", 10))
    net = _network_from_config(cfg, base)
    (lo, hi), reports = estimate_k(net, runs=runs, seed=seed)

    out = args.out
    lines = ["layer,run,num_communities,modularity"]
    for rep in reports:
        for r, (cnt, q) in enumerate(zip(rep.num_communities, rep.modularity)):
            lines.append(f"{rep.label},{r},{cnt},{fmt9(q)}")
    (out / "estimate_k.csv").parent.mkdir(parents=True, exist_ok=True)
    (out / "estimate_k.csv").write_text("\n".join(lines) + "\n",
                                        encoding="utf-8")
    cio.write_json(out / "estimate_k.json", {
        "k_hi": hi,
        "k_lo": lo,
        "layers": [{"label": rep.label,
                    "mean_communities": rep.mean_communities,
                    "mean_modularity": rep.mean_modularity}
                   for rep in reports],
    })
    _write_manifest(out, "estimate-k", {"runs": runs}, seed,
                    ["estimate_k.csv", "estimate_k.json"])
    print(f"k range: {lo}..{hi}")
    return 0


def _solver_config(cfg: dict, k: int, seed: int) -> SolverConfig:
    solver_cfg = dict(cfg.get("solver", {}))
    solver_cfg.pop("k", None)
    solver_cfg["rng_seed"] = seed
    for key in ("a", "b", "c", "d"):
        if key in solver_cfg and isinstance(solver_cfg[key], list):
            solver_cfg[key] = tuple(solver_cfg[key])
    return SolverConfig(k=k, **solver_cfg)


def _cmd_solve(args) -> int:
    cfg, base = _load_config(args)
    seed = _pick(args.seed, cfg, "seed", 0)
    k = _pick(args.k, cfg, "k", None)
    if k is None:
        raise DataError("solve needs --k or a 'k' config entry")
    net = _network_from_config(cfg, base)
    solver_cfg = _solver_config(cfg, int(k), seed)
    _, assignment, trace = solve(net, solver_cfg)

    out = args.out
    cio.save_assignment(assignment, net.users, out / "assignment")
    cio.save_trace_csv(out / "trace.csv", trace.objective)
    resolved = {"k": int(k), "solver": {**asdict(solver_cfg)}}
    _write_manifest(out, "solve", resolved, seed,
                    ["assignment.csv", "assignment.json", "trace.csv"])
    log.info("solved k=%d in %d iterations (converged=%s)",
             k, trace.iterations, trace.converged)
    return 0


def _cmd_reconstruct(args) -> int:
    cfg, base = _load_config(args)
    seed = _pick(args.seed, cfg, "seed", 0)
    edges = args.edges if args.edges is not None else cfg.get("edges")
    if edges is None:
        raise DataError("reconstruct needs --edges or an 'edges' config entry")
    threshold = float(_pick(args.threshold, cfg, "threshold", 0.0))
    label = cfg.get("label", "net")
    single = cio.load_single_network(label, _rel(base, edges),
                                     users=cfg.get("users"))
    graph = reconstruct(single, threshold)

    out = args.out
    cio.save_similarity_tsv(out / "simgraph.tsv", graph.users, graph.edges)
    _write_manifest(out, "reconstruct",
                    {"edges": str(edges), "label": label,
                     "threshold": threshold},
                    seed, ["simgraph.tsv"])
    log.info("kept %d similarity edges over %d users",
             graph.n_edges, graph.n)
    return 0


def _merged_payload(result) -> dict:
    communities = []
    for t, members in enumerate(result.merged):
        communities.append({
            "community": t,
            "members": [{"networks": list(members[uid]), "user": uid}
                        for uid in sorted(members)],
        })
    return {"communities": communities, "k": len(result.merged)}


def _extended_rows(result) -> list:
    rows = []
    for ext in result.per_network:
        for t, comm in enumerate(ext.communities):
            for o in sorted(comm):
                rows.append((ext.label, t, ext.users.id(o)))
    rows.sort()
    return rows


def _cmd_extend(args) -> int:
    cfg, base = _load_config(args)
    seed = _pick(args.seed, cfg, "seed", 0)
    policy = RecPolicy.parse(_pick(args.rec_policy, cfg, "rec_policy",
                                   "percentile:80"))
    asn_path = cfg.get("assignment")
    if asn_path is None:
        raise DataError("extend needs an 'assignment' config entry")
    assignment, hybrid_users = cio.load_assignment(_rel(base, asn_path))
    nets_cfg = cfg.get("networks")
    if not nets_cfg:
        raise DataError("extend needs a 'networks' list in the config")
    graphs = {}
    for entry in nets_cfg:
        label, path = entry[0], entry[1]
        users, edges = cio.load_similarity_tsv(_rel(base, path))
        graphs[label] = SimilarityGraph(users, edges)

    stubs = StubCommunitySet.from_assignment(
        assignment, hybrid_users,
        {lbl: g.users for lbl, g in graphs.items()})
    parts = [extend_op(graphs[lbl], lbl, stubs, policy)
             for lbl in sorted(graphs)]
    result = merge_op(parts)

    out = args.out
    lines = ["network,community,user_id"]
    lines += [f"{n},{t},{u}" for n, t, u in _extended_rows(result)]
    (out / "extended.csv").parent.mkdir(parents=True, exist_ok=True)
    (out / "extended.csv").write_text("\n".join(lines) + "\n",
                                      encoding="utf-8")
    cio.write_json(out / "merged.json", _merged_payload(result))
    _write_manifest(out, "extend",
                    {"assignment": str(asn_path),
                     "networks": [[e[0], str(e[1])] for e in nets_cfg],
                     "rec_policy": f"{policy.kind}:{policy.value}"},
                    seed, ["extended.csv", "merged.json"])
    return 0


def _parse_sweep(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise DataError(f"sweep {text!r} must look like A:B")
    try:
        return int(lo), int(hi)
    except ValueError as exc:
        raise DataError(f"sweep {text!r} must be integer A:B") from exc


def _pipeline_config(args, cfg: dict, base: Path) -> PipelineConfig:
    seed = _pick(args.seed, cfg, "seed", 0)
    sweep = _pick(args.sweep, cfg, "sweep", None)
    if isinstance(sweep, str):
        sweep = _parse_sweep(sweep)
    elif isinstance(sweep, list):
        sweep = (int(sweep[0]), int(sweep[1]))
    k = _pick(args.k, cfg, "k", None)
    if k is not None:
        sweep = None

    synth_spec = None
    hybrid_files = None
    network_files = ()
    if "synth" in cfg:
        synth_spec = SynthSpec(**cfg["synth"])
    else:
        net_cfg = cfg.get("network")
        if not net_cfg:
            raise DataError("pipeline config needs 'synth' or 'network'")
        hybrid_files = {
            "directed": [(label, _rel(base, path))
                         for label, path in net_cfg.get("directed", [])],
            "symmetric": [(label, _rel(base, path))
                          for label, path in net_cfg.get("symmetric", [])],
            "users": net_cfg.get("users"),
        }
        network_files = tuple((label, _rel(base, path))
                              for label, path in cfg.get("networks", []))

    corpora = None
    if cfg.get("corpora"):
        corpora = {label: cio.load_json(_rel(base, path))
                   for label, path in cfg["corpora"].items()}

    policy = RecPolicy.parse(_pick(args.rec_policy, cfg, "rec_policy",
                                   "percentile:80"))
    return PipelineConfig(
        synth=synth_spec,
        hybrid_files=hybrid_files,
        network_files=network_files,
        corpora=corpora,
        k=None if k is None else int(k),
        sweep=sweep,
        estimate_runs=int(cfg.get("estimate_runs", 10)),
        solver=dict(cfg.get("solver", {})),
        threshold=float(_pick(args.threshold, cfg, "threshold", 0.0)),
        rec_policy=policy,
        visible_fraction=float(cfg.get("visible_fraction", 2.0 / 3.0)),
        do_discovery=bool(cfg.get("do_discovery", True)),
        discovery_mode=cfg.get("discovery_mode", "all"),
        null_trials=int(cfg.get("null_trials", 10)),
        seed=int(seed),
        jobs=int(_pick(args.jobs, cfg, "jobs", 1)),
    )


def _report_value(value) -> str:
    return "" if value is None else fmt9(value)


def _cmd_pipeline(args) -> int:
    cfg, base = _load_config(args)
    pcfg = _pipeline_config(args, cfg, base)
    reports, artifacts = run_pipeline(pcfg)

    out = args.out
    outputs = []
    rep_lines = ["method,k,community,text_similarity,discovery_ratio,"
                 "null_discovery,nmi"]
    fig_sim = ["k,community,text_similarity"]
    fig_disc = ["k,community,discovery_ratio"]
    rep_docs = []
    for rep in reports:
        comms = sorted(set(rep.text_similarity) | set(rep.discovery))
        for t in comms:
            ts = rep.text_similarity.get(t)
            dr = rep.discovery.get(t)
            rep_lines.append(
                f"{rep.method},{rep.k},{t},{_report_value(ts)},"
                f"{_report_value(dr)},,")
            if ts is not None:
                fig_sim.append(f"{rep.k},{t},{fmt9(ts)}")
            if dr is not None:
                fig_disc.append(f"{rep.k},{t},{fmt9(dr)}")
        rep_lines.append(
            f"{rep.method},{rep.k},mean,"
            f"{_report_value(rep.mean_text_similarity)},"
            f"{_report_value(rep.mean_discovery)},"
            f"{_report_value(rep.null_discovery)},"
            f"{_report_value(rep.nmi)}")
        if rep.mean_text_similarity is not None:
            fig_sim.append(f"{rep.k},mean,{fmt9(rep.mean_text_similarity)}")
        if rep.mean_discovery is not None:
            fig_disc.append(f"{rep.k},mean,{fmt9(rep.mean_discovery)}")
        if rep.null_discovery is not None:
            fig_disc.append(f"{rep.k},null,{fmt9(rep.null_discovery)}")
        rep_docs.append({
            "discovery": {str(t): v for t, v in sorted(rep.discovery.items())},
            "k": rep.k,
            "mean_discovery": rep.mean_discovery,
            "mean_text_similarity": rep.mean_text_similarity,
            "method": rep.method,
            "nmi": rep.nmi,
            "null_discovery": rep.null_discovery,
            "text_similarity": {str(t): v for t, v in
                                sorted(rep.text_similarity.items())},
        })

    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text("\n".join(rep_lines) + "\n",
                                    encoding="utf-8")
    cio.write_json(out / "report.json", rep_docs)
    (out / "fig_similarity.csv").write_text("\n".join(fig_sim) + "\n",
                                            encoding="utf-8")
    (out / "fig_discovery.csv").write_text("\n".join(fig_disc) + "\n",
                                           encoding="utf-8")
    outputs += ["report.csv", "report.json", "fig_similarity.csv",
                "fig_discovery.csv"]

    net = artifacts["net"]
    for k in artifacts["k_list"]:
        art = artifacts["per_k"][k]
        cio.save_assignment(art["assignment"], net.users,
                            out / f"assignment_k{k}")
        cio.save_trace_csv(out / f"trace_k{k}.csv", art["trace"].objective)
        outputs += [f"assignment_k{k}.csv", f"assignment_k{k}.json",
                    f"trace_k{k}.csv"]
        if art["extension"] is not None:
            cio.write_json(out / f"merged_k{k}.json",
                           _merged_payload(art["extension"]))
            outputs.append(f"merged_k{k}.json")

    resolved = dict(cfg)
    resolved.update({
        "jobs": pcfg.jobs,
        "k": pcfg.k,
        "rec_policy": f"{pcfg.rec_policy.kind}:{pcfg.rec_policy.value}",
        "seed": pcfg.seed,
        "sweep": list(pcfg.sweep) if pcfg.sweep else None,
        "threshold": pcfg.threshold,
    })
    _write_manifest(out, "pipeline", resolved, pcfg.seed, outputs)
    for rep in reports:
        log.info("k=%d nmi=%s mean_discovery=%s null=%s", rep.k,
                 rep.nmi, rep.mean_discovery, rep.null_discovery)
    return 0


def _cmd_bench(args) -> int:
    cfg, base = _load_config(args)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    runs = int(_pick(args.runs, cfg, "runs", 5))
    k = _pick(args.k, cfg, "k", None)

    truth_labels = None
    if "synth" in cfg:
        spec = SynthSpec(**{**cfg["synth"], "rng_seed": seed})
        net, _, truth = generate(spec)
        truth_labels = truth.overlap_labels
        if k is None:
            k = truth.k_true
    else:
        net = _network_from_config(cfg, base)
        if k is None:
            raise DataError("bench needs --k when not using a synth spec")
    k = int(k)

    fused = FusedNetwork.from_multiplex(net)
    methods = {
        "cmn_nmf": lambda s: solve(net, _solver_config(cfg, k, s))[1],
        "kmeans": lambda s: kmeans_baseline(fused, k, seed=s),
        "concat_nmf": lambda s: concat_nmf(fused, k, seed=s),
        "col_nmf": lambda s: col_nmf(net, k, seed=s),
        "multi_nmf": lambda s: multi_nmf(net, k, seed=s),
    }
    lines = ["method,k,seed,nmi"]
    for name in sorted(methods):
        for r in range(runs):
            run_seed = seed + r
            t0 = time.perf_counter()
            assignment = methods[name](run_seed)
            elapsed = time.perf_counter() - t0
            score = ""
            if truth_labels is not None:
                score = fmt9(nmi(truth_labels, assignment.labels))
            lines.append(f"{name},{k},{run_seed},{score}")
            log.info("%s seed=%d: %.2fs nmi=%s", name, run_seed, elapsed,
                     score or "n/a")

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(out, "bench", {"k": k, "runs": runs}, seed, ["bench.csv"])
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "estimate-k": _cmd_estimate_k,
    "solve": _cmd_solve,
    "reconstruct": _cmd_reconstruct,
    "extend": _cmd_extend,
    "pipeline": _cmd_pipeline,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"error[{args.command}]: numerical failure: {exc}",
              file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error[{args.command}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
