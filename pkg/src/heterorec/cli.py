"""Command-line front door.

Subcommands: synth, influence, rn, sample, recommend, eval. Every stochastic
subcommand takes --seed and produces output that depends only on its inputs,
the seed, and nothing else (in particular not on --jobs). Exit codes: 0 ok,
1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import HeteroRecError, InvalidParameters
from .eventlog import load_event_log, save_event_log
from .graph import (
    load_graph,
    load_inviters,
    save_graph,
    save_id_map,
    save_inviters,
    derive_candidates,
)
from .influence import (
    InfluenceScores,
    coreness_scores,
    degree_scores,
    heteroinf_scores,
    load_scores,
    mc_scores,
    save_scores,
)
from .metrics import EvalReport
from .recommend import (
    hetero_im,
    hetero_ir,
    load_recommendations,
    ppr_table,
    save_recommendations,
)
from .rrset import DEFAULT_RN_CAP, RNParameters, RRSetCollection, compute_rn, rn_for_graph, sample_rr_sets
from .synth import SynthConfig, generate_event_log, generate_graph, pick_inviters


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); validation errors are exit 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="heterorec", description=__doc__)
    p.add_argument("--version", action="version", version=f"heterorec {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")

    sp = sub.add_parser("synth", help="generate a synthetic graph and event log")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--edges", type=int, required=True, help="target edge count")
    sp.add_argument("--degree-model", choices=["uniform", "powerlaw"], default="uniform")
    sp.add_argument("--powerlaw-exponent", type=float, default=2.5)
    sp.add_argument("--invite-alpha", type=float, default=1.0)
    sp.add_argument("--invite-beta", type=float, default=3.0)
    sp.add_argument("--accept-alpha", type=float, default=1.0)
    sp.add_argument("--accept-beta", type=float, default=4.0)
    sp.add_argument("--invite-cap", type=int, default=4)
    sp.add_argument("--inviters-count", type=int, default=0)
    sp.add_argument("--event-seeding", choices=["inviters", "all"], default=None)
    sp.add_argument("--seed", type=int, required=True)

    ip = sub.add_parser("influence", help="score every node's spread influence")
    ip.add_argument("--nodes", required=True)
    ip.add_argument("--edges", required=True)
    ip.add_argument("--method", choices=["heteroinf", "degree", "coreness", "mc"], required=True)
    ip.add_argument("-w", type=int, default=4, help="interaction capability")
    ip.add_argument("--runs", type=int, default=1000, help="Monte-Carlo runs per node")
    ip.add_argument("--seed", type=int, default=None)
    ip.add_argument("--out", required=True)

    rp = sub.add_parser("rn", help="print the RR-set budget (i_max, theta, rn)")
    rp.add_argument("--n", type=int, required=True)
    rp.add_argument("--k", type=int, required=True)
    rp.add_argument("--chi", type=int, required=True)
    rp.add_argument("--eps", type=float, required=True)
    rp.add_argument("--delta", type=float, required=True)
    rp.add_argument("--degrees", required=True,
                    help="inviter out-degrees, e.g. '10x10' or '10x10,5x20' or '3,4,5'")
    rp.add_argument("--rn-cap", type=int, default=DEFAULT_RN_CAP)

    ap = sub.add_parser("sample", help="sample an RR-set collection to a binary dump")
    ap.add_argument("--nodes", required=True)
    ap.add_argument("--edges", required=True)
    ap.add_argument("--inviters", default=None, help="inviters file for budget sizing")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=1e-3)
    ap.add_argument("--rn", type=int, default=None, help="explicit set count, skips sizing")
    ap.add_argument("--rn-cap", type=int, default=DEFAULT_RN_CAP)
    ap.add_argument("--strategy", choices=["uniform", "random_source"], default="uniform")
    ap.add_argument("--random-source", action="store_true",
                    help="shorthand for --strategy random_source")
    ap.add_argument("--no-hsp", action="store_true",
                    help="ignore accept probabilities while sampling")
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", required=True)

    cp = sub.add_parser("recommend", help="write per-inviter top-k lists")
    cp.add_argument("--nodes", required=True)
    cp.add_argument("--edges", required=True)
    cp.add_argument("--inviters", required=True)
    cp.add_argument("--method", choices=["heteroir", "heteroim", "ppr"], required=True)
    cp.add_argument("-k", type=int, default=3)
    cp.add_argument("-w", type=int, default=4)
    cp.add_argument("--no-first", action="store_true", help="drop the direct-interaction term")
    cp.add_argument("--no-second", action="store_true", help="drop the influence term")
    cp.add_argument("--no-rerank", action="store_true", help="keep pure coverage order")
    cp.add_argument("--no-hsp", action="store_true")
    cp.add_argument("--random-source", action="store_true")
    cp.add_argument("--collection", default=None, help="reuse a sampled RR-set dump")
    cp.add_argument("--eps", type=float, default=0.1)
    cp.add_argument("--delta", type=float, default=1e-3)
    cp.add_argument("--rn", type=int, default=None)
    cp.add_argument("--rn-cap", type=int, default=DEFAULT_RN_CAP)
    cp.add_argument("--damping", type=float, default=0.15, help="ppr restart weight")
    cp.add_argument("--tol", type=float, default=1e-10)
    cp.add_argument("--seed", type=int, default=None)
    cp.add_argument("--jobs", type=int, default=1)
    cp.add_argument("--out", required=True)

    ep = sub.add_parser("eval", help="evaluate recommendation and influence outputs")
    ep.add_argument("--log", required=True)
    ep.add_argument("--recs", action="append", default=[], metavar="LABEL=PATH")
    ep.add_argument("--k", default="1,2,3", help="comma-separated K values")
    ep.add_argument("--ideal", choices=["auto", "exact", "greedy"], default="auto")
    ep.add_argument("--influence", action="append", default=[], metavar="LABEL=PATH")
    ep.add_argument("--influence-truth", default=None)
    ep.add_argument("--out", required=True)
    ep.add_argument("--json-out", default=None)
    return p


def _parse_degrees(spec: str) -> list[int]:
    out: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "x" in token:
            count, deg = token.split("x", 1)
            out.extend([int(deg)] * int(count))
        else:
            out.append(int(token))
    if not out:
        raise InvalidParameters(f"could not parse any degrees from {spec!r}")
    return out


def _parse_labeled(items: list[str]) -> list[tuple[str, str]]:
    pairs = []
    for item in items:
        if "=" not in item:
            raise InvalidParameters(f"expected LABEL=PATH, got {item!r}")
        label, path = item.split("=", 1)
        pairs.append((label, path))
    return pairs


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        n=args.n,
        target_m=args.edges,
        out_degree_model=args.degree_model,
        powerlaw_exponent=args.powerlaw_exponent,
        invite_alpha=args.invite_alpha,
        invite_beta=args.invite_beta,
        accept_alpha=args.accept_alpha,
        accept_beta=args.accept_beta,
        invite_cap=args.invite_cap,
        seed=args.seed,
    )
    g = generate_graph(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(g, out / "nodes.tsv", out / "edges.tsv")
    save_id_map(g, out / "id_map.tsv")

    inviters: list[int] = []
    if args.inviters_count > 0:
        inviters = pick_inviters(g, args.inviters_count, seed=args.seed + 1)
        save_inviters(g, inviters, out / "inviters.tsv")

    seeding = args.event_seeding or ("inviters" if inviters else "all")
    if seeding == "inviters":
        if not inviters:
            raise InvalidParameters("--event-seeding inviters needs --inviters-count > 0")
        cfg = SynthConfig(**{**cfg.__dict__, "event_seeds": tuple(inviters)})
    log = generate_event_log(g, cfg, seed=args.seed + 2)
    save_event_log(log, out / "events.tsv")
    print(f"wrote graph (n={g.n}, m={g.m}), {len(inviters)} inviters, "
          f"{len(log.rows)} log rows to {out}")
    return 0


def _cmd_influence(args) -> int:
    g = load_graph(args.nodes, args.edges)
    if args.method == "heteroinf":
        scores = heteroinf_scores(g, w=args.w)
    elif args.method == "degree":
        scores = degree_scores(g)
    elif args.method == "coreness":
        scores = coreness_scores(g)
    else:
        if args.seed is None:
            raise InvalidParameters("--seed is required for --method mc")
        scores = mc_scores(g, runs=args.runs, seed=args.seed)
    save_scores(scores, g, args.out)
    print(f"wrote {args.method} scores for {g.n} nodes to {args.out}")
    return 0


def _cmd_rn(args) -> int:
    degrees = _parse_degrees(args.degrees)
    params = RNParameters(
        n_p=args.n, k=args.k, chi=args.chi, epsilon=args.eps, delta=args.delta,
        inviter_out_degrees=degrees,
    )
    res = compute_rn(params, cap=args.rn_cap)
    print(f"i_max={res.i_max} theta={res.theta!r} rn={res.rn}")
    for note in res.warnings:
        print(f"warning: {note}", file=sys.stderr)
    return 0


def _resolve_strategy(args) -> str:
    return "random_source" if args.random_source else args.strategy


def _cmd_sample(args) -> int:
    g = load_graph(args.nodes, args.edges)
    if args.rn is not None:
        rn = args.rn
    else:
        if args.inviters is None:
            raise InvalidParameters("either --rn or --inviters is required")
        inviters = load_inviters(args.inviters, g)
        res = rn_for_graph(g, inviters, k=args.k, epsilon=args.eps, delta=args.delta,
                           cap=args.rn_cap)
        rn = res.rn
    coll = sample_rr_sets(
        g, rn, strategy=_resolve_strategy(args), seed=args.seed,
        hsp=not args.no_hsp, jobs=args.jobs,
    )
    coll.save(args.out)
    print(f"sampled {coll.num_sets} RR sets ({coll.strategy}) to {args.out}")
    return 0


def _cmd_recommend(args) -> int:
    g = load_graph(args.nodes, args.edges)
    inviters = load_inviters(args.inviters, g)

    if args.method == "heteroir":
        table = hetero_ir(g, inviters, k=args.k, w=args.w,
                          no_first=args.no_first, no_second=args.no_second)
    elif args.method == "ppr":
        table = ppr_table(g, inviters, k=args.k, damping=args.damping, tol=args.tol)
    else:
        if args.collection is not None:
            coll = RRSetCollection.load(args.collection)
        else:
            if args.seed is None:
                raise InvalidParameters("--method heteroim needs --seed or --collection")
            if args.rn is not None:
                rn = args.rn
            else:
                rn = rn_for_graph(g, inviters, k=args.k, epsilon=args.eps,
                                  delta=args.delta, cap=args.rn_cap).rn
            strategy = "random_source" if args.random_source else "uniform"
            coll = sample_rr_sets(g, rn, strategy=strategy, seed=args.seed,
                                  hsp=not args.no_hsp, jobs=args.jobs)
        candidates = derive_candidates(g, inviters)
        table = hetero_im(g, inviters, candidates, coll, k=args.k,
                          rerank=not args.no_rerank)
    save_recommendations(table, args.out, g)
    print(f"wrote {table.method} lists for {len(table.inviters)} inviters to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    log = load_event_log(args.log)
    ks = [int(x) for x in args.k.split(",") if x.strip()]
    if not ks or any(k < 1 for k in ks):
        raise InvalidParameters(f"bad K list {args.k!r}")
    report = EvalReport()
    for label, path in _parse_labeled(args.recs):
        table = load_recommendations(path, method=label)
        report.add_recommendation_eval(table, log, ks, ideal=args.ideal)

    influence_pairs = _parse_labeled(args.influence)
    if influence_pairs:
        if args.influence_truth is None:
            raise InvalidParameters("--influence needs --influence-truth")
        truth_map = load_scores(args.influence_truth)
        ids = sorted(truth_map)
        truth = InfluenceScores("truth", _as_vector(truth_map, ids))
        for label, path in influence_pairs:
            pred_map = load_scores(path)
            if sorted(pred_map) != ids:
                raise InvalidParameters(
                    f"{path}: node universe differs from {args.influence_truth}"
                )
            pred = InfluenceScores(label, _as_vector(pred_map, ids))
            report.add_hit_eval(pred, truth, ks, method=label)

    report.save(args.out, json_path=args.json_out)
    print(f"wrote report to {args.out}")
    return 0


def _as_vector(mapping: dict[int, float], ids: list[int]):
    import numpy as np

    return np.array([mapping[i] for i in ids])


_HANDLERS = {
    "synth": _cmd_synth,
    "influence": _cmd_influence,
    "rn": _cmd_rn,
    "sample": _cmd_sample,
    "recommend": _cmd_recommend,
    "eval": _cmd_eval,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand is required", file=sys.stderr)
            return 1
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HeteroRecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
