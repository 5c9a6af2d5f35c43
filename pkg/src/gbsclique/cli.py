"""Command-line entry point: ``gbsclique <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 enumeration/permanent cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .detect import DegenerateNormalization, MaxZTest, SamplerSpec, run_algorithm1
from .experiments import (REGISTRY, ConfigError, emit_report, parse_config, report_to_csv,
                          report_to_json, run_experiment)
from .gbs import (EnumerationTooLarge, NoPerfectMatching, enumerate_distribution, sample_exact,
                  sample_mcmc)
from .graph import graph_from_json, graph_to_json, planted_er
from .matchperm import permanent_exact
from .theory import TheoryParams, predictions
from .weights import weight_table

EXIT_OK, EXIT_CONFIG, EXIT_CAP = 0, 2, 3

log = logging.getLogger("gbsclique")


def _write(text: str, args, name: str, ext: str):
    if args.out:
        path = f"{args.out}.{name}.{ext}"
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_graph(args):
    if args.graph:
        with open(args.graph, encoding="utf-8") as fh:
            return graph_from_json(fh.read())
    if args.n is None:
        raise ConfigError("need --graph FILE or --n (with --p, --k) to build an instance")
    return planted_er(args.n, args.p, args.k, args.seed)


def cmd_gen(args):
    inst = planted_er(args.n, args.p, args.k, args.seed)
    _write(graph_to_json(inst.graph, inst.a0, inst.b0), args, "gen", "json")


def _parse_matrix(text: str) -> np.ndarray:
    rows = [r.strip() for r in text.replace(",", ";").split(";") if r.strip()]
    return np.array([[int(ch) for ch in r if ch in "01"] for r in rows], dtype=np.uint8)


def cmd_perm(args):
    if args.matrix:
        mat = _parse_matrix(args.matrix)
    else:
        g = _load_graph(args).graph
        a = [int(x) for x in args.rows.split(",")]
        b = [int(x) for x in args.cols.split(",")]
        mat = g.bits[np.ix_(a, b)]
    val = permanent_exact(mat)
    _write(json.dumps({"m": int(mat.shape[0]), "permanent": val.exact_count,
                       "overflowed": val.overflowed}), args, "perm", "json")


def cmd_theory(args):
    params = TheoryParams(args.n, args.m, args.k, args.p, args.c)
    _write(json.dumps(predictions(params), indent=2), args, "theory", "json")


def cmd_sample(args):
    g = _load_graph(args).graph
    if args.sampler == "exact":
        batch = sample_exact(enumerate_distribution(g, args.m, args.cap), args.t, args.seed)
    else:
        batch = sample_mcmc(g, args.m, args.t, args.burnin, args.thin, args.seed)
    _write(batch.to_csv(), args, "sample", "csv")


def cmd_weights(args):
    g = _load_graph(args).graph
    table = weight_table(g, args.m, args.side, args.method, args.r, args.seed)
    _write(table.to_csv(), args, "weights", "csv")


def cmd_detect(args):
    g = _load_graph(args).graph
    spec = SamplerSpec(args.sampler, args.m, args.burnin, args.thin, args.cap)
    res = run_algorithm1(g, spec, args.t, MaxZTest(args.threshold), seed=args.seed)
    doc = {
        "decision": res.decision, "statistic_name": res.statistic_name,
        "statistic_value": res.statistic_value, "t_used": res.t_used,
        "sigma": res.sigma, "sigma_left": res.sigma_left, "sigma_right": res.sigma_right,
        "z_left": res.left.tolist(), "z_right": res.right.tolist(),
    }
    _write(json.dumps(doc, indent=2), args, "detect", "json")


def cmd_experiment(args):
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {args.config}: {exc}") from None
        if doc.get("experiment", args.name) != args.name:
            raise ConfigError(f"config names experiment {doc['experiment']!r}, not {args.name!r}")
    doc["experiment"] = args.name
    if args.seed_given:
        doc["seed"] = args.seed
    cfg = parse_config(doc)
    report = run_experiment(cfg)
    if args.out:
        print(emit_report(report, args.format, args.out))
    else:
        sys.stdout.write(report_to_csv(report) if args.format == "csv" else report_to_json(report))


def _sampler_flags(p):
    p.add_argument("--m", type=int, default=3, help="sample half-size")
    p.add_argument("--t", type=int, default=1000, help="number of samples")
    p.add_argument("--sampler", choices=("exact", "mcmc"), default="exact")
    p.add_argument("--burnin", type=int, default=10_000)
    p.add_argument("--thin", type=int, default=10)


def _instance_flags(p):
    p.add_argument("--graph", help="graph JSON file (from `gen`)")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--k", type=int, default=0, help="planted biclique size")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed (default 0)")
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help="output prefix; files are <out>.<name>.<format>")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (also PGL_THREADS); runs are deterministic in it")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="gbsclique", parents=[common],
                                 description="GBS-weight planted biclique laboratory")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a (planted) bipartite ER graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("perm", parents=[common], help="count perfect matchings of a 0/1 block")
    p.add_argument("--matrix", help="rows separated by ';', e.g. '110;011;101'")
    _instance_flags(p)
    p.add_argument("--rows", help="comma-separated left vertices")
    p.add_argument("--cols", help="comma-separated right vertices")
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("theory", parents=[common], help="print closed-form predictions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--c", type=float, default=0.8)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sample", parents=[common], help="draw GBS samples")
    _instance_flags(p)
    _sampler_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("weights", parents=[common], help="node weight table")
    _instance_flags(p)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.add_argument("--method", choices=("exact", "mc_perm", "mc_indicator"), default="exact")
    p.add_argument("--r", type=int, default=10_000, help="Monte Carlo draws per node")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("detect", parents=[common], help="run the sampling detector on one graph")
    _instance_flags(p)
    _sampler_flags(p)
    p.add_argument("--threshold", type=float, default=float("inf"), help="max-z threshold")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("experiment", parents=[common], help="run a registered experiment")
    p.add_argument("name", choices=sorted(REGISTRY))
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.seed_given = args.seed is not None
    args.seed = 0 if args.seed is None else args.seed
    if args.threads is not None:
        os.environ["PGL_THREADS"] = str(args.threads)
    args.cap = None
    try:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        args.func(args)
    except (EnumerationTooLarge,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, NoPerfectMatching, DegenerateNormalization, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
