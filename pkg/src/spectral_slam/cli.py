"""Command-line entry point.

Subcommands: analyze (criteria + health of one graph), compare (incremental
FIM-vs-Laplacian series with auditing), bench (route timing sweep), gen
(synthetic graphs), explore (grid-world episodes).

Exit codes: 0 success, 1 usage error, 2 data error, 3 audit/assertion
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from spectral_slam import bench as bench_mod
from spectral_slam import dataset_io
from spectral_slam.core_graph import GraphError, PoseGraph, is_connected, laplacian
from spectral_slam.criteria import (
    WeightScheme,
    assemble_fim,
    criteria_from_fim,
    criteria_from_laplacian,
    edge_weights,
    graph_health_metrics,
)
from spectral_slam.explore import episode as episode_mod
from spectral_slam.explore.grid import WorldFormatError, load_world

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_AUDIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


class DataError(Exception):
    pass


def _load_graph(path: str) -> PoseGraph:
    try:
        return dataset_io.load_pose_graph(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except (dataset_io.ParseError, GraphError) as exc:
        raise DataError(str(exc)) from exc


def _write_out(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _report_dict(rep) -> dict:
    d = {
        "t_opt": float(f"{rep.t_opt:.12g}"),
        "d_opt": float(f"{rep.d_opt:.12g}"),
        "a_opt": float(f"{rep.a_opt:.12g}"),
        "e_opt": float(f"{rep.e_opt:.12g}"),
        "e_tilde_opt": float(f"{rep.e_tilde_opt:.12g}"),
        "source": rep.source,
        "n": rep.n,
        "m": rep.m,
        "connected": rep.connected,
    }
    return d


def cmd_analyze(args) -> int:
    g = _load_graph(args.graph)
    scheme = WeightScheme.parse(args.weights)
    connected = is_connected(g)
    payload: dict = {
        "n": g.n, "m": g.m, "ell": g.ell,
        "weights": scheme.label(),
        "connected": connected,
        "health": {k: float(f"{v:.12g}")
                   for k, v in graph_health_metrics(g).items()},
        "reports": [],
    }
    if not connected:
        payload["warning"] = "graph disconnected: criteria are sentinel values"
    if args.route in ("laplacian", "both"):
        if scheme.kind == "unit":
            lap = laplacian(g)
            phi_bar = g.edges[0].info if g.edges else None
        else:
            lap = laplacian(g, edge_weights(g, scheme))
            phi_bar = None
        payload["reports"].append(
            _report_dict(criteria_from_laplacian(lap, phi_bar=phi_bar, m=g.m)))
    if args.route in ("fim", "both") and connected:
        payload["reports"].append(_report_dict(criteria_from_fim(assemble_fim(g))))
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    g = _load_graph(args.graph)
    scheme = WeightScheme.parse(args.weights)
    cfg = bench_mod.ExperimentConfig(scheme=scheme, stride=args.stride,
                                     fim_cap=args.cap)
    rows = bench_mod.incremental_run(g, cfg)
    _write_out(dataset_io.export_series(rows, args.format), args.out)
    if scheme.kind == "unit":
        gaps = bench_mod.max_route_gap(rows)
        if max(gaps["t_opt"], gaps["d_opt"]) > 1e-6 or gaps["e_opt"] > 1e-4:
            print(f"equivalence audit failed: gaps {gaps}", file=sys.stderr)
            return EXIT_AUDIT
    elif scheme.kind == "maxeig":
        violations = bench_mod.audit_bounds(rows)
        if violations:
            print(f"bound audit failed: {len(violations)} violation(s), "
                  f"first {violations[0]}", file=sys.stderr)
            return EXIT_AUDIT
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = sorted(int(s) for s in args.sizes.split(","))
    summary = bench_mod.timing_sweep(sizes, ell=args.ell, repeats=args.repeats)
    _write_out(json.dumps(summary.to_dict(), indent=2) + "\n", args.out)
    if len([n for n in sizes if n > 2]) >= 2:
        failures = summary.check(min_final_speedup=args.min_speedup)
        if failures:
            for f in failures:
                print(f"bench audit: {f}", file=sys.stderr)
            return EXIT_AUDIT
    return EXIT_OK


def cmd_gen(args) -> int:
    phi_bar = None
    if args.phi != "random":
        try:
            entries = [float(x) for x in args.phi.split(",")]
        except ValueError:
            raise DataError(f"cannot parse --phi {args.phi!r}") from None
        if len(entries) not in (3, 6):
            raise DataError("--phi needs 3 or 6 diagonal entries, or 'random'")
        phi_bar = np.diag(entries)
    g = dataset_io.synth_graph(args.kind, args.n, phi_bar=phi_bar,
                               seed=args.seed)
    _write_out(dataset_io.serialize_pose_graph(g), args.out)
    return EXIT_OK


def cmd_explore(args) -> int:
    try:
        world = load_world(args.world)
    except OSError as exc:
        raise DataError(f"cannot read {args.world}: {exc}") from exc
    except WorldFormatError as exc:
        raise DataError(str(exc)) from exc
    config = episode_mod.EpisodeConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                config = episode_mod.parse_episode_config(fh.read())
        except OSError as exc:
            raise DataError(f"cannot read {args.config}: {exc}") from exc
    metrics, log = episode_mod.run_episode(world, args.policy, args.budget,
                                           args.seed, config)
    _write_out(json.dumps(metrics.to_dict(), indent=2) + "\n", args.out)
    if args.log:
        with open(args.log, "w") as fh:
            for record in log:
                fh.write(json.dumps(record) + "\n")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="spectral-slam",
                     description="Pose-graph uncertainty via graph spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="criteria and health of one graph")
    p.add_argument("graph")
    p.add_argument("--weights", default="unit",
                   help="unit | maxeig | matched:<p>")
    p.add_argument("--route", choices=("fim", "laplacian", "both"),
                   default="both")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="incremental FIM-vs-Laplacian series")
    p.add_argument("graph")
    p.add_argument("--weights", default="unit")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--cap", type=int, default=bench_mod.DEFAULT_FIM_CAP)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="route timing sweep")
    p.add_argument("--sizes", default="50,100,200,400",
                   help="comma-separated graph sizes")
    p.add_argument("--ell", type=int, choices=(3, 6), default=3)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--min-speedup", type=float, default=5.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="synthetic pose-graph")
    p.add_argument("--kind", choices=("chain", "chain_with_loops"),
                   default="chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi", default="random",
                   help="'random' or diagonal entries, e.g. 11.11,11.11,250")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("explore", help="grid-world exploration episode")
    p.add_argument("world")
    p.add_argument("--policy", choices=episode_mod.POLICIES,
                   default="graph_dopt")
    p.add_argument("--budget", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--log", default=None)
    p.set_defaults(func=cmd_explore)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.repeats < 3:
        parser.error("--repeats must be >= 3")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
