"""Command-line interface: simulate, sweep, verify, plot, export-graph."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import harness, plotting
from .hopterrain import export_localization_csv
from .network import save_edge_list


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--algorithm", choices=[harness.MDS_MAP, harness.HOP_TERRAIN])
    parser.add_argument("--n", type=int)
    parser.add_argument("--dim", type=int)
    parser.add_argument("--mode", choices=["connectivity", "range"])
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--pairs", help="alpha:beta list, e.g. '0.5:0,0.5:1'")
    parser.add_argument("--anchors", choices=["simplex", "random", "none"])
    parser.add_argument("--m-anchors", dest="m_anchors", type=int)
    parser.add_argument("--c-grid", dest="c_grid", help="comma-separated C values")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--master-seed", dest="master_seed", type=int)
    parser.add_argument("--use-average-hop-distance", dest="use_average_hop_distance",
                        action="store_const", const=True)
    parser.add_argument("--workers", type=int)


_CONFIG_KEYS = ("algorithm", "n", "dim", "mode", "alpha", "beta", "pairs", "anchors",
                "m_anchors", "c_grid", "trials", "master_seed",
                "use_average_hop_distance", "workers")


def _build_config(args) -> harness.ExperimentConfig:
    values = harness.load_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            values[key] = cli_value
    return harness.config_from_values(values)


def _write_positions(path, coords: np.ndarray):
    axes = ["x", "y", "z"][: coords.shape[1]]
    with open(path, "w") as fh:
        fh.write("node_id," + ",".join(axes) + "\n")
        for i, row in enumerate(coords):
            fh.write(f"{i}," + ",".join(repr(float(v)) for v in row) + "\n")


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    art = harness.simulate_once(cfg, c=args.c, trial=args.trial, flood_log=args.flood_log)
    if args.positions_out:
        _write_positions(args.positions_out, art.positions)
    if args.estimates_out:
        if art.localization is not None:
            export_localization_csv(art.localization, args.estimates_out, art.positions)
        elif art.estimates is not None:
            _write_positions(args.estimates_out, art.estimates)
        else:
            print("no estimates produced (disconnected instance)", file=sys.stderr)
    if args.graph_out:
        save_edge_list(art.graph, args.graph_out)
    rec = art.record
    print(f"algorithm={rec.algorithm} n={rec.n} d={rec.dim} mode={rec.mode} "
          f"C={rec.c} R={rec.radio_range:.6g} connected={str(rec.connected).lower()}")
    for name in ("d_inv", "transform_error", "rmse", "localized_fraction"):
        value = getattr(rec, name)
        if value is not None:
            print(f"{name}={value:.6g}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    result = harness.run_sweep(cfg)
    result.write_csv(args.out)
    print(f"wrote {len(result.records)} records to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    suites = tuple(args.suite) if args.suite else ("hop-bound", "sigma-min",
                                                   "anchor-spectral", "concentration")
    records = harness.run_verification(suites, seeds=args.seeds, master_seed=args.master_seed)
    harness.write_verification_csv(args.out, records)
    passed = sum(rec.passed for rec in records)
    print(f"{passed}/{len(records)} checks passed; details in {args.out}")
    return 0 if passed == len(records) else 1


def _read_csv_rows(path) -> list[dict]:
    with open(path) as fh:
        return list(csv.DictReader(fh))


def _cmd_plot(args) -> int:
    rows = _read_csv_rows(args.input)
    if not rows:
        raise SystemExit("empty input CSV")
    if args.kind == "sweep":
        series = plotting.sweep_series(rows, y_key=args.metric)
        svg = plotting.line_plot_svg(series, title=args.title, y_label=args.metric)
    else:
        true_d = [float(r["true_distance"]) for r in rows]
        est = [float(r["estimate"]) for r in rows]
        svg = plotting.scatter_plot_svg(true_d, est, bound_slope=args.bound_slope,
                                        bound_intercept=args.bound_intercept,
                                        title=args.title)
    plotting.write_svg(args.out, svg)
    print(f"wrote {args.out}")
    return 0


def _cmd_export_graph(args) -> int:
    cfg = _build_config(args)
    art = harness.simulate_once(cfg, c=args.c, trial=args.trial)
    save_edge_list(art.graph, args.out)
    print(f"wrote {art.graph.edge_count} edges to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensorloc",
                                     description="Connectivity-based sensor localization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trial and export its artifacts")
    _add_config_flags(p)
    p.add_argument("--c", type=float, help="C grid point to use (default: first)")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--positions-out")
    p.add_argument("--estimates-out")
    p.add_argument("--graph-out")
    p.add_argument("--flood-log", help="JSON-lines per-round protocol log")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep and write CSV")
    _add_config_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run bound/spectral verification suites")
    p.add_argument("--suite", action="append",
                   choices=["hop-bound", "sigma-min", "anchor-spectral", "concentration"])
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--master-seed", dest="master_seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("plot", help="render a sweep or scatter CSV as SVG")
    p.add_argument("--kind", choices=["sweep", "scatter"], default="sweep")
    p.add_argument("--input", required=True)
    p.add_argument("--metric", default="d_inv")
    p.add_argument("--title", default="")
    p.add_argument("--bound-slope", dest="bound_slope", type=float)
    p.add_argument("--bound-intercept", dest="bound_intercept", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("export-graph", help="generate and save one measurement graph")
    _add_config_flags(p)
    p.add_argument("--c", type=float)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_graph)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
