"""Command-line entry points.

Four subcommands: ``simulate`` runs one configured scenario, ``sweep``
repeats it over a list of guide depths, ``fit`` fits a model to two
columns of any CSV, and ``report`` re-renders summary and figures from a
directory of previously written tables.  All artifact-producing commands
print the paths they wrote; errors exit nonzero with a one-line diagnostic
on stderr.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config, parse_depth_list
from .fitting import fit_linear, fit_power_law, fit_sqrt_threshold
from .harness import report_from_directory, run_scenario, sweep_depth, write_report

_FIT_MODELS = {
    "power": fit_power_law,
    "sqrt-threshold": fit_sqrt_threshold,
    "linear": fit_linear,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberguide",
        description="Monte Carlo transport of cold atoms through a hollow-core fiber guide.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write its report")
    sim.add_argument("--config", required=True, help="scenario configuration file")
    sim.add_argument("--seed", type=int, default=None, help="override the master seed")
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--workers", type=int, default=None, help="parallel trajectory workers")

    swp = sub.add_parser("sweep", help="run the scenario across guide depths")
    swp.add_argument("--config", required=True, help="scenario configuration file")
    swp.add_argument(
        "--depths",
        required=True,
        help='comma-separated depths, mK unless suffixed: "3, 4, 5, 8.2"',
    )
    swp.add_argument("--seed", type=int, default=None, help="override the master seed")
    swp.add_argument("--out", default=None, help="output directory")
    swp.add_argument("--workers", type=int, default=None, help="parallel trajectory workers")

    fit = sub.add_parser("fit", help="fit a model to two CSV columns")
    fit.add_argument("--input", required=True, help="CSV file with a header row")
    fit.add_argument("--model", required=True, choices=sorted(_FIT_MODELS))
    fit.add_argument("--xcol", default=None, help="x column name (default: first)")
    fit.add_argument("--ycol", default=None, help="y column name (default: second)")

    rep = sub.add_parser("report", help="re-render summary and figures from saved tables")
    rep.add_argument("--input", required=True, help="directory holding the CSV tables")
    rep.add_argument("--out", default=None, help="output directory (default: --input)")
    return parser


def _resolve_out(arg_out: str | None, cfg_out) -> Path:
    if arg_out is not None:
        return Path(arg_out)
    if cfg_out is not None:
        return Path(cfg_out)
    return Path("fiberguide-out")


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    result = run_scenario(cfg, n_workers=args.workers)
    written = write_report(result, _resolve_out(args.out, cfg.output_dir))
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    depths = parse_depth_list(args.depths)
    table = sweep_depth(cfg, depths, n_workers=args.workers)
    written = write_report(table, _resolve_out(args.out, cfg.output_dir))
    for path in written:
        print(f"wrote {path}")
    return 0


def _read_columns(path: Path, xcol: str | None, ycol: str | None):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames
        if not names or len(names) < 2:
            raise ValueError(f"{path}: need a header row with at least two columns")
        xcol = xcol or names[0]
        ycol = ycol or names[1]
        for col in (xcol, ycol):
            if col not in names:
                raise ValueError(f"{path}: no column {col!r}; have {', '.join(names)}")
        x, y = [], []
        for row in reader:
            sx, sy = row[xcol], row[ycol]
            if sx == "" or sy == "":
                continue  # rows without the observable (e.g. lost atoms)
            x.append(float(sx))
            y.append(float(sy))
    return np.array(x), np.array(y), xcol, ycol


def _cmd_fit(args) -> int:
    x, y, xcol, ycol = _read_columns(Path(args.input), args.xcol, args.ycol)
    result = _FIT_MODELS[args.model](x, y)
    print(f"model: {result.model}")
    print(f"data: {ycol} versus {xcol}, {x.size} points")
    for name, value in result.params.items():
        sigma = result.uncertainties[name]
        print(f"{name} = {value:.6g} +/- {sigma:.3g}")
    print(f"residual norm = {result.residual_norm:.6g}")
    return 0


def _cmd_report(args) -> int:
    written = report_from_directory(args.input, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
