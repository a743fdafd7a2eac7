"""Command-line entry points: one subcommand per experiment.

Usage:
    thirringlab data-convergence --out reports/dc --eps-count 12 --p 1 --p 1.5 --p 2
    thirringlab all --config lab.ini --out reports

Config files are flat key-value INI text with one section per experiment id
(a [DEFAULT] section applies to all); command-line flags override file values.
Exit code is 0 iff every verdict of every requested experiment passed.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .errors import ConfigError
from .experiments import (
    EXPERIMENT_IDS,
    ExperimentConfig,
    config_from_section,
    run_experiment,
)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None, help="INI config file")
    sub.add_argument("--out", type=Path, default=None, help="output directory for reports")
    sub.add_argument("--mesh-delta", type=float, default=None, help="lattice step")
    sub.add_argument("--eps-count", type=int, default=None, help="number of eps values")
    sub.add_argument(
        "--alpha", type=float, action="append", default=None, help="phase target (repeatable)"
    )
    sub.add_argument("--mass", type=float, default=None, help="mass parameter")
    sub.add_argument(
        "--p", type=float, action="append", default=None, help="Lebesgue exponent (repeatable)"
    )
    sub.add_argument(
        "--s", type=float, action="append", default=None, help="Sobolev order (repeatable)"
    )
    sub.add_argument(
        "--seed",
        type=int,
        default=None,
        help="reserved and unused: all computations are deterministic",
    )
    sub.add_argument(
        "--no-plots",
        action="store_true",
        help="skip rendering figures next to the CSV output",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thirringlab",
        description="Numerical laboratory for the 1+1D Thirring model ill-posedness phenomena.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for exp_id in EXPERIMENT_IDS + ("all",):
        sub = subparsers.add_parser(exp_id, help=f"run the {exp_id} experiment(s)")
        _add_common_flags(sub)
    return parser


def _config_for(experiment: str, args: argparse.Namespace) -> ExperimentConfig:
    section = {}
    if args.config is not None:
        ini = configparser.ConfigParser()
        read = ini.read(args.config)
        if not read:
            raise ConfigError(f"config file {args.config} not found or unreadable")
        if ini.has_section(experiment):
            section = dict(ini[experiment])
        else:
            section = dict(ini.defaults())
    cfg = config_from_section(experiment, section)
    overrides = {}
    if args.mesh_delta is not None:
        overrides["mesh_delta"] = args.mesh_delta
    if args.eps_count is not None:
        overrides["eps_count"] = args.eps_count
    if args.alpha:
        overrides["alphas"] = tuple(args.alpha)
    if args.mass is not None:
        overrides["mass"] = args.mass
    if args.p:
        overrides["p_values"] = tuple(args.p)
    if args.s:
        overrides["s_values"] = tuple(args.s)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    experiments = list(EXPERIMENT_IDS) if args.command == "all" else [args.command]
    out_root = args.out if args.out is not None else Path("reports")
    all_passed = True
    for exp_id in experiments:
        try:
            cfg = _config_for(exp_id, args)
            report = run_experiment(cfg)
        except ConfigError as exc:
            print(f"[{exp_id}] config error: {exc}", file=sys.stderr)
            return 2
        out_dir = out_root / exp_id if args.command == "all" else out_root
        path = report.write(out_dir, plots=not args.no_plots)
        status = "PASS" if report.passed else "FAIL"
        print(f"[{exp_id}] {status} -> {path}")
        for name, ok in sorted(report.verdicts.items()):
            print(f"    {'ok  ' if ok else 'FAIL'} {name}")
        all_passed &= report.passed
    return 0 if all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
