"""Command-line harness: converge | dissipate | blowup | skyrmion.

Each subcommand reads a flat key-value config file, optionally patched by
repeatable ``--override key=value`` flags, runs the experiment and exits
with status 0 iff every asserted invariant of that experiment held.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    cmd_blowup,
    cmd_converge,
    cmd_dissipate,
    cmd_skyrmion,
    format_error_table,
)
from .io import ConfigError, parse_config


def _add_common(sub):
    sub.add_argument("--config", required=True, help="path to the run config file")
    sub.add_argument("--out", default=None, help="output directory (overrides config)")
    sub.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="llgsip",
        description="Structured-grid semi-implicit projection solver for the "
        "Landau-Lifshitz-Gilbert equation",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("converge", "manufactured-solution refinement study"),
        ("dissipate", "energy-dissipation sweep over damping parameters"),
        ("blowup", "near-singular bubble evolution with snapshots"),
        ("skyrmion", "relax a topological seed to a static texture"),
    ]:
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)
        if name == "skyrmion":
            sub.add_argument(
                "--resume", default=None, help="checkpoint to resume from"
            )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, overrides=args.override)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if config.experiment != args.command:
        print(
            f"config describes experiment {config.experiment!r}, "
            f"but subcommand is {args.command!r}",
            file=sys.stderr,
        )
        return 2
    if args.out is not None:
        config.out_dir = args.out

    if args.command == "converge":
        result = cmd_converge(config)
        print(format_error_table(result.records))
    elif args.command == "dissipate":
        result = cmd_dissipate(config)
        for gamma, series in result.energies.items():
            print(f"gamma={gamma:g}: E0={series[0][2]:.6e} -> E={series[-1][2]:.6e}")
        for gamma, step, rise in result.violations:
            print(
                f"energy rose by {rise:.3e} at step {step} (gamma={gamma:g})",
                file=sys.stderr,
            )
    elif args.command == "blowup":
        result = cmd_blowup(config)
        print(f"wrote {len(result.snapshots)} snapshots")
        for step, rise in result.violations:
            print(f"energy rose by {rise:.3e} at step {step}", file=sys.stderr)
    else:
        result = cmd_skyrmion(config, resume=args.resume)
        status = "steady" if result.steady else "budget exhausted"
        print(f"{status}; Q = {result.charge:.4f}; state -> {result.snapshot_path}")
        for step, rise in result.violations:
            print(f"energy rose by {rise:.3e} at step {step}", file=sys.stderr)

    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
