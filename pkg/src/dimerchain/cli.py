"""Command-line interface.

    dimerchain spectrum|peaks|localization --config <file-or-preset>
               [--out <dir>] [--plot] [--threads k] [--seed s]
    dimerchain presets

Exit codes: 0 success, 1 validation error, 2 computation sentinel present,
3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DimerChainError
from .experiments import (load_config, preset_names, run_localization,
                          run_peak_analysis, run_spectrum)

_RUNNERS = {
    "spectrum": run_spectrum,
    "peaks": run_peak_analysis,
    "localization": run_localization,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dimerchain",
        description="Single-photon transport through dimer chains on 1D waveguides.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "transmission/reflection against detuning"),
        ("peaks", "resonance-peak positions, separation and height difference"),
        ("localization", "disorder ensembles and localization-length fits"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True,
                       help="path to a JSON config, or a bundled preset name (e.g. fig4)")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--plot", action="store_true", help="also render an SVG figure")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_parser("presets", help="list bundled figure presets")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in preset_names():
            print(name)
        return 0
    try:
        config = load_config(args.config)
        report = _RUNNERS[args.command](
            config, args.out, plot=args.plot, threads=args.threads, seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except DimerChainError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2
    for path in report.csv_paths + report.svg_paths + [report.manifest_path]:
        print(f"wrote {path}")
    if report.sentinel_count:
        print(f"warning: {report.sentinel_count} sentinel value(s) in output", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
