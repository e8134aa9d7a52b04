"""Command-line entry point.

Each subcommand takes ``--config <json>`` and ``--out <dir>``; ``--seed``
overrides the config seed.  Exit status: 0 on success, 1 when a numerical
guard trips, 2 for configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import NumericalError
from .experiments import SUBCOMMANDS, load_config, run_experiment

log = logging.getLogger("linfspec")

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linfspec", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "gen": "generate a signal, with optional gap and degeneracy certificates",
        "filter": "apply a trapezoid or predictor kernel to a signal",
        "predict": "one-step prediction sweep over gamma and r",
        "recover": "recover missing samples from a known spectral gap",
        "recover-variants": "enumerate recoveries over candidate gaps of a given measure",
        "spectrum": "dump partial spectra X_m on a frequency grid",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--no-plots", action="store_true", help="skip SVG output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, SUBCOMMANDS[args.command], args.seed)
        if args.no_plots:
            cfg.plots = False
        files = run_experiment(cfg, args.out)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for f in files:
        log.info("wrote %s", f)
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
