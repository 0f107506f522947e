"""Command-line entry point: ``dirac-edge run|validate|list-experiments``."""

from __future__ import annotations

import argparse
import sys

from .config import parse_config, override
from .errors import ConfigError, NumericalContractError
from .experiments import REGISTRY, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-edge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides [output] dir)")
    run.add_argument("--dt", type=float, help="time step override")
    run.add_argument("--grid", type=int, help="grid points per axis override")
    val = sub.add_parser("validate", help="parse a config and print the resolved form")
    val.add_argument("config")
    sub.add_parser("list-experiments", help="print the registered experiment names")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-experiments":
        print("\n".join(REGISTRY))
        return EXIT_OK
    try:
        config = _load(args.config)
        if args.command == "validate":
            print(config.resolved_text(), end="")
            return EXIT_OK
        override(config, dt=args.dt, grid=args.grid, out=args.out)
        run = run_experiment(config)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalContractError as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print("\n".join(run.summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
