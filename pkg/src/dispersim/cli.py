"""Command-line harness.

Verbs:
    dispersim run <config> [--out DIR] [--threads N] [--seed N]
    dispersim run --config <config> ...
    dispersim list-experiments
    dispersim validate <config>

Exit codes: 0 success, 2 usage error, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .config import EXPERIMENT_NAMES, ConfigDomainError, ConfigError, parse_config
from .errors import NumericalError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispersim",
        description="Chiral-waveguide state-transfer simulations.",
    )
    sub = parser.add_subparsers(dest="verb")

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("config_pos", nargs="?", metavar="CONFIG",
                     help="path to a JSON or TOML config")
    run.add_argument("--config", dest="config_flag", help="path to the config file")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--threads", type=int, default=None,
                     help="BLAS thread cap for the linear algebra backend")
    run.add_argument("--seed", type=int, default=None,
                     help="reserved; all current experiments are deterministic")

    sub.add_parser("list-experiments", help="list known experiment names")

    val = sub.add_parser("validate", help="parse and validate a config without running")
    val.add_argument("config_pos", nargs="?", metavar="CONFIG")
    val.add_argument("--config", dest="config_flag")

    return parser


def _config_path(args) -> Path:
    path = args.config_flag or args.config_pos
    if not path:
        raise ConfigError("no config file given (positional or --config)")
    return Path(path)


def _apply_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise ConfigError("--threads must be >= 1")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:
        pass  # env vars still apply to processes spawned later


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep both
        return int(exc.code or 0) and EXIT_USAGE

    if args.verb is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    if args.verb == "list-experiments":
        for name in EXPERIMENT_NAMES:
            print(name)
        return EXIT_OK

    try:
        spec = parse_config(_config_path(args))
    except ConfigDomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.verb == "validate":
        print(f"ok: experiment {spec.name!r} valid")
        return EXIT_OK

    # verb == "run"
    try:
        _apply_threads(args.threads)
        if args.out:
            spec = dataclasses.replace(spec, output_dir=Path(args.out))
        from .experiments import run_experiment

        files = run_experiment(spec)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    for path in files:
        print(path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
