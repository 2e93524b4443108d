"""Command-line entry point: ``densecoding run --config exp.yaml``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import EXPERIMENTS, PRESETS, ConfigError, build_config, load_raw
from .experiments import run
from .open_system import ConvergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OUTPUT = 3
EXIT_CONVERGENCE = 4

log = logging.getLogger("densecoding")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="densecoding", description="Dense coding through a coupled-cavity array")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment and write a CSV table")
    r.add_argument("--config", help="YAML config, or a previous result table to rerun")
    r.add_argument("--experiment", choices=EXPERIMENTS, help="run without a config file")
    r.add_argument("--preset", choices=sorted(PRESETS))
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output path; '-' or omitted prints to stdout")
    r.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.config:
            raw = load_raw(args.config)
            if args.experiment:
                raw["experiment"] = args.experiment
        elif args.experiment:
            raw = {"experiment": args.experiment}
        else:
            raise ConfigError("give --config or --experiment")
        cfg = build_config(raw, preset=args.preset, seed=args.seed, output=args.out)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %s with preset %s", cfg.experiment, cfg.preset)
    try:
        table = run(cfg)
    except ConvergenceError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE

    if cfg.output in (None, "-"):
        sys.stdout.write(table.to_csv())
        return EXIT_OK
    try:
        table.write(cfg.output)
    except OSError as exc:
        print(f"cannot write {cfg.output}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    log.info("wrote %d rows to %s", len(table.rows), cfg.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
