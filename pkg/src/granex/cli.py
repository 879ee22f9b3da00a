"""Command line front end::

    granex <mode> --config <path> [--out <dir>] [--seed <u64>] [--dt <f>] [--steps <n>]

Exit status: 0 all checks passed, 1 a check failed, 2 invalid config,
3 runtime divergence. ``GRANEX_OUT`` overrides ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import MODES, ConfigError, parse_config
from .integrate import DivergenceError
from .runner import emit_report, run_scenario

log = logging.getLogger("granex")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="granex", description="Granular-gas mass-point toolkit")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", default="granex_out", help="output directory")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--dt", type=float, help="override the integration step")
    p.add_argument("--steps", type=int, help="override the number of steps")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = os.environ.get("GRANEX_OUT") or args.out
    try:
        cfg = parse_config(args.config)
        if cfg.mode != args.mode:
            raise ConfigError(f"mode: config declares {cfg.mode!r} but {args.mode!r} was requested")
        if args.seed is not None:
            cfg.seed = args.seed
        if args.dt is not None:
            if not args.dt > 0.0:
                raise ConfigError("dt must be positive")
            cfg.integration.dt = args.dt
        if args.steps is not None:
            if args.steps < 1:
                raise ConfigError("steps must be at least 1")
            cfg.integration.steps = args.steps
    except ConfigError as exc:
        print(f"granex: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_scenario(cfg, out)
    except DivergenceError as exc:
        print(f"granex: {args.config} ({cfg.mode}): diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ValueError, ArithmeticError) as exc:
        print(f"granex: {args.config} ({cfg.mode}): {exc}", file=sys.stderr)
        return EXIT_FAILED
    emit_report(report, out)
    for c in report.checks:
        log.info("%s %s value=%.3e tol=%.1e", "PASS" if c.passed else "FAIL", c.name, c.value, c.tolerance)
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
