"""Command-line runner: ``mhfem example1|example2|custom --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import report as rpt
from .config import DEFAULT_LEVELS, ConfigError, RunConfig, load_config, parse_levels
from .fourier import ProblemSpec
from .linalg import ConvergenceError, FactorizationError
from .problems import example1, example2
from .solver import MultiharmonicSolver

log = logging.getLogger("mhfem")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def run_levels(spec: ProblemSpec, config: RunConfig):
    """Run every level of ``config``; returns ``(reports, failure_rows)``."""
    reports, failures = [], []
    for level in config.levels:
        try:
            solver = MultiharmonicSolver(spec, level, rel_tol=config.rel_tol,
                                         quad_degree=config.quad_degree)
            reports.append(solver.run())
        except (ConvergenceError, FactorizationError) as exc:
            log.error("level %d aborted: %s", level, exc)
            failures.append(rpt.failure_row(spec.name, level, "", str(exc)))
    return reports, failures


def run_example1(levels=DEFAULT_LEVELS, **kw):
    reports, _ = run_levels(example1(), RunConfig("example1", levels, N=1, **kw))
    return reports


def run_example2(levels=DEFAULT_LEVELS, N: int = 8, **kw):
    reports, _ = run_levels(example2(N), RunConfig("example2", levels, N=N, **kw))
    return reports


def run_custom(config: RunConfig):
    if config.spec is None:
        raise ConfigError("config: no problem definition")
    reports, _ = run_levels(config.spec, config)
    return reports


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhfem", description="Multiharmonic FEM with guaranteed error majorants.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--levels", default=None,
                        help="comma-separated cells per side (default 9,27,81,243)")
    common.add_argument("--tol", type=float, default=None, help="relative solver tolerance")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("csv", "table"), default="csv")
    common.add_argument("--timings", action="store_true",
                        help="add a CPU-time column to the table output")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("example1", parents=[common], help="time-harmonic benchmark")
    ex2 = sub.add_parser("example2", parents=[common], help="multiharmonic benchmark")
    ex2.add_argument("--N", type=int, default=8, help="truncation index (default 8)")
    custom = sub.add_parser("custom", parents=[common], help="problem from a config file")
    custom.add_argument("--config", required=True)
    return parser


def _config_from_args(args) -> tuple[ProblemSpec, RunConfig]:
    levels = parse_levels(args.levels) if args.levels is not None else None
    kw = dict(out=args.out, fmt=args.fmt)
    if args.tol is not None:
        kw["rel_tol"] = args.tol
    if args.command == "custom":
        cfg = load_config(args.config, levels=levels, rel_tol=kw.pop("rel_tol", None), **kw)
        return cfg.spec, cfg
    levels = levels or DEFAULT_LEVELS
    if args.command == "example1":
        return example1(), RunConfig("example1", levels, N=1, **kw)
    return example2(args.N), RunConfig("example2", levels, N=args.N, **kw)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec, config = _config_from_args(args)
        if args.command == "example2" and args.N < 0:
            raise ConfigError(f"N: must be >= 0, got {args.N}")
    except (ConfigError, ValueError) as exc:
        print(f"mhfem: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    reports, failures = run_levels(spec, config)
    if config.fmt == "csv":
        text = rpt.to_csv(reports, failures)
    else:
        text = rpt.to_table(reports, timings=args.timings, failures=failures)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_SOLVER if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
