# xdiff_lab/harness/cli.py
"""Command-line entry point: ``xdiff-lab <experiment> [options]``.

Exit codes: 0 when every check passes, 1 on a runtime failure, 2 on an
invalid configuration or inadmissible parameters, 3 when the experiment ran
but its verdict is FAIL.
"""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from xdiff_lab.config import ExperimentConfig
from xdiff_lab.exceptions import AdmissibilityError, ConfigError, XDiffError
from xdiff_lab.harness.experiments import run_experiment
from xdiff_lab.harness.models import ExperimentId
from xdiff_lab.logger import LabLogger

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_FAIL = 3

logger = LabLogger().get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xdiff-lab",
        description="Moderate-interaction particle systems with fractional "
        "cross-diffusion: seeded experiments with PASS/FAIL verdicts.",
    )
    parser.add_argument(
        "experiment",
        choices=[experiment.value for experiment in ExperimentId],
        help="Experiment to run",
    )
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="TOML config file (default: XDIFF_CONFIG or built-in defaults)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        type=str.upper,
    )
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = (
        ExperimentConfig.from_toml(args.config)
        if args.config is not None
        else ExperimentConfig.from_env()
    )
    return cfg.with_overrides(
        seed=args.seed,
        out=args.out,
        threads=args.threads,
        log_level=args.log_level,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    experiment = ExperimentId(args.experiment)

    try:
        cfg = load_config(args)
        verdict = run_experiment(cfg, experiment)
    except (ConfigError, AdmissibilityError, ValidationError) as e:
        logger.error(f"{experiment.value}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except XDiffError as e:
        logger.error(f"{experiment.value} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    print(f"{experiment.value}: {verdict.verdict}")
    for check in verdict.checks:
        mark = "ok" if check.passed else "FAILED"
        print(f"  {check.name}: {mark} {check.detail}".rstrip())
    return EXIT_OK if verdict.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
