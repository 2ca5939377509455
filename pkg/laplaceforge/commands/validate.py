"""validate: run acceptance checks and write a JSON report; nonzero exit on any failure."""

from __future__ import annotations

import argparse
import logging

from laplaceforge.commands.options import output_path
from laplaceforge.config import REPORTS_DIR, resolve_threads
from laplaceforge.models.params import ValidationSettings
from laplaceforge.services.validation import CASES, run_validation
from laplaceforge.storage.local import write_json

logger = logging.getLogger("laplaceforge.cli")

VALIDATION_FAILED = 3


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("validate", parents=parents, help="run acceptance checks")
    p.add_argument("--case", choices=["all", *CASES], default="all")
    p.add_argument("--points", type=int, default=200, help="signal samples for the forward-LT check")
    p.add_argument("--out", help="report JSON")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = ValidationSettings(points=args.points, seed=args.seed, threads=resolve_threads(args.threads))
    report = run_validation(args.case, settings)
    out = output_path(args.out, REPORTS_DIR / f"validate_{args.case}.json")
    write_json({"passed": report.passed, **report.model_dump()}, out)
    logger.info("Wrote report: %s", out)
    for check in report.checks:
        print(f"{check.name:28s} {'PASS' if check.passed else 'FAIL'}  metric={check.metric:.3e}  threshold={check.threshold:.1e}")
    return 0 if report.passed else VALIDATION_FAILED
