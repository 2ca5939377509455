"""exp-partition: scheme comparison, order-statistics and dependence diagnostics."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from laplaceforge.commands.options import SCHEME_CHOICES, output_path, scheme
from laplaceforge.config import EXPERIMENTS_DIR, IRWIN_HALL_MAX_N
from laplaceforge.models.params import PartitionScheme
from laplaceforge.services.partitions import (
    INDEPENDENT_CONTROL,
    compare_schemes,
    dependence_check,
    exp_order_stats_check,
    gen_partition,
    irwin_hall_ratio_cdf,
)
from laplaceforge.storage.local import write_csv, write_json, write_partition

logger = logging.getLogger("laplaceforge.cli")

DEPENDENCE_SCHEMES = (
    PartitionScheme.normalized_uniform.value,
    PartitionScheme.normalized_exponential.value,
    INDEPENDENT_CONTROL,
)


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("exp-partition", parents=parents, help="random partition diagnostics")
    p.add_argument("--n", type=int, default=4, help="ratio points (n + 1 variates) for the distribution checks")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--scheme", type=scheme, default="normalized_uniform", metavar="{" + ",".join(SCHEME_CHOICES) + "}")
    p.add_argument("--out", help="scheme comparison CSV (scheme,j,mean,std)")
    p.add_argument("--report", help="JSON with KS, ratio CDF and dependence results (default: next to --out)")
    p.add_argument("--partition-out", help="also draw one partition of --scheme with n + 1 intervals")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    n = args.n

    table = compare_schemes(n + 1, min(args.trials, 2000), rng)
    out = output_path(args.out, EXPERIMENTS_DIR / "partition_schemes.csv")
    write_csv(table, out)
    logger.info("Wrote CSV: %s", out)

    report = {
        "n": n,
        "trials": args.trials,
        "exp_order_stats": exp_order_stats_check(n, max(args.trials, 10_000), rng).model_dump(),
        "dependence": [],
    }
    if n >= 2:
        for label in DEPENDENCE_SCHEMES:
            report["dependence"].append(dependence_check(label, n, max(args.trials, 1000), rng).model_dump())
    if n <= IRWIN_HALL_MAX_N:
        t_grid = np.linspace(0.0, 1.0, 21)
        report["irwin_hall_ratio_cdf"] = {
            "t": t_grid.tolist(),
            "cdf": {str(k): [irwin_hall_ratio_cdf(k, n, t) for t in t_grid] for k in range(1, n + 1)},
        }
    report_path = output_path(args.report, out.with_suffix(".json"))
    write_json(report, report_path)
    logger.info("Wrote report: %s", report_path)

    if args.partition_out:
        write_partition(gen_partition(args.scheme, n + 1, rng), args.partition_out)
        logger.info("Wrote partition: %s", args.partition_out)
    return 0
