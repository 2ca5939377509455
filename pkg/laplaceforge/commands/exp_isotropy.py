"""exp-isotropy: phase-moment Monte-Carlo, the I0 second moment and Bessel-zero breakpoints."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from laplaceforge.commands.options import float_list, output_path
from laplaceforge.config import EXPERIMENTS_DIR
from laplaceforge.models.params import PhaseDist
from laplaceforge.services.numerics import bessel_i0, bessel_j0
from laplaceforge.services.rmt_lab import (
    bessel_zero_isotropy,
    bessel_zero_partition,
    isotropy_mc,
    phase_integral_identity,
    uniform_phase_second_moment,
)
from laplaceforge.storage.local import write_json

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("exp-isotropy", parents=parents, help="isotropy checks of the LT matrix entries")
    p.add_argument("--a-list", type=float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--p", dest="p_value", type=float, default=1.0, help="breakpoint for the second-moment check")
    p.add_argument("--r", dest="r_value", type=float, default=1.0, help="|z| for the second-moment check")
    p.add_argument("--bessel-r", type=float, help="also run the Bessel-zero strategy at this r")
    p.add_argument("--bessel-n", type=int, default=5, help="number of J0 zeros for --bessel-r")
    p.add_argument("--out", help="report JSON")
    p.set_defaults(handler=run)


def _row(dist: PhaseDist, a: float, trials: int, rng: np.random.Generator) -> dict:
    est = isotropy_mc(dist, a, trials, rng)
    target = 1.0 if dist.kind == "uniform" else bessel_j0(a) / bessel_i0(a)
    return {
        "dist": dist.kind,
        "a": a,
        "mean_c": [est.mean_c.real, est.mean_c.imag],
        "se_c": est.se_c,
        "mean_cc": est.mean_cc,
        "se_cc": est.se_cc,
        "target_c": target,
        "within_4se": est.within(target_c=target),
    }


def run(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    rows = [_row(dist, a, args.trials, rng) for dist in (PhaseDist.uniform(), PhaseDist.von_mises()) for a in args.a_list]

    moment = uniform_phase_second_moment(args.p_value, args.r_value, args.trials, rng)
    exact = bessel_i0(2.0 * args.p_value * args.r_value) - 1.0
    identities = []
    for a in args.a_list:
        lhs, rhs = phase_integral_identity(a)
        identities.append({"a": a, "lhs": [lhs.real, lhs.imag], "rhs": rhs, "gap": abs(lhs - rhs)})

    report = {
        "trials": args.trials,
        "phase_moments": rows,
        "second_moment": {"p": args.p_value, "r": args.r_value, "estimate": moment, "exact": exact},
        "phase_integral": identities,
    }
    if args.bessel_r is not None:
        partition = bessel_zero_partition(args.bessel_r, args.bessel_n)
        estimates = bessel_zero_isotropy(args.bessel_r, args.bessel_n, args.trials, rng)
        report["bessel_zeros"] = {
            "r": args.bessel_r,
            "breakpoints": partition.to_json()["breakpoints"],
            "mean_c": [[e.mean_c.real, e.mean_c.imag] for e in estimates],
            "mean_cc": [e.mean_cc for e in estimates],
        }

    out = output_path(args.out, EXPERIMENTS_DIR / "isotropy.json")
    write_json(report, out)
    logger.info("Wrote report: %s", out)
    return 0
