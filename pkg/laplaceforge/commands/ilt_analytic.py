"""ilt-analytic: cosh-kernel inversion of a test signal's transform on a time grid."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from laplaceforge.commands.options import add_function_flags, float_range, function_spec, output_path
from laplaceforge.config import DOMAIN_END, ESTIMATES_DIR, resolve_threads
from laplaceforge.models.params import IltParams
from laplaceforge.services.analytic_ilt import ilt_on_grid
from laplaceforge.services.plotting import emit_plot
from laplaceforge.services.surface import transform_function, truth_function
from laplaceforge.storage.local import write_signal

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("ilt-analytic", parents=parents, help="analytic ILT of a test signal's transform")
    add_function_flags(p)
    p.add_argument("--t-range", type=float_range, default=(0.1, DOMAIN_END - 0.1), help="lo..hi, lo > 0")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--a", dest="a_param", type=float, default=6.0)
    p.add_argument("--n-sum", type=int, default=50)
    p.add_argument("--n-euler", type=int, default=12)
    p.add_argument("--out", help="output CSV (t,y)")
    p.add_argument("--plot", help="optional SVG comparing against the true signal")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = function_spec(args)
    params = IltParams(a_param=args.a_param, n_sum=args.n_sum, n_euler=args.n_euler)
    ts = np.linspace(*args.t_range, args.points)
    recovered = ilt_on_grid(transform_function(spec), ts, params, threads=resolve_threads(args.threads))

    out = output_path(args.out, ESTIMATES_DIR / "ilt_analytic.csv")
    write_signal(recovered, out)
    logger.info("Wrote CSV: %s (%d rows)", out, len(recovered))

    if args.plot:
        series = {"recovered": (ts, recovered.y), "truth": (ts, truth_function(spec)(ts))}
        emit_plot(series, args.plot, title=f"analytic ILT of {args.function}", ylabel="f(t)")
    return 0
