"""exp-singvals: smallest singular value sweep and power-law fit."""

from __future__ import annotations

import argparse
import logging

from laplaceforge.commands.options import SCHEME_CHOICES, int_list, output_path, scheme
from laplaceforge.config import EXPERIMENTS_DIR
from laplaceforge.errors import NumericError
from laplaceforge.models.params import ZGridSpec
from laplaceforge.services.plotting import plot_sweep
from laplaceforge.services.rmt_lab import DEFAULT_Z_SAMPLER, fit_gamma, singval_sweep
from laplaceforge.storage.local import write_json, write_sweep

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("exp-singvals", parents=parents, help="sigma_min of the LT matrix against n")
    p.add_argument("--n-list", type=int_list, default=[8, 16, 32, 64, 128])
    p.add_argument("--aspect", type=float, default=1.2, help="rows per column, n' = ceil(aspect*n)")
    p.add_argument("--scheme", type=scheme, default="normalized_uniform", metavar="{" + ",".join(SCHEME_CHOICES) + "}")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--z-grid", type=ZGridSpec.parse, default=DEFAULT_Z_SAMPLER, help="z sampler; count is per row")
    p.add_argument(
        "--scale-with-n",
        action="store_true",
        help="multiply the imaginary range of a line or rect --z-grid by n, e.g. re=0..0.5,im=-0.5..0.5",
    )
    p.add_argument("--out", help="sweep CSV (n,n_prime,mean_sigma_min,std,trials)")
    p.add_argument("--fit-out", help="gamma fit JSON (default: next to --out)")
    p.add_argument("--plot", help="optional log-log SVG")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    sweep = singval_sweep(
        sorted(args.n_list),
        aspect=args.aspect,
        scheme=args.scheme,
        z_sampler=args.z_grid,
        trials=args.trials,
        seed=args.seed,
        threads=args.threads,
        scale_with_n=args.scale_with_n,
    )
    out = output_path(args.out, EXPERIMENTS_DIR / "singvals.csv")
    write_sweep(sweep, out)
    logger.info("Wrote CSV: %s", out)

    fit = None
    if len(sweep.rows) >= 4:
        fit = fit_gamma(sweep)
        fit_out = output_path(args.fit_out, out.with_suffix(".fit.json"))
        write_json(fit.model_dump(), fit_out)
        logger.info("gamma = %.4f (r^2 %.4f); wrote %s", fit.gamma, fit.r_squared, fit_out)
    elif args.fit_out:
        raise NumericError(f"gamma fit needs >= 4 sweep rows, got {len(sweep.rows)}")

    if args.plot:
        plot_sweep(sweep, args.plot, fit)
    return 0
