"""ilt-discrete: randomized ILT of a sampled kime-surface."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from laplaceforge.commands.options import SCHEME_CHOICES, output_path, scheme
from laplaceforge.config import DEFAULT_GRID_POINTS, ESTIMATES_DIR, resolve_threads
from laplaceforge.models.params import Aggregation, IltConfig, Truncation
from laplaceforge.services.discrete_ilt import randomized_ilt
from laplaceforge.services.plotting import plot_ensemble
from laplaceforge.storage.local import read_samples, write_ensemble

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("ilt-discrete", parents=parents, help="randomized ILT of surface samples")
    p.add_argument("--input", required=True, help="surface CSV with header re_z,im_z,re_F,im_F")
    p.add_argument("--n1", type=int, help="partition size (default ceil(sqrt(N)))")
    p.add_argument("--n2", type=int, help="points per attempt (default 2*n1)")
    p.add_argument("--itn", type=int, help="attempts (default ceil(sqrt(N)))")
    p.add_argument("--rcond", type=float, help="relative singular value cutoff")
    p.add_argument(
        "--truncation",
        choices=[t.value for t in Truncation],
        default=Truncation.gcv.value,
        help="rank per attempt: gcv (cross-validated, within --rcond) or rcond (every value above the cutoff)",
    )
    p.add_argument(
        "--scheme",
        type=scheme,
        default=None,
        metavar="{" + ",".join(SCHEME_CHOICES) + "}",
        help="partition scheme (default segments_centered)",
    )
    p.add_argument("--aggregation", choices=[a.value for a in Aggregation], default="median")
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--out", help="output CSV (t,mean,median,q25,q75)")
    p.add_argument("--diagnostics", help="diagnostics JSON (default: next to --out)")
    p.add_argument("--plot", help="optional SVG of the median and quartile band")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    samples = read_samples(args.input)
    cfg = IltConfig.for_samples(
        len(samples),
        n1=args.n1,
        n2=args.n2,
        itn=args.itn,
        rcond=args.rcond,
        seed=args.seed,
        partition_scheme=args.scheme,
        aggregation=args.aggregation,
        truncation=args.truncation,
        grid_points=args.grid_points,
        threads=resolve_threads(args.threads),
    )
    est = randomized_ilt(samples, cfg)

    out = output_path(args.out, ESTIMATES_DIR / "ilt_discrete.csv")
    diagnostics = Path(args.diagnostics) if args.diagnostics else out.with_suffix(".json")
    write_ensemble(est, out, diagnostics)
    logger.info("Wrote CSV: %s, diagnostics: %s", out, diagnostics)

    if args.plot:
        plot_ensemble(est, args.plot)
    return 0
