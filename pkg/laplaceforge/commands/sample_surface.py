"""sample-surface: evaluate a test signal's transform at z points, optionally with noise."""

from __future__ import annotations

import argparse
import logging

from laplaceforge.commands.options import add_function_flags, function_spec, output_path
from laplaceforge.config import SURFACES_DIR
from laplaceforge.models.params import ZGridSpec
from laplaceforge.services.surface import sample_surface
from laplaceforge.storage.local import write_samples

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("sample-surface", parents=parents, help="sample a kime-surface of a test signal")
    add_function_flags(p)
    p.add_argument(
        "--z-grid",
        type=ZGridSpec.parse,
        default=ZGridSpec(kind="annulus", count=400, r_range=(0.5, 3.0), re_min=0.5),
        help="line re=..,im=lo..hi,count=N | annulus r=lo..hi,re_min=..,count=N | rect re=lo..hi,im=lo..hi,count=N",
    )
    p.add_argument("--noise", type=float, default=0.0, help="complex noise sigma on F")
    p.add_argument("--out", help="output CSV (re_z,im_z,re_F,im_F)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = function_spec(args)
    samples = sample_surface(spec, args.z_grid, noise_sigma=args.noise, seed=args.seed)
    out = output_path(args.out, SURFACES_DIR / "surface.csv")
    write_samples(samples, out)
    logger.info("Wrote CSV: %s (%d rows)", out, len(samples))
    return 0
