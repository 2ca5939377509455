"""lt: forward Laplace transform of a sampled signal."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from laplaceforge.commands.options import output_path
from laplaceforge.config import SURFACES_DIR
from laplaceforge.models.params import ZGridSpec
from laplaceforge.services.forward_lt import lt_signal
from laplaceforge.storage.local import read_signal, write_samples

logger = logging.getLogger("laplaceforge.cli")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("lt", parents=parents, help="forward LT of a t,y CSV signal")
    p.add_argument("--input", required=True, help="signal CSV with header t,y")
    p.add_argument(
        "--z-line",
        "--z-grid",
        dest="z_grid",
        type=ZGridSpec.parse,
        required=True,
        help="evaluation points, e.g. re=0.1,im=0..20,count=200",
    )
    p.add_argument("--degree", type=int, choices=(3, 4), default=4)
    p.add_argument(
        "--reparameterize",
        action="store_true",
        help="map the sample window affinely onto [0, 2pi] before fitting",
    )
    p.add_argument("--out", help="output CSV (re_z,im_z,re_F,im_F)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    sig = read_signal(args.input)
    zs = args.z_grid.points(np.random.default_rng(args.seed))
    samples = lt_signal(sig, zs, degree=args.degree, reparameterize=args.reparameterize)
    out = output_path(args.out, SURFACES_DIR / "lt.csv")
    write_samples(samples, out)
    logger.info("Wrote CSV: %s (%d rows)", out, len(samples))
    return 0
