"""Argument types and flags shared by the subcommands."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from laplaceforge.config import COMPOSITE_NOISE_DEFAULT
from laplaceforge.errors import UsageError
from laplaceforge.models.params import PartitionScheme, TestFunctionSpec

logger = logging.getLogger("laplaceforge.cli")


def common_flags() -> argparse.ArgumentParser:
    """Parent parser for flags every subcommand accepts."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=seed_value, default=0, help="master seed (64-bit)")
    parent.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads, 0 = one per CPU (default: $LAPLACEFORGE_THREADS or 1)",
    )
    parent.add_argument("--verbose", action="store_true", help="debug logging")
    return parent


def seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed must fit in 64 bits: {text}")
    return value


def float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def float_range(text: str) -> tuple[float, float]:
    lo, hi = (float(part) for part in text.split("..", 1))
    if hi <= lo:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


def scheme(text: str) -> PartitionScheme:
    return PartitionScheme(text)


SCHEME_CHOICES = [s.value for s in PartitionScheme]


def add_function_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--function",
        required=True,
        help="test signal: sin(w), composite, or a t,y CSV path",
    )
    parser.add_argument(
        "--signal-noise",
        type=float,
        default=None,
        help=f"time-domain noise sigma (default {COMPOSITE_NOISE_DEFAULT} for composite, else 0)",
    )


def function_spec(args: argparse.Namespace) -> TestFunctionSpec:
    noise = args.signal_noise
    if noise is None:
        noise = COMPOSITE_NOISE_DEFAULT if args.function.strip() == "composite" else 0.0
    try:
        return TestFunctionSpec.parse(args.function, noise_sigma=noise, seed=args.seed)
    except ValueError as ex:
        raise UsageError(f"--function: {ex}") from ex


def output_path(flag: str | Path | None, default: Path) -> Path:
    return Path(flag) if flag else default
