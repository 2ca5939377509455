"""
Command-line entry point.

Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric or invalid input.
Failures print one JSON record {"error", "message", "exit_code", ...} to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from laplaceforge.commands import COMMANDS
from laplaceforge.commands.options import common_flags
from laplaceforge.errors import LaplaceForgeError, StorageError, UsageError

logger = logging.getLogger("laplaceforge.cli")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> CliParser:
    parser = CliParser(
        prog="laplaceforge",
        description="Forward and inverse Laplace transforms of sampled data, with random-matrix experiments.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="<command>")
    subparsers.required = True
    parents = [common_flags()]
    for command in COMMANDS:
        command.register(subparsers, parents)
    return parser


def _fail(record: dict) -> int:
    print(json.dumps(record), file=sys.stderr)
    return int(record["exit_code"])


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as ex:
        return _fail(ex.record())

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
    )

    try:
        return int(args.handler(args) or 0)
    except LaplaceForgeError as ex:
        logger.debug("%s failed", args.command, exc_info=True)
        return _fail(ex.record())
    except ValidationError as ex:
        messages = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in ex.errors())
        return _fail(UsageError(f"invalid parameters: {messages}").record())
    except OSError as ex:
        return _fail(StorageError(str(ex)).record())
    except Exception as ex:
        logger.exception("%s failed unexpectedly", args.command)
        return _fail({"error": "internal", "message": str(ex), "exit_code": 3})
