# Copyright (c) 2026, The itebasis authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command-line entry point ``itebasis``.

Exit codes: 0 success, 1 failed validation or unexpected error, 2 configuration
or domain error, 3 non-convergence, 4 boundary collision, 5 degenerate
determinant.
"""

import argparse
import sys
from typing import List, Optional

from ._version import __version__
from .config import load_config
from .errors import ItebasisError
from .log import log, set_log_level
from .workflows import (
    cmd_basis,
    cmd_density,
    cmd_eval,
    cmd_expand,
    cmd_grid,
    cmd_indicator,
    cmd_spectrum,
    cmd_strips,
    cmd_validate,
)

COMMANDS = [
    "eval",
    "spectrum",
    "density",
    "strips",
    "indicator",
    "basis",
    "expand",
    "grid",
    "validate",
]


def _parse_k(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a complex number")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itebasis",
        description="Interior transmission eigenvalues of radially symmetric "
        "scatterers and the exponential systems they generate.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="JSON run configuration.")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=JSON",
        help="Override a config value, e.g. --set search.re_max=40 (repeatable).",
    )
    common.add_argument("--workers", type=int, help="Threads for the zero search.")
    common.add_argument("--seed", type=int, help="Seed of the contour jitter.")
    common.add_argument("--out", help="Path of the JSON report (default: stdout).")
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level.",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        if name == "eval":
            cmd.add_argument("--k", type=_parse_k, help="Wavenumber, e.g. 3+0.5i.")
        if name in ("spectrum", "grid"):
            cmd.add_argument("--csv", help="Path of the CSV output.")
        if name == "expand":
            cmd.add_argument("--samples", help="Samples CSV with header r,re_f,im_f.")
    return parser


def run(args: argparse.Namespace) -> int:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    config = load_config(args.config, overrides)

    if args.command == "eval":
        cmd_eval(config, k=args.k, out=args.out)
    elif args.command == "spectrum":
        cmd_spectrum(config, workers=args.workers, out=args.out, csv_path=args.csv)
    elif args.command == "density":
        cmd_density(config, workers=args.workers, out=args.out)
    elif args.command == "strips":
        cmd_strips(config, workers=args.workers, out=args.out)
    elif args.command == "indicator":
        cmd_indicator(config, out=args.out)
    elif args.command == "basis":
        cmd_basis(config, workers=args.workers, out=args.out)
    elif args.command == "expand":
        cmd_expand(config, samples=args.samples, workers=args.workers, out=args.out)
    elif args.command == "grid":
        cmd_grid(config, out=args.out, csv_path=args.csv)
    elif args.command == "validate":
        envelope = cmd_validate(config, workers=args.workers, out=args.out)
        if not envelope.payload["passed"]:
            return 1
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_log_level(args.log_level)
    try:
        return run(args)
    except ItebasisError as e:
        log.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        log.exception(f"Unexpected error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
