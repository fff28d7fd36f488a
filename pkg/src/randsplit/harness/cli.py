"""Command line entry point.

    randsplit table1|class1d|class2d|lambda-study|simulate
              [--config FILE] [--seed N] [--smoke] [--out DIR] [--workers N]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, InputError, RandsplitError
from .config import load_config
from .experiments import run_class1d, run_class2d, run_lambda_study, run_simulate, run_table1

_RUNNERS = {
    "table1": run_table1,
    "class1d": run_class1d,
    "class2d": run_class2d,
    "lambda-study": run_lambda_study,
    "simulate": run_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randsplit",
                                     description="Randomized continuous-time splitting experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", default=None, help="JSON config file")
        cmd.add_argument("--seed", type=int, default=None, help="master seed override")
        cmd.add_argument("--smoke", action="store_true", help="cap seeds/sizes for CI")
        cmd.add_argument("--out", default=None, help="output directory override")
        cmd.add_argument("--workers", type=int, default=None, help="worker processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.command.replace("-", "_")
    overrides = {
        "experiment": experiment,
        "master_seed": args.seed,
        "output_dir": args.out,
        "workers": args.workers,
    }
    if args.smoke:
        overrides["smoke"] = True
    try:
        cfg = load_config(args.config, overrides)
        result = _RUNNERS[args.command](cfg)
    except (ConfigError, InputError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except RandsplitError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    for path in result.get("paths", []):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
