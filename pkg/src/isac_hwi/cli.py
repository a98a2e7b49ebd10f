"""Command-line entry point: `isac-hwi run <scenario>` and `isac-hwi list`.

Exit codes: 0 success, 2 configuration error (unknown scenario/key, bad
config file), 3 runtime error (unwritable output, numerical failure).
"""

import argparse
import sys

from .config import load_settings, parse_set_args
from .frame import ConfigurationError
from .scenarios import SCENARIO_COLUMNS, ScenarioSpec, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isac-hwi",
        description="Physics-based vs aggregate-noise sensing bounds for "
                    "OFDM joint sensing/communication under PA and phase-noise "
                    "impairments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write its CSV table")
    run_p.add_argument("scenario", help="scenario name (see `isac-hwi list`)")
    run_p.add_argument("--config", default=None, metavar="PATH",
                       help="flat TOML file with setting overrides")
    run_p.add_argument("--set", dest="sets", action="append", default=[],
                       metavar="KEY=VALUE", help="override a single setting")
    run_p.add_argument("--out", default=None, metavar="PATH",
                       help="output CSV path (default <scenario>.csv)")
    run_p.add_argument("--seed", type=int, default=0, help="base RNG seed")

    sub.add_parser("list", help="list scenarios and their column contracts")
    return parser


def _cmd_list() -> int:
    for name in sorted(SCENARIO_COLUMNS):
        print(name)
        print("  columns: " + ", ".join(SCENARIO_COLUMNS[name]))
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        overrides = parse_set_args(args.sets)
        settings = load_settings(args.config)
        if args.scenario not in SCENARIO_COLUMNS:
            raise ConfigurationError(f"unknown scenario {args.scenario!r}")
        spec = ScenarioSpec(
            name=args.scenario, overrides=overrides,
            output_path=args.out or f"{args.scenario}.csv", seed=args.seed,
        )
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run_scenario(spec, settings)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # numerical failures surface as runtime errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {spec.output_path} ({len(table.rows)} rows)")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
