import argparse
import sys
from pathlib import Path
from typing import List, Optional

from analysis_commands import AnalysisCommands
from bench_commands import BenchCommands
from custom_types.backend import Backend
from custom_types.log_level import LogLevel
from custom_types.run_mode import RunMode
from simulate_commands import SimulateCommands

# Every domain error derives from ValueError or RuntimeError.
RUN_ERRORS = (ValueError, RuntimeError, OSError)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="pairgenie",
        description="Particle and pair loop molecular dynamics with bond-order and common-neighbour analysis.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for mode in RunMode:
        sub = subparsers.add_parser(mode.value)
        sub.add_argument("--config", required=True, type=Path, help="Path to the key = value config file.")
        sub.add_argument("--workers", type=int, help="Worker threads for particle and pair loops.")
        sub.add_argument(
            "--backend",
            choices=[b.value for b in Backend],
            help="Pair loop backend.",
        )
        sub.add_argument("--seed", help="Integer seed, or 'random'.")
        sub.add_argument("--out", help="Output directory.")
        sub.add_argument("--debug", action="store_true", help="Log intermediate values.")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    mode = RunMode.from_value(args.command)
    level = LogLevel.DEBUG if args.debug else LogLevel.INFO
    match mode:
        case RunMode.SIMULATE:
            commands = SimulateCommands(level=level)
            run = commands.simulate
        case RunMode.ANALYZE_BOA:
            commands = AnalysisCommands(level=level)
            run = commands.analyze_boa
        case RunMode.ANALYZE_CNA:
            commands = AnalysisCommands(level=level)
            run = commands.analyze_cna
        case _:
            commands = BenchCommands(level=level)
            run = commands.bench
    overrides = commands.config_utils.overrides_from_flags(
        workers=args.workers, backend=args.backend, seed=args.seed, output_dir=args.out
    )
    overrides["mode"] = mode.value
    try:
        run(args.config, overrides, debug=args.debug)
    except RUN_ERRORS as e:
        print(f"pairgenie {mode.value}: {e}", file=sys.stderr)
        return 1
    finally:
        commands.loop_utils.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
