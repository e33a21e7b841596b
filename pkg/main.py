# Franktorio's Research Division
# WaveKin Lab entry point

# Standard library imports
import argparse
import datetime
import sys

# Local imports
import config.vars
import src.shared as shared

# Override print function to log outputs to file
import src.log_manager as log_manager  # This module overrides the print function
from automations.tests.validate_config import find_config_problems

from src.cli import config_loader, runner
from src.numerics.errors import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavekin", description="WaveKin Lab: wave turbulence numerics for the 2-D cubic NLS")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(shared.COMMANDS):
        cmd = sub.add_parser(name, help=shared.COMMANDS[name].description)
        cmd.add_argument("--config", help="Scenario file (key-value, JSON or manifest)")
        cmd.add_argument("--out", help="Output directory")
        cmd.add_argument("--threads", type=int, default=None, help="Worker cap")
        cmd.add_argument("--seed", type=int, default=None, help="Random seed (u64)")
        cmd.add_argument("--override", action="append", default=[], metavar="KEY=VAL", help="Override one scenario key")
    return parser


def main(argv=None) -> int:
    if config.vars.DEBUG_ENABLED:
        print("[WARNING] [MAIN] Debug logging is ENABLED")
    else:
        print("[WARNING] [MAIN] Debug logging is DISABLED")

    problems = find_config_problems()
    if problems:
        print(f"[ERROR] [MAIN] Configuration problems: {'; '.join(problems)}")
        return 2

    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print(f"[ERROR] [MAIN] --seed must be an unsigned 64-bit integer, got {args.seed}")
        return 2
    if args.threads is not None and args.threads < 1:
        print(f"[ERROR] [MAIN] --threads must be at least 1, got {args.threads}")
        return 2

    try:
        scenario = config_loader.build_config(args.config, args.override, kind=args.command, seed=args.seed,
                                              out_dir=args.out)
    except ConfigError as e:
        print(f"[ERROR] [MAIN] {e}")
        return e.exit_code

    now = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    print("=" * 50)
    print(f"[INFO] [MAIN] WaveKin Lab: {args.command}")
    print(f"[INFO] [MAIN] Time: {now}")
    print(f"[INFO] [MAIN] Output: {scenario.output.out_dir}")
    print("=" * 50)

    code = runner.run(scenario, threads=args.threads)
    print(f"[INFO] [MAIN] Exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
