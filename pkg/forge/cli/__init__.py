"""
The batch command line front end: ``forge <command> --config <path> [--set k=v]...``
"""
import argparse
from collections.abc import Sequence

from forge import PROGRAM_NAME
from forge.cli.config import RunConfig, load_raw_config, parse_override, parse_value
from forge.cli.exception import CLIError, ConfigError
from forge.cli.runner import CommandRunner, COMMAND_SECTIONS, EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED, run
from forge.logger import configure_from_env, LOG_ENV_VAR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROGRAM_NAME.lower(),
        description="Synthesise, optimise and stress-test resonant dipole-dipole Rydberg CZ gate pulses.",
        epilog=f"Set {LOG_ENV_VAR} to one of error, info, debug to control verbosity.",
    )
    parser.add_argument("command", choices=list(COMMAND_SECTIONS), help="The operation to run.")
    parser.add_argument("--config", type=str, default=None, help="Path to the TOML run configuration.")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override a configuration value. The value is parsed as a TOML literal. May be repeated.",
    )
    parser.add_argument("--out", type=str, default=None, help="Directory to write outputs to.")
    parser.add_argument("--seed", type=int, default=None, help="Seed for every random choice of the run.")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for optimisation and simulation.")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, configure logging from the environment and run the command"""
    args = build_parser().parse_args(argv)
    configure_from_env()
    return run(
        args.command,
        args.config,
        overrides=args.overrides,
        output_dir=args.out,
        seed=args.seed,
        threads=args.threads,
    )
