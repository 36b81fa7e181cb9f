"""Command-line entry point for the worldline backreaction simulator."""

import argparse
import asyncio
import logging
import sys

from dotenv import load_dotenv

from physics.errors import SimulationError
from services.config_service import ConfigService
from services.scenario_service import ScenarioService


# ---- Logging Setup ----


logging.basicConfig(
    level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
)
logger = logging.getLogger(__name__)


# ---- Commands ----


async def simulate(args: argparse.Namespace) -> int:
    """Run one configuration and print where its outputs went."""
    config_service = await ConfigService.create()
    config = await config_service.parse_config(path=args.config)
    scenario_service = await ScenarioService.create()
    manifest = await scenario_service.run_scenario(
        config=config, seed=args.seed, output_dir=args.out
    )
    for name, checksum in manifest.files.items():
        print(f"{name}  {checksum}")
    for key, value in manifest.results.items():
        print(f"{key} = {value}")
    return 0


async def scenarios(args: argparse.Namespace) -> int:
    """Print the built-in scenario catalog."""
    scenario_service = await ScenarioService.create()
    for info in await scenario_service.list_scenarios():
        print(f"{info.name}: {info.description}")
        print(f"  required: {', '.join(info.required_keys)}")
    return 0


async def check(args: argparse.Namespace) -> int:
    """Validate a configuration without running it."""
    config_service = await ConfigService.create()
    config = await config_service.parse_config(path=args.config)
    print(f"{args.config}: valid '{config.scenario}' configuration")
    return 0


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the simulate, scenarios and check subcommands."""
    parser = argparse.ArgumentParser(prog="worldline", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("simulate", help="Run a scenario configuration.")
    run.add_argument("config", help="TOML configuration file.")
    run.add_argument("--seed", type=int, default=None, help="Override the base seed.")
    run.add_argument("--out", default=None, help="Override the output directory.")
    run.set_defaults(handler=simulate)

    listing = commands.add_parser("scenarios", help="List built-in scenarios.")
    listing.set_defaults(handler=scenarios)

    validate = commands.add_parser("check", help="Validate a configuration.")
    validate.add_argument("config", help="TOML configuration file.")
    validate.set_defaults(handler=check)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code.

    Exit codes are 0 on success, 2 for configuration errors and 3 for
    numerical errors.
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        return asyncio.run(args.handler(args))
    except SimulationError as e:
        logger.error(str(e))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
