"""Main server file for the worldline backreaction simulator MCP."""

import logging

from fastmcp import FastMCP
from services.config_service import ConfigService
from services.scenario_service import ScenarioService


# Create the server
mcp = FastMCP(
    name="Worldline Backreaction Simulator",
    dependencies=[
        "fastmcp>=2.11.1",
        "pandas>=2.0.0",
        "numpy>=1.24.0",
        "scipy>=1.11.0",
        "pydantic>=2.5.0",
        "python-dotenv>=1.0.0",
    ],
)


# ---- Logging Setup ----


logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


# ---- MCP Tools ----


@mcp.prompt
async def run_unruh_scenario() -> str:
    """Get a prompt to run the uniformly accelerated charge scenario."""
    return (
        "Please run the 'uniform-acceleration-unruh' scenario. "
        "Start by calling 'list_scenarios' to get its example configuration, "
        "save it to a file, validate it with 'check_config' and then call 'simulate'. "
        "Report the fitted temperatures next to the Unruh temperature a/2π."
    )


@mcp.tool
async def list_scenarios() -> list[dict]:
    """Lists the built-in scenarios.

    Returns:
        list[dict]: Name, description, equations, required keys and an example
            TOML config per scenario.
    """
    scenario_service = await ScenarioService.create()
    scenarios = await scenario_service.list_scenarios()
    return [info.model_dump() for info in scenarios]


@mcp.tool
async def check_config(path: str) -> dict:
    """Validates a scenario configuration file without running it.

    Args:
        path: Path to a TOML configuration.

    Returns:
        dict: The scenario name, or an error message naming the offending key.
    """
    config_service = await ConfigService.create()
    return await config_service.check_config(path=path)


@mcp.tool
async def simulate(
    path: str, seed: int | None = None, output_dir: str | None = None
) -> dict:
    """Runs a scenario and writes its CSV tables and manifest.

    Args:
        path: Path to a TOML configuration.
        seed: Overrides the configured base seed.
        output_dir: Overrides the configured output directory.

    Returns:
        dict: The run manifest with checksums and scalar results, or an error message.
    """
    scenario_service = await ScenarioService.create()
    return await scenario_service.simulate(path=path, seed=seed, output_dir=output_dir)
