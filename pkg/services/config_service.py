"""Configuration service for reading and validating scenario files."""

import logging
import re
import tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import pydantic

from models import ScenarioConfig
from physics.errors import (
    ConfigurationError,
    ParseError,
    SimulationError,
    ValidationError,
)


logger = logging.getLogger(__name__)

LINE_PATTERN = re.compile(r"line (\d+)")


def _error_line(error: tomllib.TOMLDecodeError) -> int | None:
    line = getattr(error, "lineno", None)
    if line is not None:
        return line
    match = LINE_PATTERN.search(str(error))
    return int(match.group(1)) if match else None


def _convert(error: pydantic.ValidationError) -> ConfigurationError:
    """First pydantic error as ParseError (unknown key) or ValidationError."""
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "scenario"
    if first["type"] == "extra_forbidden":
        return ParseError("unknown key", key=key)
    if first["type"] == "missing":
        return ParseError("required key is missing", key=key)
    return ValidationError(key, first["msg"])


@dataclass
class ConfigService:
    """Service for parsing TOML scenario configurations."""

    @classmethod
    async def create(cls) -> "ConfigService":
        """Create a new ConfigService instance."""
        return cls()

    async def parse_text(self, *, text: str) -> ScenarioConfig:
        """Parse and validate configuration text.

        Args:
            text: TOML document.

        Returns:
            ScenarioConfig: Validated configuration with numerical defaults filled.

        Raises:
            ParseError: On malformed TOML, unknown or missing keys.
            ValidationError: On constraint violations.
        """
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ParseError(str(e), line=_error_line(e)) from e
        try:
            return ScenarioConfig.model_validate(raw)
        except pydantic.ValidationError as e:
            raise _convert(e) from e

    async def parse_config(self, *, path: str | Path) -> ScenarioConfig:
        """Read and validate a UTF-8 TOML scenario file.

        Args:
            path: Configuration file.

        Returns:
            ScenarioConfig: Validated configuration.

        Raises:
            ParseError: If the file cannot be read or parsed.
            ValidationError: On constraint violations.
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ParseError(f"cannot read configuration '{path}': {e}") from e
        config = await self.parse_text(text=text)
        logger.info(f"Parsed '{config.scenario}' scenario from {path}")
        return config

    async def check_config(self, *, path: str | Path) -> dict[str, Any]:
        """Validate a configuration file without running it.

        Returns:
            Dict with the scenario name, or an error message.
        """
        try:
            config = await self.parse_config(path=path)
            return {"valid": True, "scenario": config.scenario}
        except SimulationError as e:
            logger.error(f"Invalid configuration {path}: {e}")
            return {"error": f"Failed to validate configuration: {e}"}
