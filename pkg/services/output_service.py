"""Output service for writing result tables and run manifests."""

import hashlib
import json
import logging
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from models import RunManifest, ScenarioConfig


logger = logging.getLogger(__name__)

PACKAGE_NAME = "worldline_backreaction"


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form of a configuration."""
    canonical = json.dumps(
        config.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def library_versions() -> dict[str, str]:
    """Versions recorded in every manifest."""
    try:
        own = metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {
        PACKAGE_NAME: own,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


@dataclass
class OutputService:
    """Service for serializing tables to CSV with checksums."""

    float_format: str = "%.17g"

    @classmethod
    async def create(cls) -> "OutputService":
        """Create a new OutputService instance."""
        return cls()

    def render(self, table: pd.DataFrame) -> bytes:
        """CSV bytes of a table with round-trip float precision."""
        text = table.to_csv(
            index=False, float_format=self.float_format, lineterminator="\n"
        )
        return text.encode("utf-8")

    async def write_table(
        self, *, directory: Path, name: str, table: pd.DataFrame
    ) -> str:
        """Write one table and return its SHA-256.

        Args:
            directory: Output directory, created when missing.
            name: File name.
            table: Data to write.

        Returns:
            str: Hex digest of the written bytes.
        """
        directory.mkdir(parents=True, exist_ok=True)
        content = self.render(table)
        (directory / name).write_bytes(content)
        logger.info(f"Wrote {len(table)} rows to {directory / name}")
        return hashlib.sha256(content).hexdigest()

    async def write_manifest(self, *, directory: Path, manifest: RunManifest) -> Path:
        """Write ``manifest.json`` next to the tables."""
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "manifest.json"
        text = json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True)
        path.write_text(text + "\n", encoding="utf-8")
        return path
