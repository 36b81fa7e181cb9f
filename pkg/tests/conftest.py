"""Conftest file for pytest configuration and fixtures."""

import sys
from pathlib import Path

import numpy as np
import pytest
from dotenv import load_dotenv

# Add project root to Python path IMMEDIATELY (at import time)
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# Now we can import the package modules
from physics.ald import ParticleParams, SwitchProfile  # noqa: E402
from physics.geometry import AnalyticTrajectory  # noqa: E402
from physics.greens import CorrelatorKernel, FieldState  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


# Load environment variables from .env file before running tests
def pytest_configure(config: pytest.Config) -> None:
    """Load .env file before running tests."""
    env_path = project_root / ".env"
    if env_path.exists():
        load_dotenv(env_path)


@pytest.fixture
def data_file() -> callable:
    """Factory returning the path of a file in tests/data."""

    def _path(name: str) -> Path:
        return DATA_DIR / name

    return _path


@pytest.fixture
def config_text(data_file: callable) -> callable:
    """Factory returning the text of a TOML config in tests/data."""

    def _text(name: str) -> str:
        return data_file(name).read_text(encoding="utf-8")

    return _text


@pytest.fixture
def particle() -> ParticleParams:
    """Runaway-free particle with a short dressing time."""
    return ParticleParams(m0=1.0, e=0.3, cutoff=10.0)


@pytest.fixture
def switch() -> SwitchProfile:
    """Exponential switch with τ_d = 0.1."""
    return SwitchProfile(shape="exponential", tau_d=0.1)


@pytest.fixture
def vacuum_kernel() -> CorrelatorKernel:
    """Free 3+1 vacuum Hadamard kernel."""
    return CorrelatorKernel(kind="hadamard", state=FieldState(dimension=3), eps=0.1)


@pytest.fixture
def hyperbola() -> AnalyticTrajectory:
    """Unit proper acceleration along x¹ from rest at the origin."""
    return AnalyticTrajectory.uniform_acceleration(1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic generator for test inputs."""
    return np.random.default_rng(1234)
