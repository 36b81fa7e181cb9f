"""Excitation rates of an internal oscillator carried along a prescribed path.

The reported observable is the stationary transition rate

    Ṙ(Ω) = e² w(Ω) ∫ ds e^{-iΩs} G⁺(x(s/2), x(-s/2)),   |s| <= T_obs

with w = 1 for monopole coupling and w = Ω² for minimal (derivative)
coupling. The accumulated response over the window is F = T_obs · Ṙ.
Negative Ω gives de-excitation rates.
"""

import logging
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
import pandas as pd

from physics.errors import ConfigurationError, NonTimelike, WrongVariant
from physics.geometry import AnalyticTrajectory, Path, induced_metric
from physics.greens import CorrelatorKernel, wightman_spectrum


logger = logging.getLogger(__name__)

DETECTOR_COLUMNS = ["omega", "z", "rate", "error_estimate"]
WINDOW_PERIODS = 200.0
# Excitation rates below this fraction of the de-excitation rate count as zero.
RATE_FLOOR = 1e-10


@dataclass(frozen=True)
class DetectorConfig:
    """Detector gap, coupling, path, field kernel and observation window."""

    omega: float
    trajectory: Path
    kernel: CorrelatorKernel
    coupling: Literal["monopole", "minimal"] = "monopole"
    e: float = 1.0
    window: float | None = None

    def __post_init__(self) -> None:
        """Fill the default window and check it resolves the gap."""
        if self.omega == 0.0:
            raise ConfigurationError("Detector gap must be nonzero")
        if self.coupling not in ("monopole", "minimal"):
            raise ConfigurationError(f"Unknown coupling '{self.coupling}'")
        if self.window is None:
            object.__setattr__(self, "window", WINDOW_PERIODS / abs(self.omega))
        if self.window <= 2.0 * np.pi / abs(self.omega):
            raise ConfigurationError(
                f"Observation window {self.window} must exceed one period 2π/|Ω| "
                f"= {2.0 * np.pi / abs(self.omega):.6g}"
            )


@dataclass(frozen=True)
class ResponseResult:
    """Accumulated response, rate per unit proper time and its quadrature error."""

    response: float
    rate: float
    error: float


def _lapse_weight(path: Path) -> float:
    """√h at the start of the path; proper-time paths give 1."""
    if isinstance(path, AnalyticTrajectory):
        return 1.0
    h = induced_metric(path.state(0))
    if h <= 0.0:
        raise NonTimelike(f"Induced metric {h} is not positive")
    return float(np.sqrt(h))


def response_rate(cfg: DetectorConfig) -> ResponseResult:
    """Transition rate of a detector on a stationary path.

    Args:
        cfg: Detector configuration.

    Returns:
        ResponseResult: F = T_obs·rate, the rate and its error estimate.

    Raises:
        NonStationaryTrajectory: If the path is not stationary for the kernel.
        QuadratureNotConverged: If the lag integral does not converge.
    """
    value, error = wightman_spectrum(
        cfg.kernel, cfg.trajectory, cfg.omega, window=cfg.window
    )
    weight = cfg.e**2 * _lapse_weight(cfg.trajectory) ** 2
    if cfg.coupling == "minimal":
        weight *= cfg.omega**2
    rate = weight * value
    return ResponseResult(response=cfg.window * rate, rate=rate, error=weight * error)


def detailed_balance_temperature(cfg: DetectorConfig) -> float:
    """T_eff = Ω / ln(rate(-Ω)/rate(Ω)) for |Ω| of the configuration."""
    gap = abs(cfg.omega)
    up = response_rate(replace(cfg, omega=gap)).rate
    down = response_rate(replace(cfg, omega=-gap)).rate
    if down <= up or up <= RATE_FLOOR * down:
        return 0.0
    return float(gap / np.log(down / up))


def response_vs_distance(cfg: DetectorConfig, distances: np.ndarray) -> pd.DataFrame:
    """Rates of a static detector at distances z in front of a static plane mirror.

    Args:
        cfg: Configuration whose kernel carries a ``static-plane-3p1`` mirror;
            the trajectory is replaced by static paths along the normal.
        distances: Positive distances from the mirror plane.

    Returns:
        pd.DataFrame: Columns ``omega,z,rate,error_estimate,factor`` where
            ``factor`` is the rate relative to the mirror-free rate.

    Raises:
        WrongVariant: Without a static plane mirror.
    """
    mirror = cfg.kernel.mirror
    if mirror is None or mirror.variant != "static-plane-3p1":
        raise WrongVariant("Distance scans need a static-plane-3p1 mirror")
    distances = np.asarray(distances, dtype=float)
    if np.any(distances <= 0.0):
        raise ConfigurationError("Distances must be positive")
    normal = mirror.unit_normal[1:]
    free = response_rate(
        replace(
            cfg,
            kernel=replace(cfg.kernel, mirror=None),
            trajectory=AnalyticTrajectory.static(),
        )
    )
    rows = []
    for z in distances:
        position = (mirror.offset + z) * normal
        static = AnalyticTrajectory.static(tuple(position))
        result = response_rate(replace(cfg, trajectory=static))
        factor = result.rate / free.rate if free.rate != 0.0 else np.nan
        rows.append((cfg.omega, z, result.rate, result.error, factor))
    logger.info(f"Evaluated detector rate at {len(rows)} distances")
    return pd.DataFrame(rows, columns=[*DETECTOR_COLUMNS, "factor"])


def mirror_modification(omega: float, z: float) -> float:
    """Closed-form Dirichlet factor 1 - sin(2Ωz)/(2Ωz)."""
    x = 2.0 * abs(omega) * z
    return float(1.0 - np.sinc(x / np.pi))
