"""Scenario service for running named simulation pipelines."""

import asyncio
import logging
import os
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd

from models import RunManifest, ScenarioConfig, ScenarioInfo
from physics.ald import (
    ALDConfig,
    ExternalPotential,
    integrate_ald,
    larmor_power,
    naive_growth_rate,
    preacceleration_probe,
    pretuned_initial_acceleration,
    rr_turn_on_time,
    runaway_rate,
)
from physics.aldl import (
    EnsembleSpec,
    build_coefficients,
    fdr_check,
    member_seed,
    run_ensemble,
)
from physics.detector import (
    DETECTOR_COLUMNS,
    DetectorConfig,
    detailed_balance_temperature,
    mirror_modification,
    response_rate,
    response_vs_distance,
)
from physics.errors import (
    ConfigurationError,
    NonStationary,
    RunawayDetected,
    SimulationError,
)
from physics.geometry import AnalyticTrajectory, Worldline, minkowski_dot
from physics.greens import (
    CorrelatorKernel,
    FieldState,
    build_ray_map,
    hadamard_constrained_moving_1p1,
    hadamard_constrained_static,
    hadamard_free,
    mirror_energy_flux,
)
from physics.noise import (
    NoiseGrid,
    band_nperseg,
    build_covariance,
    noise_generator,
    noise_psd,
    psd_ratio,
    sample_noise,
)
from services.catalog import CATALOG
from services.config_service import ConfigService
from services.output_service import OutputService, config_hash, library_versions


logger = logging.getLogger(__name__)

BOUNDARY_SAMPLES = 50
# Largest relative gap between the settled mean acceleration and the hyperbola.
MEAN_TOLERANCE = 0.05

Tables = dict[str, pd.DataFrame]
Results = dict[str, float | None]
Pipeline = Callable[[ScenarioConfig, int, int], tuple[Tables, Results]]


# --- Shared helpers ---


def _ald_config(config: ScenarioConfig, **overrides: Any) -> ALDConfig:
    params = config.particle.to_params()
    integrator = config.integrator
    potential = (
        config.potential.to_potential()
        if config.potential is not None
        else ExternalPotential()
    )
    settings = dict(
        params=params,
        switch=config.switch.to_profile(params),
        potential=potential,
        mode=integrator.mode,
        dt=integrator.dt,
        tau_max=integrator.tau_max,
        x0=np.array([0.0, *integrator.initial_position]),
        u0=integrator.initial_four_velocity(),
        acc0=np.array([0.0, *integrator.initial_acceleration]),
        sweeps=integrator.sweeps,
        naive_g=integrator.naive_g,
    )
    settings.update(overrides)
    return ALDConfig(**settings)


def _worldline_table(worldline: Worldline, e: float) -> pd.DataFrame:
    table = worldline.to_frame()
    table["larmor_power"] = [larmor_power(state, e) for state in worldline.samples]
    return table


def _proper_acceleration(worldline: Worldline, index: int = -1) -> float:
    acc = worldline.acc[index]
    return float(np.sqrt(max(-float(minkowski_dot(acc, acc)), 0.0)))


def _hyperbola_deviation(mean: Worldline, a: float, settled: float) -> float:
    """Largest relative gap between the mean proper acceleration and ``a``."""
    late = mean.tau >= settled
    if not np.any(late):
        raise NonStationary(
            f"Mean worldline ends at tau={mean.tau[-1]:g}, "
            f"before the settling time {settled:g}"
        )
    acc = mean.acc[late]
    magnitude = np.sqrt(np.maximum(-minkowski_dot(acc, acc), 0.0))
    return float(np.max(np.abs(magnitude - a)) / a)


def _ensemble_seed(config: ScenarioConfig, seed: int) -> int:
    base_seed = config.ensemble.base_seed
    return base_seed if base_seed is not None else seed


def _wightman(config: ScenarioConfig, mirror=None) -> CorrelatorKernel:
    return CorrelatorKernel(
        kind="wightman", state=config.field.to_state(), mirror=mirror
    )


# --- Pipelines ---


def run_ald_causality(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Mean worldline with a late force and its preacceleration measure."""
    ald = _ald_config(config)
    worldline = integrate_ald(ald)
    results: Results = {
        "preacceleration_probe": preacceleration_probe(ald),
        "final_proper_acceleration": _proper_acceleration(worldline),
        "turn_on_time": None,
        "tau_d": ald.switch.tau_d,
    }
    if ald.potential.onset == 0.0:
        results["turn_on_time"] = rr_turn_on_time(worldline, ald.params, ald.switch)
    if ald.potential.is_linear:
        results["expected_proper_acceleration"] = float(
            np.linalg.norm(ald.potential.force) / ald.params.renormalized_mass
        )
    return {"worldline.csv": _worldline_table(worldline, ald.params.e)}, results


def run_ald_runaway(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Naive third-order integration and its exponential growth rate."""
    ald = _ald_config(config, mode="naive-third-order")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RunawayDetected)
        worldline = integrate_ald(ald)
    results: Results = {
        "growth_rate": runaway_rate(worldline),
        "expected_growth_rate": naive_growth_rate(ald),
        "runaway_warnings": float(len(caught)),
    }
    if ald.potential.is_linear and ald.potential.onset > 0.0:
        pretuned = replace(ald, acc0=pretuned_initial_acceleration(ald))
        results["pretuned_preacceleration"] = preacceleration_probe(pretuned)
    return {"worldline.csv": _worldline_table(worldline, ald.params.e)}, results


def run_uniform_acceleration_unruh(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Mean hyperbola, noise ensembles, static thermal baseline, spectra and FDR."""
    trajectory = config.trajectory.to_trajectory()
    if trajectory.kind != "uniform-acceleration":
        raise ConfigurationError(
            "uniform-acceleration-unruh needs a uniform-acceleration trajectory"
        )
    a = trajectory.proper_acceleration
    unruh = a / (2.0 * np.pi)
    ald = _ald_config(config)
    mean = integrate_ald(ald)
    tables: Tables = {"mean_worldline.csv": _worldline_table(mean, ald.params.e)}
    results: Results = {
        "unruh_temperature": unruh,
        "mean_proper_acceleration": _proper_acceleration(mean),
    }
    settled = config.ensemble.stats_start * ald.switch.tau_d
    deviation = _hyperbola_deviation(mean, a, settled)
    results["mean_acceleration_deviation"] = deviation
    if deviation > MEAN_TOLERANCE:
        raise NonStationary(
            f"Mean proper acceleration strays {deviation:.1%} from a={a:g} "
            f"after tau={settled:g}; "
            "the noise ensemble assumes the configured hyperbola"
        )

    noise, ensemble = config.noise, config.ensemble
    base_seed = _ensemble_seed(config, seed)
    potential = ald.potential
    vacuum = FieldState(dimension=3)
    thermal = FieldState(dimension=3, temperature=unruh)

    def ensemble_on(path: AnalyticTrajectory, state: FieldState):
        grid = NoiseGrid.uniform(path, n=noise.n_tau, dt=noise.dt)
        coefficients = build_coefficients(
            path,
            ald.params,
            ald.switch,
            tau=grid.tau,
            switch_tensors=ensemble.switch_tensors,
            running_mass=ensemble.running_mass,
        )
        spec = EnsembleSpec(
            grid=grid,
            kernel=CorrelatorKernel(kind="hadamard", state=state, eps=noise.eps),
            coefficients=coefficients,
            potential=potential,
            e=ald.params.e,
            weight=noise.bracket_weight,
            hbar=noise.hbar,
            hessian_sign=ensemble.hessian_sign,
            stats_start=settled,
        )
        return run_ensemble(spec, ensemble.n, base_seed, threads=threads)

    accelerated = ensemble_on(trajectory.canonical(), vacuum)
    static = ensemble_on(AnalyticTrajectory.static(), thermal)
    tables["ensemble.csv"] = accelerated.to_frame()
    tables["ensemble_static_thermal.csv"] = static.to_frame()
    tables["velocity_spectrum.csv"] = accelerated.spectrum
    results["temperature_accelerated"] = accelerated.temperature
    results["temperature_static_thermal"] = static.temperature
    results["temperature_ratio"] = accelerated.temperature / static.temperature

    if ensemble.n >= 100:
        ratio = _chi_psd_ratio(trajectory.canonical(), config, base_seed, threads)
        ratio["coth"] = 1.0 / np.tanh(np.pi * ratio["omega"] / a)
        tables["psd_ratio.csv"] = ratio
        band = ratio[(ratio["omega"] >= a / 2.0) & (ratio["omega"] <= 5.0 * a)]
        results["psd_max_deviation"] = float(
            np.max(np.abs(band["value"] / band["coth"] - 1.0))
        )

    if config.fdr is not None:
        kernel = CorrelatorKernel(kind="wightman", state=vacuum)
        report = _fdr_report(trajectory, kernel, config)
        tables["fdr.csv"] = report.table
        results["fdr_temperature"] = report.temperature
    return tables, results


def _chi_psd_ratio(
    path: AnalyticTrajectory, config: ScenarioConfig, base_seed: int, threads: int
) -> pd.DataFrame:
    """χ spectrum on ``path`` relative to a static vacuum path, with common seeds.

    The check runs on its own grid (``psd_n_tau``, ``psd_dt``) with the absolute
    regulator of the ensemble; the Welch segment is the shortest one that
    resolves the thermal band [a/2, a].
    """
    noise, members = config.noise, config.ensemble.n
    n = noise.psd_n_tau or noise.n_tau
    dt = noise.psd_dt or noise.dt
    a = path.proper_acceleration
    nperseg = band_nperseg(n, dt, a / 2.0, a)
    kernel = CorrelatorKernel(
        kind="hadamard", state=FieldState(dimension=3), eps=noise.eps
    )
    spectra = []
    for worldline in (path, AnalyticTrajectory.static()):
        grid = NoiseGrid.uniform(worldline, n=n, dt=dt)
        covariance = build_covariance(
            grid, kernel, hbar=noise.hbar, gradient=False, threads=threads
        )
        samples = np.stack(
            [
                sample_noise(covariance, member_seed(base_seed, i)).chi
                for i in range(members)
            ]
        )
        spectra.append(noise_psd(samples, dt, nperseg=nperseg))
    ratio = psd_ratio(*spectra)
    return ratio[ratio["omega"] > 0.0].reset_index(drop=True)


def _fdr_report(
    trajectory: AnalyticTrajectory, kernel: CorrelatorKernel, config: ScenarioConfig
):
    omegas = np.asarray(config.fdr.omegas)
    return fdr_check(trajectory, kernel, omegas, periods=config.fdr.window_periods)


def run_fdr_check(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Noise/dissipation spectral ratio on a stationary path."""
    mirror = config.mirror.to_mirror() if config.mirror is not None else None
    report = _fdr_report(
        config.trajectory.to_trajectory(), _wightman(config, mirror), config
    )
    return {"fdr.csv": report.table}, {
        "temperature": report.temperature,
        "temperature_error": report.temperature_error,
    }


def run_detector_response(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Excitation and de-excitation rates on a stationary trajectory."""
    settings = config.detector
    mirror = config.mirror.to_mirror() if config.mirror is not None else None
    trajectory = config.trajectory.to_trajectory()
    detector = DetectorConfig(
        omega=settings.omega,
        trajectory=trajectory,
        kernel=_wightman(config, mirror),
        coupling=settings.coupling,
        e=settings.e,
        window=settings.window,
    )
    distance = np.nan
    if mirror is not None and mirror.variant == "static-plane-3p1":
        normal = mirror.unit_normal[1:]
        distance = float(trajectory.position[1:] @ normal - mirror.offset)
    rows = []
    for omega in (abs(settings.omega), -abs(settings.omega)):
        result = response_rate(replace(detector, omega=omega))
        rows.append((omega, distance, result.rate, result.error))
    main = response_rate(detector)
    return {"detector.csv": pd.DataFrame(rows, columns=DETECTOR_COLUMNS)}, {
        "rate": main.rate,
        "response": main.response,
        "error_estimate": main.error,
        "detailed_balance_temperature": detailed_balance_temperature(detector),
    }


def _boundary_residual(config: ScenarioConfig, seed: int) -> float:
    """Largest constrained/free Hadamard ratio with one point on a static mirror."""
    mirror = config.mirror.to_mirror()
    state = config.field.to_state()
    eps = config.scan.eps
    rng = noise_generator(seed)
    worst = 0.0
    for _ in range(BOUNDARY_SAMPLES):
        y = np.concatenate([[rng.uniform(-1.0, 1.0)], rng.uniform(-2.0, 2.0, 3)])
        y2 = np.concatenate([[rng.uniform(-1.0, 1.0)], rng.uniform(-2.0, 2.0, 3)])
        if mirror.variant == "static-point-1p1":
            y[1:] = [mirror.offset, 0.0, 0.0]
            y2[2:] = 0.0
        else:
            n = mirror.unit_normal
            y = y - (y[1:] @ n[1:] - mirror.offset) * n
        constrained = hadamard_constrained_static(mirror, state, y, y2, eps)
        free = hadamard_free(state, y, y2, eps)
        ratio = abs(constrained) / max(abs(free), np.finfo(float).tiny)
        worst = max(worst, float(ratio))
    return worst


def run_mirror_static(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Dirichlet check on a static mirror and the detector rate versus distance."""
    results: Results = {"boundary_residual": _boundary_residual(config, seed)}
    tables: Tables = {}
    settings = config.detector
    plane = config.mirror.variant == "static-plane-3p1"
    if settings is not None and settings.distances and plane:
        detector = DetectorConfig(
            omega=settings.omega,
            trajectory=AnalyticTrajectory.static(),
            kernel=_wightman(config, config.mirror.to_mirror()),
            coupling=settings.coupling,
            e=settings.e,
            window=settings.window,
        )
        scan = response_vs_distance(detector, np.asarray(settings.distances))
        scan["closed_form"] = [
            mirror_modification(settings.omega, z) for z in scan["z"]
        ]
        tables["detector.csv"] = scan[DETECTOR_COLUMNS]
        tables["modification.csv"] = scan[["z", "factor", "closed_form"]]
        results["max_factor_deviation"] = float(
            np.nanmax(np.abs(scan["factor"] - scan["closed_form"]))
        )
    return tables, results


def run_mirror_moving(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Ray map, radiated flux and Dirichlet check for a moving mirror."""
    scan = config.scan
    ray_map = build_ray_map(config.mirror.to_mirror())
    us = np.linspace(scan.u_min, scan.u_max, scan.points)
    table = pd.DataFrame(
        {
            "u": us,
            "p": [ray_map.p(u) for u in us],
            "dp": [ray_map.dp(u) for u in us],
            "flux": [mirror_energy_flux(ray_map, u) for u in us],
        }
    )
    rng = noise_generator(seed)
    worst = 0.0
    for u in rng.uniform(scan.u_min, scan.u_max, BOUNDARY_SAMPLES):
        u2 = rng.uniform(scan.u_min, scan.u_max)
        v2 = ray_map.p(u2) + rng.uniform(0.1, 2.0)
        on_mirror = hadamard_constrained_moving_1p1(
            ray_map, (u, ray_map.p(u)), (u2, v2), scan.eps
        )
        worst = max(worst, abs(on_mirror))
    return {"flux.csv": table}, {
        "boundary_residual": worst,
        "max_abs_flux": float(table["flux"].abs().max()),
    }


def run_custom(
    config: ScenarioConfig, seed: int, threads: int
) -> tuple[Tables, Results]:
    """Mean worldline from the integrator section, plus an ensemble around it."""
    ald = _ald_config(config)
    mean = integrate_ald(ald)
    tables: Tables = {"worldline.csv": _worldline_table(mean, ald.params.e)}
    results: Results = {"final_proper_acceleration": _proper_acceleration(mean)}
    noise, ensemble = config.noise, config.ensemble
    if noise.n_tau * noise.dt > ald.tau_max:
        return tables, results
    grid = NoiseGrid.uniform(mean, n=noise.n_tau, dt=noise.dt)
    coefficients = build_coefficients(
        mean,
        ald.params,
        ald.switch,
        tau=grid.tau,
        switch_tensors=ensemble.switch_tensors,
        running_mass=ensemble.running_mass,
    )
    spec = EnsembleSpec(
        grid=grid,
        kernel=CorrelatorKernel(
            kind="hadamard", state=config.field.to_state(), eps=noise.eps
        ),
        coefficients=coefficients,
        potential=ald.potential,
        e=ald.params.e,
        weight=noise.bracket_weight,
        hbar=noise.hbar,
        hessian_sign=ensemble.hessian_sign,
        stats_start=ensemble.stats_start * ald.switch.tau_d,
    )
    stats = run_ensemble(
        spec, ensemble.n, _ensemble_seed(config, seed), threads=threads
    )
    tables["ensemble.csv"] = stats.to_frame()
    results["temperature"] = stats.temperature
    return tables, results


PIPELINES: dict[str, Pipeline] = {
    "ald-causality": run_ald_causality,
    "ald-runaway": run_ald_runaway,
    "uniform-acceleration-unruh": run_uniform_acceleration_unruh,
    "fdr-check": run_fdr_check,
    "detector-response": run_detector_response,
    "mirror-static": run_mirror_static,
    "mirror-moving": run_mirror_moving,
    "custom": run_custom,
}


# --- Service ---


@dataclass
class ScenarioService:
    """Service for running scenarios and writing their outputs."""

    threads: int = field(default=1, init=False)
    output: OutputService = field(default_factory=OutputService, init=False)

    @classmethod
    async def create(cls) -> "ScenarioService":
        """Create a new ScenarioService with the worker count from the environment.

        Returns:
            ScenarioService: A new instance; ``WORLDLINE_THREADS`` sets the threads.
        """
        instance = cls()
        raw = os.environ.get("WORLDLINE_THREADS")
        if raw:
            try:
                instance.threads = max(int(raw), 1)
            except ValueError:
                logger.error(f"Ignoring invalid WORLDLINE_THREADS value '{raw}'")
        instance.output = await OutputService.create()
        return instance

    async def list_scenarios(self) -> list[ScenarioInfo]:
        """Built-in scenarios with descriptions, required keys and example configs."""
        return list(CATALOG)

    async def run_scenario(
        self,
        *,
        config: ScenarioConfig,
        seed: int | None = None,
        output_dir: str | Path | None = None,
    ) -> RunManifest:
        """Execute a scenario pipeline and write its tables and manifest.

        Args:
            config: Validated configuration.
            seed: Overrides the configured base seed.
            output_dir: Overrides the configured output directory.

        Returns:
            RunManifest: Config hash, seed, versions, checksums and scalar results.

        Raises:
            SimulationError: Module errors, re-raised with the scenario name prepended.
        """
        base_seed = config.base_seed if seed is None else seed
        directory = Path(output_dir if output_dir is not None else config.output_dir)
        pipeline = PIPELINES[config.scenario]
        logger.info(
            f"Running '{config.scenario}' with seed {base_seed} "
            f"on {self.threads} thread(s)"
        )
        try:
            tables, results = await asyncio.to_thread(
                pipeline, config, base_seed, self.threads
            )
        except SimulationError as e:
            _with_context(e, config.scenario)
            raise

        files = {}
        for name in sorted(tables):
            files[name] = await self.output.write_table(
                directory=directory, name=name, table=tables[name]
            )
        manifest = RunManifest(
            scenario=config.scenario,
            config_hash=config_hash(config),
            seed=base_seed,
            versions=library_versions(),
            files=files,
            results={
                key: (None if value is None else float(value))
                for key, value in results.items()
            },
        )
        await self.output.write_manifest(directory=directory, manifest=manifest)
        return manifest

    async def simulate(
        self, *, path: str, seed: int | None = None, output_dir: str | None = None
    ) -> dict[str, Any]:
        """Parse a configuration file and run it.

        Returns:
            Dict with the manifest, or an error message.
        """
        try:
            config_service = await ConfigService.create()
            config = await config_service.parse_config(path=path)
            manifest = await self.run_scenario(
                config=config, seed=seed, output_dir=output_dir
            )
            return manifest.model_dump(mode="json")
        except SimulationError as e:
            logger.error(f"Error running scenario from {path}: {e}")
            return {"error": f"Failed to run scenario: {e}"}


def _with_context(error: SimulationError, scenario: str) -> SimulationError:
    """Prefix an error message with the scenario name, keeping its type."""
    message = error.args[0] if error.args else ""
    error.args = (f"[{scenario}] {message}", *error.args[1:])
    return error
