"""Linear stochastic fluctuations around a mean worldline.

The deviation z(τ) obeys

    m(τ) z̈^μ = η^μ + s H^μ_ν z^ν + (e²/8π)(S^μ_ν ż^ν + R^μ_ν z⃛^ν)

with R^μ_ν = g(τ)(δ^μ_ν - u^μ u_ν), S^μ_ν = g(τ)(ẍ² δ^μ_ν - u^μ x⃛_ν),
H^μ_ν = ∂^μ∂_ν V and s = +1 for the linearization of the external force.
z⃛ is replaced by the derivative of the zeroth-order acceleration
(η + sHz)/m, as in the mean-worldline integrator.
"""

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd
from scipy import optimize, signal

from physics.ald import (
    ExternalPotential,
    ParticleParams,
    SwitchProfile,
    mass_m,
    switch_g,
    switch_rate,
)
from physics.errors import (
    ConfigurationError,
    GridMismatch,
    MissingJerk,
    NonStationary,
    NonStationaryTrajectory,
    RunawayDetected,
    TooFewMembers,
)
from physics.geometry import (
    METRIC,
    AnalyticTrajectory,
    Path,
    Worldline,
    is_stationary,
    minkowski_dot,
)
from physics.greens import CorrelatorKernel, stationary_reference, wightman_spectrum
from physics.noise import (
    NoiseCovariance,
    NoiseGrid,
    assemble_eta,
    build_covariance,
    sample_noise,
)


logger = logging.getLogger(__name__)

RUNAWAY_BOUND = 1e12


# --- Coefficients ---


@dataclass(frozen=True)
class LangevinCoefficients:
    """Mixed-index tensors R^μ_ν, S^μ_ν and the mass on a proper-time grid."""

    tau: np.ndarray
    projector: np.ndarray
    R: np.ndarray
    S: np.ndarray
    g: np.ndarray
    mass: np.ndarray
    mass_rate: np.ndarray
    prefactor: float

    @property
    def dt(self) -> float:
        """Grid spacing."""
        return float(self.tau[1] - self.tau[0])


def build_coefficients(
    mean: Path,
    params: ParticleParams,
    switch: SwitchProfile,
    *,
    tau: np.ndarray | None = None,
    switch_tensors: bool = True,
    running_mass: bool = True,
) -> LangevinCoefficients:
    """Evaluate the fluctuation-equation coefficients along a mean path.

    Args:
        mean: Mean worldline with jerk data, or an analytic trajectory.
        params: Particle parameters.
        switch: Dressing profile.
        tau: Grid, required for analytic trajectories; defaults to the samples.
        switch_tensors: Multiply R and S by g(τ).
        running_mass: Use m(τ); otherwise the renormalized mass throughout.

    Returns:
        LangevinCoefficients: Tensors with prefactor e²/8π.

    Raises:
        MissingJerk: If the worldline has no jerk data.
    """
    if isinstance(mean, Worldline):
        if mean.jerk is None:
            raise MissingJerk("Fluctuation coefficients need the mean jerk")
        tau = mean.tau if tau is None else np.asarray(tau, dtype=float)
    elif tau is None:
        raise ConfigurationError(
            "A proper-time grid is required for analytic trajectories"
        )
    tau = np.asarray(tau, dtype=float)
    if tau.size < 2:
        raise GridMismatch("Coefficient grid needs at least 2 points")
    _, u, acc, jerk = mean.arrays(tau)
    u_lower = u @ METRIC
    jerk_lower = jerk @ METRIC
    identity = np.broadcast_to(np.eye(4), (tau.size, 4, 4))
    acc_sq = minkowski_dot(acc, acc)
    if isinstance(mean, AnalyticTrajectory):
        acc_sq = np.full(tau.size, -mean.proper_acceleration**2)

    projector = identity - np.einsum("nm,nk->nmk", u, u_lower)
    S = acc_sq[:, None, None] * identity - np.einsum("nm,nk->nmk", u, jerk_lower)
    g = switch_g(tau, switch) if switch_tensors else np.ones(tau.size)
    g = np.atleast_1d(g)
    if running_mass:
        mass = np.atleast_1d(mass_m(tau, params, switch))
        mass_rate = -params.mass_shift * np.array([switch_rate(t, switch) for t in tau])
    else:
        mass = np.full(tau.size, params.renormalized_mass)
        mass_rate = np.zeros(tau.size)
    return LangevinCoefficients(
        tau=tau,
        projector=projector,
        R=g[:, None, None] * projector,
        S=g[:, None, None] * S,
        g=g,
        mass=mass,
        mass_rate=mass_rate,
        prefactor=params.e**2 / (8.0 * np.pi),
    )


# --- Integration ---


@dataclass(frozen=True)
class FluctuationTrajectory:
    """Deviation z(τ) and its derivatives; leading axes index ensemble members."""

    tau: np.ndarray
    z: np.ndarray
    v: np.ndarray
    acc: np.ndarray
    seed: int | None = None

    def to_frame(self) -> pd.DataFrame:
        """Single-member table ``tau,z0..3,v0..3,acc0..3``."""
        if self.z.ndim != 2:
            raise ConfigurationError("Only single-member trajectories can be tabulated")
        columns = {"tau": self.tau}
        for name, values in (("z", self.z), ("v", self.v), ("acc", self.acc)):
            for k in range(4):
                columns[f"{name}{k}"] = values[:, k]
        return pd.DataFrame(columns)


def integrate_aldl(
    coeffs: LangevinCoefficients,
    potential: ExternalPotential,
    eta: np.ndarray,
    *,
    z0: np.ndarray | None = None,
    v0: np.ndarray | None = None,
    hessian_sign: Literal["linearized", "literal"] = "linearized",
    seed: int | None = None,
) -> FluctuationTrajectory:
    """RK4 integration of the order-reduced fluctuation equation.

    Noise and coefficients are linearly interpolated inside each step, and
    the noise derivative inside step i is (η_{i+1} - η_i)/dt, so z(τ_i)
    depends on noise at τ <= τ_i only.

    Args:
        coeffs: Coefficients on the grid.
        potential: External potential supplying the Hessian.
        eta: Noise of shape (n, 4) or (members, n, 4).
        z0: Initial deviation, zero by default.
        v0: Initial deviation velocity, zero by default.
        hessian_sign: ``linearized`` uses +∂^μ∂_νV z^ν; ``literal`` flips it.
        seed: Seed recorded on the result.

    Returns:
        FluctuationTrajectory: z, ż and z̈ on the grid.

    Raises:
        GridMismatch: If the noise grid differs from the coefficient grid.
    """
    eta = np.asarray(eta, dtype=float)
    n = coeffs.tau.size
    if eta.shape[-2:] != (n, 4):
        raise GridMismatch(f"Noise shape {eta.shape} does not match {n} grid points")
    sign = 1.0 if hessian_sign == "linearized" else -1.0
    hessian = sign * potential.hessian()
    c = coeffs.prefactor
    dt = coeffs.dt
    lead = eta.shape[:-2]

    def lerp(values: np.ndarray, i: int, theta: float) -> np.ndarray:
        return values[i] + theta * (values[i + 1] - values[i])

    def rhs(
        i: int, theta: float, z: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        noise = lerp(np.moveaxis(eta, -2, 0), i, theta)
        noise_rate = (np.take(eta, i + 1, axis=-2) - np.take(eta, i, axis=-2)) / dt
        R, S = lerp(coeffs.R, i, theta), lerp(coeffs.S, i, theta)
        m, m_rate = lerp(coeffs.mass, i, theta), lerp(coeffs.mass_rate, i, theta)
        drive = noise + z @ hessian.T
        jerk = (noise_rate + v @ hessian.T) / m - m_rate * drive / m**2
        acc = (drive + c * (v @ S.T + jerk @ R.T)) / m
        return v, acc

    def start(value: np.ndarray | None) -> np.ndarray:
        if value is None:
            return np.zeros(lead + (4,))
        return np.broadcast_to(np.asarray(value, dtype=float), lead + (4,)).copy()

    z, v = start(z0), start(v0)
    zs = np.zeros(lead + (n, 4))
    vs = np.zeros_like(zs)
    accs = np.zeros_like(zs)
    warned = False
    for i in range(n):
        step = min(i, n - 2)
        theta = 1.0 if i == n - 1 else 0.0
        zs[..., i, :], vs[..., i, :] = z, v
        accs[..., i, :] = rhs(step, theta, z, v)[1]
        if not warned and not np.all(np.abs(z) < RUNAWAY_BOUND):
            message = (
                f"Fluctuation amplitude exceeded {RUNAWAY_BOUND:.0e} "
                f"at tau={coeffs.tau[i]:.6g}"
            )
            logger.warning(message)
            warnings.warn(message, RunawayDetected, stacklevel=2)
            warned = True
        if i == n - 1:
            break
        k1z, k1v = rhs(i, 0.0, z, v)
        k2z, k2v = rhs(i, 0.5, z + 0.5 * dt * k1z, v + 0.5 * dt * k1v)
        k3z, k3v = rhs(i, 0.5, z + 0.5 * dt * k2z, v + 0.5 * dt * k2v)
        k4z, k4v = rhs(i, 1.0, z + dt * k3z, v + dt * k3v)
        z = z + dt * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0
        v = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
    return FluctuationTrajectory(tau=coeffs.tau, z=zs, v=vs, acc=accs, seed=seed)


def energy_decay_rate(
    params: ParticleParams, omega: float, *, mass: float | None = None
) -> float:
    """Order-reduced damping rate e²ω²/(8πm) of oscillator energy."""
    m = params.renormalized_mass if mass is None else mass
    return params.e**2 * omega**2 / (8.0 * np.pi * m)


# --- Ensembles ---


@dataclass(frozen=True)
class EnsembleSpec:
    """Everything one ensemble member needs, shared read-only across members."""

    grid: NoiseGrid
    kernel: CorrelatorKernel
    coefficients: LangevinCoefficients
    potential: ExternalPotential
    e: float
    weight: float = 0.5
    hbar: float = 1.0
    hessian_sign: Literal["linearized", "literal"] = "linearized"
    stats_start: float = 0.0
    covariance: NoiseCovariance | None = None


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregated statistics of an ensemble of fluctuation trajectories."""

    members: int
    base_seed: int
    tau: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray
    transverse_covariance: np.ndarray
    spectrum: pd.DataFrame
    temperature: float | None = None
    seeds: list[int] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """Per-τ rows of the mean and upper-triangle covariance components."""
        columns = {"tau": self.tau}
        for k in range(4):
            columns[f"mean{k}"] = self.mean[:, k]
        for a in range(4):
            for b in range(a, 4):
                columns[f"cov{a}{b}"] = self.covariance[:, a, b]
        for a in range(4):
            columns[f"tcov{a}{a}"] = self.transverse_covariance[:, a, a]
        return pd.DataFrame(columns)


def member_seed(base_seed: int, index: int) -> int:
    """Seed of ensemble member ``index``."""
    return base_seed ^ index


def run_ensemble(
    spec: EnsembleSpec, n: int, base_seed: int, *, threads: int = 1
) -> EnsembleStats:
    """Sample n noise histories, integrate each and aggregate.

    Member i uses seed ``base_seed ^ i``; results are gathered in member
    order, so statistics do not depend on thread scheduling.

    Args:
        spec: Shared ensemble inputs.
        n: Number of members, at least 2.
        base_seed: Base seed.
        threads: Worker threads for sampling.

    Returns:
        EnsembleStats: Mean, covariances, late-time velocity spectrum and the
            equipartition temperature k⟨z⊥²⟩ when the potential is harmonic.

    Raises:
        TooFewMembers: If n < 2.
    """
    if n < 2:
        raise TooFewMembers(f"An ensemble needs at least 2 members, got {n}")
    if not np.allclose(spec.grid.tau, spec.coefficients.tau):
        raise GridMismatch("Noise grid and coefficient grid differ")
    covariance = spec.covariance
    if covariance is None:
        covariance = build_covariance(
            spec.grid, spec.kernel, hbar=spec.hbar, threads=threads
        )
    seeds = [member_seed(base_seed, i) for i in range(n)]

    def member_noise(seed: int) -> np.ndarray:
        realization = sample_noise(covariance, seed)
        return assemble_eta(
            spec.grid.worldline, realization, e=spec.e, weight=spec.weight
        )

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        eta = np.stack(list(pool.map(member_noise, seeds)))
    logger.info(f"Sampled noise for {n} members on {spec.grid.n} grid points")

    result = integrate_aldl(
        spec.coefficients, spec.potential, eta, hessian_sign=spec.hessian_sign
    )
    z = result.z
    mean = z.mean(axis=0)
    centered = z - mean
    covariance_z = np.einsum("mna,mnb->nab", centered, centered) / (n - 1)
    transverse = np.einsum("nab,mnb->mna", spec.coefficients.projector, z)
    transverse -= transverse.mean(axis=0)
    transverse_cov = np.einsum("mna,mnb->nab", transverse, transverse) / (n - 1)

    late = spec.grid.tau >= spec.stats_start
    spectrum = _velocity_spectrum(
        result.v[:, late, :], spec.coefficients.projector[late], spec.grid.dt
    )
    temperature = None
    if spec.potential.is_harmonic:
        axes = list(spec.potential.axes)
        spread = np.mean(transverse_cov[late][:, axes, axes])
        temperature = float(spec.potential.k * spread)
        logger.info(f"Equipartition temperature k<z^2> = {temperature:.6g}")
    return EnsembleStats(
        members=n,
        base_seed=base_seed,
        tau=spec.grid.tau,
        mean=mean,
        covariance=covariance_z,
        transverse_covariance=transverse_cov,
        spectrum=spectrum,
        temperature=temperature,
        seeds=seeds,
    )


def _velocity_spectrum(v: np.ndarray, projector: np.ndarray, dt: float) -> pd.DataFrame:
    """Welch spectrum of the transverse velocity, summed over spatial components."""
    transverse = np.einsum("nab,mnb->mna", projector, v)
    samples = transverse.shape[1]
    if samples < 8:
        return pd.DataFrame({"omega": [], "value": []})
    frequencies, power = signal.welch(
        transverse[..., 1:],
        fs=1.0 / dt,
        nperseg=max(samples // 4, 8),
        detrend="constant",
        axis=1,
    )
    return pd.DataFrame(
        {
            "omega": 2.0 * np.pi * frequencies,
            "value": power.sum(axis=-1).mean(axis=0),
        }
    )


# --- Fluctuation-dissipation ---


@dataclass(frozen=True)
class FDRReport:
    """Noise and dissipation spectra of a stationary pullback, with fitted T."""

    table: pd.DataFrame
    temperature: float
    temperature_error: float


def _coth_ratio(omega: np.ndarray, temperature: float) -> np.ndarray:
    return 1.0 / np.tanh(omega / (2.0 * temperature))


def fdr_check(
    path: Path,
    kernel: CorrelatorKernel,
    omegas: np.ndarray,
    *,
    window: float | None = None,
    periods: float = 200.0,
) -> FDRReport:
    """Compare noise and dissipation spectra on a stationary path.

    With F(ω) the transform of the Wightman pullback, the noise spectrum is
    F(ω) + F(-ω) and the dissipation spectrum, from the commutator, is
    F(-ω) - F(ω). Their ratio is fitted to coth(ω/2T).

    Args:
        path: Stationary mean path.
        kernel: 3+1 kernel.
        omegas: Positive frequencies.
        window: Fixed lag window for every frequency.
        periods: Window in units of 1/ω when ``window`` is not given.

    Returns:
        FDRReport: Table ``omega,noise,dissipation,ratio,fit`` and T_eff,
            which is 0 when the ratio is 1 (zero temperature).

    Raises:
        NonStationary: If the path is not stationary for this kernel.
    """
    if not is_stationary(path):
        raise NonStationary("Fluctuation-dissipation check needs a stationary path")
    try:
        stationary_reference(kernel, path)
    except NonStationaryTrajectory as e:
        raise NonStationary(str(e)) from e
    omegas = np.asarray(omegas, dtype=float)
    if np.any(omegas <= 0.0):
        raise ConfigurationError("FDR frequencies must be positive")
    rows = []
    for omega in omegas:
        span = window if window is not None else periods / omega
        up, _ = wightman_spectrum(kernel, path, omega, window=span)
        down, _ = wightman_spectrum(kernel, path, -omega, window=span)
        rows.append((omega, up + down, down - up))
    table = pd.DataFrame(rows, columns=["omega", "noise", "dissipation"])
    table["ratio"] = table["noise"] / table["dissipation"]

    if np.allclose(table["ratio"], 1.0, atol=1e-6):
        table["fit"] = 1.0
        return FDRReport(table=table, temperature=0.0, temperature_error=0.0)
    middle = table.iloc[len(table) // 2]
    guess = middle["omega"] / np.log((middle["ratio"] + 1.0) / (middle["ratio"] - 1.0))
    popt, pcov = optimize.curve_fit(
        _coth_ratio,
        table["omega"].to_numpy(),
        table["ratio"].to_numpy(),
        p0=[guess],
    )
    temperature = float(popt[0])
    table["fit"] = _coth_ratio(table["omega"].to_numpy(), temperature)
    logger.info(f"Fitted effective temperature {temperature:.6g}")
    return FDRReport(
        table=table,
        temperature=temperature,
        temperature_error=float(np.sqrt(pcov[0, 0])),
    )
