"""Semiclassical worldline dynamics with time-dependent dressing.

The mean trajectory obeys

    m(τ) ẍ^μ = f^μ_ext + e² g(τ) (ẋ^μ ẍ² + x⃛^μ)

where g(τ) switches radiation reaction on over the dressing time τ_d and
m(τ) = m0 - (κe²Λ/8π) g(τ) runs from the bare to the renormalized mass.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from physics.errors import (
    ConfigurationError,
    GSingular,
    MissingJerk,
    NonTimelike,
    NonTimelikeStep,
    RunawayDetected,
    ValidationError,
)
from physics.geometry import (
    METRIC,
    Worldline,
    WorldlineState,
    minkowski_dot,
    renormalize_velocity,
)


logger = logging.getLogger(__name__)

TIME_AXIS = np.array([1.0, 0.0, 0.0, 0.0])
# Dressed |f_RR| below this fraction of e²|ẍ²| counts as hyperbolic motion.
RR_FLOOR = 1e-6


# --- Parameters ---


@dataclass(frozen=True)
class ParticleParams:
    """Bare mass, charge, UV cutoff and regulator constant of the particle."""

    m0: float
    e: float
    cutoff: float
    kappa: float = 1.0
    r0: float | None = None

    def __post_init__(self) -> None:
        """Enforce positivity and the runaway-free bound m0 > κe²Λ/8π."""
        if self.cutoff <= 0.0:
            raise ValidationError("particle.cutoff", f"must be > 0, got {self.cutoff}")
        if self.m0 <= 0.0:
            raise ValidationError("particle.m0", f"must be > 0, got {self.m0}")
        if self.r0 is None:
            object.__setattr__(self, "r0", self.e**2 / (4.0 * np.pi * self.m0))
        if self.r0 <= 0.0:
            raise ValidationError("particle.r0", f"must be > 0, got {self.r0}")
        if self.m0 <= self.mass_shift:
            raise ValidationError(
                "particle.m0",
                "runaway-free condition m0 > κe²Λ/8π violated "
                f"({self.m0} <= {self.mass_shift:.6g})",
            )

    @property
    def mass_shift(self) -> float:
        """κe²Λ/8π, the mass lost to dressing."""
        return self.kappa * self.e**2 * self.cutoff / (8.0 * np.pi)

    @property
    def renormalized_mass(self) -> float:
        """m(∞) = m0 - κe²Λ/8π."""
        return self.m0 - self.mass_shift

    @property
    def dressing_time(self) -> float:
        """m0·r0/Λ."""
        return self.m0 * self.r0 / self.cutoff


@dataclass(frozen=True)
class SwitchProfile:
    """Shape and timescale of the dressing switch g(τ)."""

    shape: Literal["exponential", "smoothstep"] = "exponential"
    tau_d: float = 1.0

    def __post_init__(self) -> None:
        """Validate the timescale."""
        if self.tau_d <= 0.0:
            raise ValidationError("switch.tau_d", f"must be > 0, got {self.tau_d}")
        if self.shape not in ("exponential", "smoothstep"):
            raise ValidationError("switch.shape", f"unknown shape '{self.shape}'")

    @classmethod
    def for_particle(
        cls,
        params: ParticleParams,
        *,
        shape: Literal["exponential", "smoothstep"] = "exponential",
        tau_d: float | None = None,
    ) -> "SwitchProfile":
        """Profile with τ_d defaulting to the particle's dressing time."""
        return cls(shape=shape, tau_d=params.dressing_time if tau_d is None else tau_d)


def switch_g(tau: np.ndarray | float, profile: SwitchProfile) -> np.ndarray | float:
    """Dressing switch g(τ) in [0, 1] with g(0) = 0 and g(∞) = 1.

    Args:
        tau: Proper time(s), >= 0.
        profile: Switch profile.

    Returns:
        Exponential shape 1 - e^{-τ/τ_d}; smoothstep shape the C² ramp
        6s⁵ - 15s⁴ + 10s³ with s = τ/(3τ_d) clipped to [0, 1].
    """
    tau = np.asarray(tau, dtype=float)
    if profile.shape == "exponential":
        g = -np.expm1(-np.maximum(tau, 0.0) / profile.tau_d)
    else:
        s = np.clip(tau / (3.0 * profile.tau_d), 0.0, 1.0)
        g = s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    return float(g) if g.ndim == 0 else g


def switch_rate(tau: float, profile: SwitchProfile) -> float:
    """Derivative dg/dτ."""
    if profile.shape == "exponential":
        return float(np.exp(-max(tau, 0.0) / profile.tau_d) / profile.tau_d)
    s = tau / (3.0 * profile.tau_d)
    if s <= 0.0 or s >= 1.0:
        return 0.0
    return float(30.0 * s**2 * (1.0 - s) ** 2 / (3.0 * profile.tau_d))


def mass_m(
    tau: np.ndarray | float, params: ParticleParams, profile: SwitchProfile
) -> np.ndarray | float:
    """Running mass m(τ) = m0 - (κe²Λ/8π) g(τ)."""
    return params.m0 - params.mass_shift * switch_g(tau, profile)


# --- External potential ---


@dataclass(frozen=True)
class ExternalPotential:
    """External potential V(x) and the four-force it exerts.

    ``linear`` is a uniform field with constant rest-frame force F (a spatial
    four-vector); it has V = F·x and drives hyperbolic motion.
    ``harmonic`` is V = (k/2) Σ (xⁱ - cⁱ)² over ``axes``; its force is the
    part of ∂^μV orthogonal to u. Forces vanish before ``onset``.
    """

    variant: Literal["none", "linear", "harmonic", "linear-harmonic"] = "none"
    force: np.ndarray = field(default_factory=lambda: np.zeros(4))
    k: float = 0.0
    center: np.ndarray = field(default_factory=lambda: np.zeros(4))
    axes: tuple[int, ...] = (1, 2, 3)
    onset: float = 0.0

    def __post_init__(self) -> None:
        """Validate the variant's parameters."""
        if self.variant not in ("none", "linear", "harmonic", "linear-harmonic"):
            raise ConfigurationError(f"Unknown potential variant '{self.variant}'")
        if self.is_linear and self.force[0] != 0.0:
            raise ConfigurationError("Linear potential force must be purely spatial")
        if self.is_harmonic and self.k <= 0.0:
            raise ConfigurationError(f"Harmonic potential needs k > 0, got {self.k}")
        if any(axis not in (1, 2, 3) for axis in self.axes):
            raise ConfigurationError(f"Harmonic axes must be spatial, got {self.axes}")

    @property
    def is_linear(self) -> bool:
        """True when a uniform force is present."""
        return self.variant in ("linear", "linear-harmonic")

    @property
    def is_harmonic(self) -> bool:
        """True when a harmonic well is present."""
        return self.variant in ("harmonic", "linear-harmonic")

    def _mask(self) -> np.ndarray:
        mask = np.zeros(4)
        mask[list(self.axes)] = 1.0
        return mask

    def value(self, x: np.ndarray) -> float:
        """V(x)."""
        v = 0.0
        if self.is_linear:
            v += float(minkowski_dot(self.force, x))
        if self.is_harmonic:
            d = (np.asarray(x) - self.center) * self._mask()
            v += 0.5 * self.k * float(d @ d)
        return v

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Covariant gradient ∂_μV."""
        grad = np.zeros(4)
        if self.is_linear:
            grad += METRIC @ self.force
        if self.is_harmonic:
            grad += self.k * (np.asarray(x) - self.center) * self._mask()
        return grad

    def hessian(self) -> np.ndarray:
        """Mixed Hessian ∂^μ∂_νV (constant for every variant)."""
        if not self.is_harmonic:
            return np.zeros((4, 4))
        return METRIC @ np.diag(self.k * self._mask())

    def force_on(self, tau: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Four-force f^μ_ext, orthogonal to u."""
        if tau < self.onset or self.variant == "none":
            return np.zeros(4)
        f = np.zeros(4)
        if self.is_linear:
            f += self.force * u[0] - TIME_AXIS * minkowski_dot(self.force, u)
        if self.is_harmonic:
            push = METRIC @ (self.k * (np.asarray(x) - self.center) * self._mask())
            f += push - u * minkowski_dot(u, push)
        return f


# --- Radiation reaction ---


def rr_force(state: WorldlineState, g: float, e: float) -> np.ndarray:
    """Radiation-reaction force e²g(u ẍ² + x⃛).

    Args:
        state: State carrying jerk data.
        g: Switch value.
        e: Charge.

    Returns:
        np.ndarray: The four-force; zero on hyperbolic motion.

    Raises:
        MissingJerk: If the state has no jerk.
    """
    if state.jerk is None:
        raise MissingJerk("Radiation reaction needs the jerk")
    return e**2 * g * (state.u * state.proper_acceleration_squared + state.jerk)


def larmor_power(state: WorldlineState, e: float) -> float:
    """Power radiated into the scalar field, e²(-ẍ·ẍ)/12π."""
    return e**2 * max(-state.proper_acceleration_squared, 0.0) / (12.0 * np.pi)


# --- Integration ---


@dataclass(frozen=True)
class ALDConfig:
    """Everything needed to integrate the mean worldline."""

    params: ParticleParams
    switch: SwitchProfile
    potential: ExternalPotential = field(default_factory=ExternalPotential)
    mode: Literal["order-reduced", "naive-third-order"] = "order-reduced"
    dt: float = 1e-3
    tau_max: float = 10.0
    x0: np.ndarray = field(default_factory=lambda: np.zeros(4))
    u0: np.ndarray = field(default_factory=lambda: TIME_AXIS.copy())
    acc0: np.ndarray = field(default_factory=lambda: np.zeros(4))
    sweeps: int = 2
    # Naive mode uses this constant switch value; None follows the profile.
    naive_g: float | None = 1.0
    runaway_bound: float = 1e8

    def __post_init__(self) -> None:
        """Check step sizes and initial data."""
        if self.dt <= 0.0 or self.tau_max <= 0.0:
            raise ValidationError("integrator.dt", "dt and tau_max must be positive")
        try:
            renormalize_velocity(self.u0)
        except NonTimelike as e:
            raise ValidationError("integrator.initial_velocity", str(e)) from e


def _rk4(rhs, tau: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(tau, y)
    k2 = rhs(tau + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(tau + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(tau + dt, y + dt * k3)
    return y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _order_reduced(config: ALDConfig):
    """Acceleration and jerk of the order-reduced equation at (τ, x, u)."""
    params, profile, potential = config.params, config.switch, config.potential
    e_sq = params.e**2
    h = 1e-3 * config.dt

    def zeroth(tau: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return potential.force_on(tau, x, u) / mass_m(tau, params, profile)

    def evaluate(
        tau: float, x: np.ndarray, u: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        m = mass_m(tau, params, profile)
        g = switch_g(tau, profile)
        f = potential.force_on(tau, x, u)
        acc = f / m
        jerk = np.zeros(4)
        for _ in range(config.sweeps):
            ahead = zeroth(tau + h, x + h * u, u + h * acc)
            behind = zeroth(tau - h, x - h * u, u - h * acc)
            jerk = (ahead - behind) / (2.0 * h)
            acc = (f + e_sq * g * (u * minkowski_dot(acc, acc) + jerk)) / m
        return acc - u * minkowski_dot(u, acc), jerk

    return evaluate


def _naive(config: ALDConfig):
    """Jerk solved from the third-order equation."""
    params, profile, potential = config.params, config.switch, config.potential
    e_sq = params.e**2

    def jerk(tau: float, x: np.ndarray, u: np.ndarray, acc: np.ndarray) -> np.ndarray:
        g = config.naive_g if config.naive_g is not None else switch_g(tau, profile)
        if e_sq * g == 0.0:
            raise GSingular(
                f"e²g vanishes at tau={tau}; the third-order equation is singular"
            )
        m = mass_m(tau, params, profile)
        f = potential.force_on(tau, x, u)
        return (m * acc - f) / (e_sq * g) - u * minkowski_dot(acc, acc)

    return jerk


def integrate_ald(config: ALDConfig) -> Worldline:
    """Integrate the dressed ALD equation with fixed-step RK4.

    Order-reduced mode replaces x⃛ by the derivative of the zeroth-order
    acceleration along the flow (``config.sweeps`` fixed-point sweeps) and
    needs only x(0), u(0). Naive mode evolves (x, u, ẍ) through the full
    third-order equation and exists to show runaway and preacceleration.

    Args:
        config: Integration settings.

    Returns:
        Worldline: Samples every ``dt`` up to ``tau_max`` with jerk data.

    Raises:
        GSingular: Naive mode with e²g(τ) = 0 in the span.
        NonTimelikeStep: If a step leaves the future light cone.
    """
    n_steps = int(round(config.tau_max / config.dt))
    taus = config.dt * np.arange(n_steps + 1)
    xs = np.zeros((n_steps + 1, 4))
    us = np.zeros_like(xs)
    accs = np.zeros_like(xs)
    jerks = np.zeros_like(xs)

    x = np.asarray(config.x0, dtype=float)
    u = renormalize_velocity(config.u0)
    warned = False

    if config.mode == "order-reduced":
        evaluate = _order_reduced(config)

        def rhs(tau: float, y: np.ndarray) -> np.ndarray:
            acc, _ = evaluate(tau, y[:4], y[4:])
            return np.concatenate([y[4:], acc])

        y = np.concatenate([x, u])
        for i, tau in enumerate(taus):
            acc, jerk = evaluate(tau, y[:4], y[4:])
            xs[i], us[i], accs[i], jerks[i] = y[:4], y[4:], acc, jerk
            warned = _check_runaway(acc, tau, config.runaway_bound, warned)
            if i == n_steps:
                break
            y = _rk4(rhs, tau, y, config.dt)
            y[4:] = _renormalized_step(y[4:], tau + config.dt)
    else:
        jerk_of = _naive(config)

        def rhs(tau: float, y: np.ndarray) -> np.ndarray:
            return np.concatenate([y[4:8], y[8:], jerk_of(tau, y[:4], y[4:8], y[8:])])

        acc = np.asarray(config.acc0, dtype=float)
        y = np.concatenate([x, u, acc - u * minkowski_dot(u, acc)])
        for i, tau in enumerate(taus):
            xs[i], us[i], accs[i] = y[:4], y[4:8], y[8:]
            jerks[i] = jerk_of(tau, y[:4], y[4:8], y[8:])
            warned = _check_runaway(y[8:], tau, config.runaway_bound, warned)
            if i == n_steps:
                break
            y = _rk4(rhs, tau, y, config.dt)
            y[4:8] = _renormalized_step(y[4:8], tau + config.dt)
            y[8:] -= y[4:8] * minkowski_dot(y[4:8], y[8:])

    logger.info(f"Integrated {n_steps} {config.mode} steps to tau={taus[-1]:.6g}")
    return Worldline(tau=taus, x=xs, u=us, acc=accs, jerk=jerks)


def _renormalized_step(u: np.ndarray, tau: float) -> np.ndarray:
    if not np.all(np.isfinite(u)):
        raise NonTimelikeStep(f"Velocity became non-finite at tau={tau}")
    try:
        return renormalize_velocity(u)
    except NonTimelike as e:
        raise NonTimelikeStep(f"Step to tau={tau} left the light cone: {e}") from e


def _check_runaway(acc: np.ndarray, tau: float, bound: float, warned: bool) -> bool:
    magnitude = np.sqrt(max(-float(minkowski_dot(acc, acc)), 0.0))
    if not warned and magnitude > bound:
        message = (
            f"Proper acceleration {magnitude:.3g} exceeds {bound:.3g} "
            f"at tau={tau:.6g}"
        )
        logger.warning(message)
        warnings.warn(message, RunawayDetected, stacklevel=3)
        return True
    return warned


# --- Diagnostics ---


def preacceleration_probe(config: ALDConfig) -> float:
    """Largest velocity change before the external force switches on.

    Args:
        config: Configuration whose potential has ``onset`` = τ_f.

    Returns:
        float: max |u(τ) - u(0)| over samples with τ < τ_f; zero when τ_f = 0.
    """
    onset = config.potential.onset
    if onset <= 0.0:
        return 0.0
    if config.tau_max < onset:
        config = ALDConfig(**{**config.__dict__, "tau_max": onset + config.dt})
    worldline = integrate_ald(config)
    before = worldline.tau < onset
    return float(np.max(np.abs(worldline.u[before] - worldline.u[0])))


def pretuned_initial_acceleration(config: ALDConfig) -> np.ndarray:
    """Initial ẍ that suppresses the runaway of the naive equation.

    Integrates the nonrelativistic equation backwards from the future:
    ẍ(0) = (1/e²) ∫₀^∞ e^{-m s/e²} F θ(s - τ_f) ds = (F/m) e^{-m τ_f/e²}.
    """
    if not config.potential.is_linear:
        raise ConfigurationError("Pretuned initial data needs a linear force")
    m = float(mass_m(0.0, config.params, config.switch))
    rate = m / config.params.e**2
    return config.potential.force * np.exp(-rate * config.potential.onset) / m


def runaway_rate(worldline: Worldline) -> float:
    """Exponential growth rate of the proper acceleration from a log-linear fit."""
    magnitude = np.sqrt(np.maximum(-minkowski_dot(worldline.acc, worldline.acc), 0.0))
    usable = magnitude > 0.0
    slope, _ = np.polyfit(worldline.tau[usable], np.log(magnitude[usable]), 1)
    return float(slope)


def naive_growth_rate(config: ALDConfig, tau: float | None = None) -> float:
    """Runaway rate m(τ)/(e²g) of the naive equation, at the end of the run by default.

    Raises:
        GSingular: If e²g vanishes at τ.
    """
    tau = config.tau_max if tau is None else tau
    g = config.naive_g if config.naive_g is not None else switch_g(tau, config.switch)
    e_sq = config.params.e**2
    if e_sq * g == 0.0:
        raise GSingular(f"e²g vanishes at tau={tau}; the runaway rate is undefined")
    return float(mass_m(tau, config.params, config.switch)) / (e_sq * g)


def rr_turn_on_time(
    worldline: Worldline,
    params: ParticleParams,
    profile: SwitchProfile,
    *,
    plateau: float = 0.2,
) -> float | None:
    """Proper time at which |f_RR| first reaches (1 - 1/e) of its late plateau.

    |f_RR(τ)| = e²g(τ)|u ẍ² + x⃛| is evaluated on every sample of the driven
    worldline and normalized by its median over the last ``plateau`` fraction
    of the span, so changes of the motion during dressing shift the result.

    Args:
        worldline: Integrated mean worldline with jerk data.
        params: Particle parameters.
        profile: Dressing profile.
        plateau: Trailing fraction of the span that defines the dressed level.

    Returns:
        float | None: Interpolated crossing time, or None when the dressed
            force vanishes (hyperbolic or free motion).

    Raises:
        MissingJerk: If the worldline has no jerk data.
        ConfigurationError: If ``plateau`` is not in (0, 1).
    """
    if worldline.jerk is None:
        raise MissingJerk("Turn-on time needs jerk data")
    if not 0.0 < plateau < 1.0:
        raise ConfigurationError(f"Plateau fraction must lie in (0, 1), got {plateau}")
    taus = worldline.tau
    forces = np.array(
        [
            rr_force(state, switch_g(state.tau, profile), params.e)
            for state in worldline.samples
        ]
    )
    magnitude = np.sqrt(np.abs(minkowski_dot(forces, forces)))
    late = taus >= taus[-1] - plateau * (taus[-1] - taus[0])
    level = float(np.median(magnitude[late]))
    acc_sq = minkowski_dot(worldline.acc, worldline.acc)
    scale = params.e**2 * float(np.max(np.abs(acc_sq)))
    if level <= RR_FLOOR * max(scale, np.finfo(float).tiny):
        logger.info("Radiation reaction vanishes on this worldline; no turn-on time")
        return None
    fraction = magnitude / level
    target = 1.0 - np.exp(-1.0)
    crossing = int(np.argmax(fraction >= target))
    if crossing == 0:
        return float(taus[0])
    before, after = fraction[crossing - 1], fraction[crossing]
    step = taus[crossing] - taus[crossing - 1]
    return float(taus[crossing - 1] + (target - before) / (after - before) * step)
