"""Test cases for the dressed ALD mean-worldline integrator."""

import warnings
from dataclasses import replace

import numpy as np
import pytest
from scipy import optimize

from physics.ald import (
    ALDConfig,
    ExternalPotential,
    ParticleParams,
    SwitchProfile,
    integrate_ald,
    larmor_power,
    mass_m,
    naive_growth_rate,
    preacceleration_probe,
    pretuned_initial_acceleration,
    rr_force,
    rr_turn_on_time,
    runaway_rate,
    switch_g,
    switch_rate,
)
from physics.errors import (
    ConfigurationError,
    GSingular,
    MissingJerk,
    RunawayDetected,
    ValidationError,
)
from physics.geometry import (
    AnalyticTrajectory,
    WorldlineState,
    eval_analytic,
    minkowski_dot,
)


def _linear(force: float, onset: float = 0.0) -> ExternalPotential:
    return ExternalPotential(
        variant="linear", force=np.array([0.0, force, 0.0, 0.0]), onset=onset
    )


def test_particle_params_runaway_free_bound() -> None:
    """Test that m0 <= κe²Λ/8π is rejected with the offending key."""
    with pytest.raises(ValidationError) as excinfo:
        ParticleParams(m0=0.01, e=1.0, cutoff=1.0)

    assert excinfo.value.key == "particle.m0"


def test_particle_params_derived_quantities(particle: ParticleParams) -> None:
    """Test mass shift, renormalized mass and dressing time."""
    shift = 0.09 * 10.0 / (8.0 * np.pi)

    assert particle.mass_shift == pytest.approx(shift)
    assert particle.renormalized_mass == pytest.approx(1.0 - shift)
    assert particle.r0 == pytest.approx(0.09 / (4.0 * np.pi))
    assert particle.dressing_time == pytest.approx(particle.r0 / 10.0)


def test_switch_profiles() -> None:
    """Test g(0) = 0, g(τ_d) = 1 - 1/e and the smoothstep plateau."""
    exponential = SwitchProfile(shape="exponential", tau_d=0.5)
    smooth = SwitchProfile(shape="smoothstep", tau_d=0.5)

    assert switch_g(0.0, exponential) == 0.0
    assert switch_g(0.5, exponential) == pytest.approx(1.0 - np.exp(-1.0))
    assert switch_g(0.0, smooth) == 0.0
    assert switch_g(1.5, smooth) == pytest.approx(1.0)
    assert switch_g(10.0, smooth) == pytest.approx(1.0)

    taus = np.linspace(0.0, 3.0, 31)
    assert np.all(np.diff(switch_g(taus, smooth)) >= 0.0)


@pytest.mark.parametrize("shape", ["exponential", "smoothstep"])
def test_switch_rate_matches_finite_difference(shape: str) -> None:
    """Test dg/dτ against a central difference."""
    profile = SwitchProfile(shape=shape, tau_d=0.3)
    h = 1e-6

    for tau in (0.1, 0.4, 0.7):
        numeric = (switch_g(tau + h, profile) - switch_g(tau - h, profile)) / (2 * h)
        assert switch_rate(tau, profile) == pytest.approx(numeric, rel=1e-6)


def test_switch_profile_validation() -> None:
    """Test that a non-positive dressing time is rejected."""
    with pytest.raises(ValidationError):
        SwitchProfile(tau_d=0.0)


def test_running_mass(particle: ParticleParams, switch: SwitchProfile) -> None:
    """Test that m(τ) runs from m0 to the renormalized mass."""
    assert mass_m(0.0, particle, switch) == pytest.approx(particle.m0)
    assert mass_m(100.0, particle, switch) == pytest.approx(particle.renormalized_mass)


def test_linear_force_is_orthogonal_to_velocity() -> None:
    """Test f·u = 0 and |f| = |F| for motion along a uniform field."""
    potential = _linear(0.7)
    u = np.array([np.cosh(0.4), np.sinh(0.4), 0.0, 0.0])

    f = potential.force_on(1.0, np.zeros(4), u)

    assert minkowski_dot(f, u) == pytest.approx(0.0, abs=1e-14)
    assert minkowski_dot(f, f) == pytest.approx(-0.49)


def test_harmonic_potential() -> None:
    """Test the harmonic force, Hessian and onset."""
    potential = ExternalPotential(variant="harmonic", k=4.0, axes=(2,), onset=0.5)
    x = np.array([0.0, 1.0, 0.25, 0.0])
    rest = np.array([1.0, 0.0, 0.0, 0.0])

    np.testing.assert_allclose(potential.force_on(1.0, x, rest), [0.0, 0.0, -1.0, 0.0])
    np.testing.assert_allclose(potential.force_on(0.2, x, rest), 0.0)
    np.testing.assert_allclose(potential.hessian(), np.diag([0.0, 0.0, -4.0, 0.0]))
    assert potential.value(x) == pytest.approx(0.125)


def test_potential_validation() -> None:
    """Test rejection of timelike forces and non-positive spring constants."""
    with pytest.raises(ConfigurationError):
        ExternalPotential(variant="linear", force=np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(ConfigurationError):
        ExternalPotential(variant="harmonic", k=0.0)


def test_rr_force_vanishes_on_hyperbola(hyperbola: AnalyticTrajectory) -> None:
    """Test that radiation reaction is zero for uniform acceleration."""
    state = eval_analytic(hyperbola, 0.8)

    np.testing.assert_allclose(rr_force(state, 1.0, 0.5), 0.0, atol=1e-12)
    assert larmor_power(state, 0.5) == pytest.approx(0.25 / (12.0 * np.pi))


def test_rr_force_needs_jerk() -> None:
    """Test MissingJerk for states without jerk data."""
    state = WorldlineState(
        tau=0.0, x=np.zeros(4), u=np.array([1.0, 0.0, 0.0, 0.0]), acc=np.zeros(4)
    )

    with pytest.raises(MissingJerk):
        rr_force(state, 1.0, 1.0)


def test_free_particle_stays_at_rest(
    particle: ParticleParams, switch: SwitchProfile
) -> None:
    """Test that no force means no motion."""
    worldline = integrate_ald(ALDConfig(params=particle, switch=switch, tau_max=0.5))

    np.testing.assert_allclose(worldline.u[:, 1:], 0.0, atol=1e-15)
    np.testing.assert_allclose(worldline.x[-1], [0.5, 0.0, 0.0, 0.0], atol=1e-12)


def test_uniform_field_reaches_hyperbolic_motion(
    particle: ParticleParams, switch: SwitchProfile
) -> None:
    """Test that the late-time proper acceleration is |F|/m(∞)."""
    config = ALDConfig(
        params=particle, switch=switch, potential=_linear(0.5), tau_max=3.0
    )

    worldline = integrate_ald(config)

    np.testing.assert_allclose(minkowski_dot(worldline.u, worldline.u), 1.0, atol=1e-12)
    a_final = np.sqrt(-minkowski_dot(worldline.acc[-1], worldline.acc[-1]))
    assert a_final == pytest.approx(0.5 / particle.renormalized_mass, rel=1e-3)


def test_order_reduced_has_no_preacceleration(
    particle: ParticleParams, switch: SwitchProfile
) -> None:
    """Test that nothing moves before the force switches on."""
    config = ALDConfig(
        params=particle,
        switch=switch,
        potential=_linear(0.5, onset=1.0),
        tau_max=2.0,
    )

    assert preacceleration_probe(config) == 0.0


def test_naive_mode_runs_away() -> None:
    """Test that the naive third-order equation grows at the rate m/e²."""
    params = ParticleParams(m0=1.0, e=np.sqrt(0.1), cutoff=1e-6)
    config = ALDConfig(
        params=params,
        switch=SwitchProfile(tau_d=1.0),
        mode="naive-third-order",
        tau_max=1.0,
        acc0=np.array([0.0, 1e-6, 0.0, 0.0]),
    )

    worldline = integrate_ald(config)

    expected = (params.m0 - params.mass_shift) / params.e**2
    assert runaway_rate(worldline) == pytest.approx(expected, rel=1e-2)


def test_naive_growth_rate_uses_running_mass_and_naive_switch() -> None:
    """Test the naive runaway rate m(τ)/(e²g) against the integrated growth."""
    params = ParticleParams(m0=1.0, e=np.sqrt(0.1), cutoff=10.0)
    config = ALDConfig(
        params=params,
        switch=SwitchProfile(tau_d=0.05),
        mode="naive-third-order",
        tau_max=1.0,
        acc0=np.array([0.0, 1e-10, 0.0, 0.0]),
        naive_g=0.5,
    )

    worldline = integrate_ald(config)

    # Verify the late mass is fully dressed while the naive switch halves e²
    expected = (params.m0 - params.mass_shift) / (0.5 * params.e**2)
    assert naive_growth_rate(config) == pytest.approx(expected, rel=1e-9)
    assert runaway_rate(worldline) == pytest.approx(expected, rel=1e-2)

    # Verify the constant naive switch does not scale the mass shift
    scaled_shift = (params.m0 - 0.5 * params.mass_shift) / params.e**2
    assert naive_growth_rate(config) != pytest.approx(scaled_shift, rel=1e-2)


def test_naive_growth_rate_follows_profile_without_naive_switch() -> None:
    """Test that naive_g=None evaluates the switch profile at the end of the run."""
    params = ParticleParams(m0=1.0, e=0.3, cutoff=10.0)
    switch = SwitchProfile(tau_d=1.0)
    config = ALDConfig(
        params=params,
        switch=switch,
        mode="naive-third-order",
        tau_max=0.5,
        naive_g=None,
    )

    g = switch_g(0.5, switch)
    expected = mass_m(0.5, params, switch) / (params.e**2 * g)
    assert naive_growth_rate(config) == pytest.approx(expected)
    assert naive_growth_rate(config, tau=0.25) > naive_growth_rate(config)


def test_naive_mode_warns_on_runaway() -> None:
    """Test that a RunawayDetected warning is issued past the bound."""
    params = ParticleParams(m0=1.0, e=np.sqrt(0.1), cutoff=1e-6)
    config = ALDConfig(
        params=params,
        switch=SwitchProfile(tau_d=1.0),
        mode="naive-third-order",
        tau_max=1.0,
        acc0=np.array([0.0, 1e-3, 0.0, 0.0]),
        runaway_bound=1e-2,
    )

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RunawayDetected)
        integrate_ald(config)

    assert any(issubclass(w.category, RunawayDetected) for w in caught)


def test_naive_mode_singular_switch(
    particle: ParticleParams, switch: SwitchProfile
) -> None:
    """Test GSingular when e²g vanishes."""
    config = ALDConfig(
        params=particle,
        switch=switch,
        mode="naive-third-order",
        naive_g=0.0,
        tau_max=0.1,
    )

    with pytest.raises(GSingular):
        integrate_ald(config)


def test_pretuned_data_preaccelerates_without_runaway() -> None:
    """Test that pretuned initial data trades the runaway for preacceleration."""
    params = ParticleParams(m0=1.0, e=np.sqrt(0.1), cutoff=1e-6)
    config = ALDConfig(
        params=params,
        switch=SwitchProfile(tau_d=1.0),
        potential=_linear(1e-3, onset=0.5),
        mode="naive-third-order",
        tau_max=0.6,
    )
    tuned = replace(config, acc0=pretuned_initial_acceleration(config))

    worldline = integrate_ald(tuned)

    assert preacceleration_probe(tuned) > 0.0
    magnitude = np.sqrt(np.maximum(-minkowski_dot(worldline.acc, worldline.acc), 0.0))
    assert magnitude.max() < 2e-3 / params.m0


def test_pretuned_needs_linear_force(
    particle: ParticleParams, switch: SwitchProfile
) -> None:
    """Test that pretuning is only defined for a uniform force."""
    config = ALDConfig(
        params=particle,
        switch=switch,
        potential=ExternalPotential(variant="harmonic", k=1.0),
    )

    with pytest.raises(ConfigurationError):
        pretuned_initial_acceleration(config)


def _circular_orbit(switch: SwitchProfile) -> ALDConfig:
    """Circular orbit of radius 1 in an isotropic well, with a light dressing shift."""
    return ALDConfig(
        params=ParticleParams(m0=1.0, e=0.3, cutoff=1.0),
        switch=switch,
        potential=ExternalPotential(variant="harmonic", k=0.04, axes=(1, 2)),
        x0=np.array([0.0, 1.0, 0.0, 0.0]),
        u0=np.array([np.sqrt(1.04), 0.0, 0.2, 0.0]),
        tau_max=1.0,
    )


def test_rr_turn_on_time_on_circular_orbit(switch: SwitchProfile) -> None:
    """Test that |f_RR| along a driven orbit reaches 1 - 1/e of its plateau at τ_d."""
    config = _circular_orbit(switch)

    worldline = integrate_ald(config)

    turn_on = rr_turn_on_time(worldline, config.params, switch)
    assert turn_on == pytest.approx(switch.tau_d, rel=0.05)


def test_rr_turn_on_time_follows_switch_shape() -> None:
    """Test that a smoothstep switch moves the crossing away from τ_d."""
    switch = SwitchProfile(shape="smoothstep", tau_d=0.1)
    config = _circular_orbit(switch)
    target = 1.0 - np.exp(-1.0)
    expected = optimize.brentq(
        lambda tau: switch_g(tau, switch) - target, 0.0, 3.0 * switch.tau_d
    )

    turn_on = rr_turn_on_time(integrate_ald(config), config.params, switch)

    assert expected > 1.5 * switch.tau_d
    assert turn_on == pytest.approx(expected, rel=0.05)


def test_rr_turn_on_time_without_radiation(switch: SwitchProfile) -> None:
    """Test that hyperbolic motion feels no reaction force and has no turn-on time."""
    params = ParticleParams(m0=1.0, e=0.3, cutoff=1e-6)
    config = ALDConfig(
        params=params, switch=switch, potential=_linear(0.5), tau_max=0.5
    )

    assert rr_turn_on_time(integrate_ald(config), params, switch) is None


def test_ald_config_validation(particle: ParticleParams, switch: SwitchProfile) -> None:
    """Test rejection of non-positive steps."""
    with pytest.raises(ValidationError):
        ALDConfig(params=particle, switch=switch, dt=0.0)
