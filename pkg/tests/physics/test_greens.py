"""Test cases for field two-point functions, mirrors and stationary spectra."""

import numpy as np
import pytest

from physics.errors import (
    DegenerateMap,
    NonStationaryTrajectory,
    PointBehindMirror,
    SuperluminalMirror,
    WrongVariant,
)
from physics.geometry import AnalyticTrajectory
from physics.greens import (
    CorrelatorKernel,
    FieldState,
    MirrorConfig,
    RayMap,
    build_ray_map,
    frame_moments,
    hadamard_pullback,
    hadamard_constrained_moving_1p1,
    hadamard_constrained_static,
    hadamard_free,
    image_point,
    mirror_energy_flux,
    pullback_matrix,
    stationary_reference,
    thermal_equivalence_check,
    thermal_image_sum,
    wightman_spectrum,
)


def _static_moving_mirror() -> MirrorConfig:
    """Moving-mirror variant that stays at x = 0."""
    zero = lambda t: 0.0  # noqa: E731
    return MirrorConfig(
        variant="moving-point-1p1", trajectory=zero, derivatives=(zero, zero, zero)
    )


def test_hadamard_free_vacuum_value() -> None:
    """Test G_H = -1/(2π²σ) for a spacelike separation."""
    state = FieldState(dimension=3)
    y, y2 = np.zeros(4), np.array([0.0, 2.0, 0.0, 0.0])

    value = hadamard_free(state, y, y2, 1e-9)

    assert value == pytest.approx(1.0 / (2.0 * np.pi**2 * 4.0), rel=1e-9)


def test_thermal_closed_form_matches_image_sum() -> None:
    """Test the thermal closed form against the truncated image sum."""
    state = FieldState(dimension=3, temperature=0.5)
    kernel = CorrelatorKernel(kind="wightman", state=state, eps=0.05)
    y, y2 = np.array([1.3, 0.4, 0.2, 0.0]), np.array([0.0, -0.3, 0.0, 0.5])
    d = y - y2

    closed = kernel.wightman(y, y2)
    summed = thermal_image_sum(d[0], np.linalg.norm(d[1:]), state.beta, kernel.eps)

    assert complex(closed) == pytest.approx(complex(summed), rel=1e-5)


def test_thermal_equivalence_accelerated_vacuum() -> None:
    """Test that the accelerated vacuum pullback equals the bath at T = a/2π."""
    deviation = thermal_equivalence_check(1.0, np.linspace(1.0, 5.0, 17))

    assert deviation < 1e-6


def test_image_point_reflects_across_plane() -> None:
    """Test reflection across the plane x³ = 1."""
    mirror = MirrorConfig(variant="static-plane-3p1", offset=1.0)

    image = image_point(mirror, np.array([0.5, 0.1, 0.2, 3.0]))

    np.testing.assert_allclose(image, [0.5, 0.1, 0.2, -1.0])


def test_image_point_rejects_moving_mirror() -> None:
    """Test that image points need a static mirror."""
    with pytest.raises(WrongVariant):
        image_point(_static_moving_mirror(), np.zeros(4))


def test_static_constrained_vanishes_on_mirror(rng: np.random.Generator) -> None:
    """Test the Dirichlet condition at random points on a plane mirror."""
    mirror = MirrorConfig(
        variant="static-plane-3p1", offset=0.5, normal=(0.0, 0.6, 0.8)
    )
    state = FieldState(dimension=3, temperature=0.3)
    n = mirror.unit_normal

    for _ in range(20):
        y = rng.uniform(-2.0, 2.0, 4)
        y = y - (y[1:] @ n[1:] - mirror.offset) * n
        y2 = rng.uniform(-2.0, 2.0, 4)

        constrained = hadamard_constrained_static(mirror, state, y, y2, 1e-3)
        free = hadamard_free(state, y, y2, 1e-3)

        assert abs(constrained) <= 1e-10 * max(abs(free), 1.0)


def test_moving_kernel_reduces_to_image_method() -> None:
    """Test that a mirror at rest gives the 1+1 Wightman function of the images."""
    state = FieldState(dimension=1)
    moving = CorrelatorKernel(
        kind="wightman", state=state, mirror=_static_moving_mirror(), eps=1e-2
    )
    static = CorrelatorKernel(
        kind="wightman",
        state=state,
        mirror=MirrorConfig(variant="static-point-1p1"),
        eps=1e-2,
    )
    y, y2 = np.array([0.3, 1.2, 0.0, 0.0]), np.array([-0.4, 0.5, 0.0, 0.0])

    expected = complex(static.wightman(y, y2))
    assert complex(np.ravel(moving.wightman(y, y2))[0]) == pytest.approx(
        expected, rel=1e-10
    )


def test_moving_kernel_point_behind_mirror() -> None:
    """Test that points behind the mirror are rejected."""
    ray_map = build_ray_map(_static_moving_mirror())

    with pytest.raises(PointBehindMirror):
        hadamard_constrained_moving_1p1(ray_map, (1.0, -1.0), (0.0, 1.0), 1e-3)


def test_moving_kernel_vanishes_on_mirror() -> None:
    """Test the Dirichlet condition on an oscillating mirror."""
    omega, amplitude = 1.0, 0.1
    mirror = MirrorConfig(
        variant="moving-point-1p1",
        trajectory=lambda t: amplitude * np.sin(omega * t),
        derivatives=(
            lambda t: amplitude * omega * np.cos(omega * t),
            lambda t: -amplitude * omega**2 * np.sin(omega * t),
            lambda t: -amplitude * omega**3 * np.cos(omega * t),
        ),
    )
    ray_map = build_ray_map(mirror)

    for u in (-2.0, 0.0, 1.5):
        value = hadamard_constrained_moving_1p1(
            ray_map, (u, ray_map.p(u)), (0.3, ray_map.p(0.3) + 1.0), 1e-3
        )
        assert abs(value) < 1e-10


def test_ray_map_of_uniform_mirror() -> None:
    """Test p(u) = (1+v)/(1-v) u for a mirror moving at constant speed."""
    speed = 0.5
    mirror = MirrorConfig(
        variant="moving-point-1p1",
        trajectory=lambda t: speed * t,
        derivatives=(lambda t: speed, lambda t: 0.0, lambda t: 0.0),
    )
    ray_map = build_ray_map(mirror)

    assert ray_map.p(2.0) == pytest.approx(6.0, rel=1e-12)
    assert ray_map.dp(2.0) == pytest.approx(3.0)
    assert mirror_energy_flux(ray_map, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_ray_map_finite_differences_match_analytic() -> None:
    """Test finite-difference derivatives of the solved map."""
    trajectory = lambda t: 0.2 * np.sin(t)  # noqa: E731
    derivatives = (
        lambda t: 0.2 * np.cos(t),
        lambda t: -0.2 * np.sin(t),
        lambda t: -0.2 * np.cos(t),
    )
    analytic = build_ray_map(
        MirrorConfig(
            variant="moving-point-1p1", trajectory=trajectory, derivatives=derivatives
        )
    )
    numeric = build_ray_map(
        MirrorConfig(variant="moving-point-1p1", trajectory=trajectory), step=1e-2
    )

    for u in (-1.0, 0.4, 2.0):
        assert numeric.p(u) == pytest.approx(analytic.p(u), rel=1e-12)
        assert numeric.dp(u) == pytest.approx(analytic.dp(u), rel=1e-6)
        assert numeric.d2p(u) == pytest.approx(analytic.d2p(u), rel=1e-4, abs=1e-6)


def test_superluminal_table_rejected() -> None:
    """Test that a tabulated trajectory faster than light is rejected."""
    with pytest.raises(SuperluminalMirror):
        MirrorConfig(
            variant="moving-point-1p1",
            table=(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 2.0])),
        )


def test_exponential_map_flux() -> None:
    """Test the thermal flux κ²/48π of the map p(u) = -e^{-κu}/κ."""
    kappa = 2.0
    ray_map = RayMap.from_function(
        p=lambda u: -np.exp(-kappa * u) / kappa,
        dp=lambda u: np.exp(-kappa * u),
        d2p=lambda u: -kappa * np.exp(-kappa * u),
        d3p=lambda u: kappa**2 * np.exp(-kappa * u),
    )

    for u in (-1.0, 0.0, 3.0):
        assert mirror_energy_flux(ray_map, u) == pytest.approx(
            kappa**2 / (48.0 * np.pi), rel=1e-12
        )


def test_affine_map_flux_and_degenerate_map() -> None:
    """Test zero flux for affine maps and rejection of p' <= 0."""
    affine = RayMap.from_function(
        p=lambda u: 2.0 * u + 1.0,
        dp=lambda u: 2.0,
        d2p=lambda u: 0.0,
        d3p=lambda u: 0.0,
    )
    assert mirror_energy_flux(affine, 0.7) == 0.0

    flat = RayMap.from_function(
        p=lambda u: 1.0, dp=lambda u: 0.0, d2p=lambda u: 0.0, d3p=lambda u: 0.0
    )
    with pytest.raises(DegenerateMap):
        mirror_energy_flux(flat, 0.0)


def test_frame_moments_match_finite_differences(
    vacuum_kernel: CorrelatorKernel,
) -> None:
    """Test analytic frame derivatives against central differences of G_H."""
    y, y2 = np.array([[0.2, 0.5, -0.3, 0.1]]), np.array([[-0.4, -0.6, 0.2, 0.4]])
    frames = np.eye(4)[None, :, :]
    h = 1e-5

    g, d_i, d_j, _ = frame_moments(vacuum_kernel, y, y2, frames, frames)

    assert g[0] == pytest.approx(float(vacuum_kernel.hadamard(y[0], y2[0])), rel=1e-12)
    for a in range(4):
        step = h * np.eye(4)[a]
        hadamard = vacuum_kernel.hadamard
        forward = hadamard(y[0] + step, y2[0]) - hadamard(y[0] - step, y2[0])
        backward = hadamard(y[0], y2[0] + step) - hadamard(y[0], y2[0] - step)
        assert d_i[0, a] == pytest.approx(float(forward) / (2 * h), rel=1e-5, abs=1e-9)
        assert d_j[0, a] == pytest.approx(float(backward) / (2 * h), rel=1e-5, abs=1e-9)


def test_frame_moments_reject_1p1() -> None:
    """Test that derivative moments need a 3+1 field."""
    kernel = CorrelatorKernel(state=FieldState(dimension=1), eps=0.1)
    frames = np.eye(4)[None, :, :]

    with pytest.raises(WrongVariant):
        frame_moments(kernel, np.zeros((1, 4)), np.ones((1, 4)), frames, frames)


def test_pullback_matrix_is_symmetric(
    vacuum_kernel: CorrelatorKernel, hyperbola: AnalyticTrajectory
) -> None:
    """Test the Hadamard pullback matrix along a hyperbola."""
    taus = np.linspace(0.0, 2.0, 5)

    matrix = pullback_matrix(vacuum_kernel, hyperbola, taus)

    assert matrix.shape == (5, 5)
    assert matrix.index.name == "tau"
    np.testing.assert_allclose(matrix.to_numpy(), matrix.to_numpy().T, rtol=1e-10)


def test_stationary_reference_rejects_accelerated_thermal(
    hyperbola: AnalyticTrajectory,
) -> None:
    """Test that acceleration through a thermal bath is not stationary."""
    kernel = CorrelatorKernel(state=FieldState(dimension=3, temperature=1.0))

    with pytest.raises(NonStationaryTrajectory):
        stationary_reference(kernel, hyperbola)


def test_wightman_spectrum_static_vacuum() -> None:
    """Test the inertial vacuum response: zero excitation, |ω|/2π de-excitation."""
    kernel = CorrelatorKernel(kind="wightman", state=FieldState(dimension=3))
    static = AnalyticTrajectory.static()

    up, _ = wightman_spectrum(kernel, static, 1.0, window=200.0)
    down, _ = wightman_spectrum(kernel, static, -1.0, window=200.0)

    assert up == pytest.approx(0.0, abs=1e-8)
    assert down == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-6)


def test_wightman_spectrum_accelerated_is_planckian(
    hyperbola: AnalyticTrajectory,
) -> None:
    """Test the accelerated vacuum transform (ω/2π)/(e^{2πω/a} - 1)."""
    kernel = CorrelatorKernel(kind="wightman", state=FieldState(dimension=3))
    omega = 0.5

    up, error = wightman_spectrum(kernel, hyperbola, omega, window=400.0)

    expected = (omega / (2.0 * np.pi)) / np.expm1(2.0 * np.pi * omega)
    assert up == pytest.approx(expected, rel=1e-2)
    assert error < 1e-3 * expected


def test_wightman_spectrum_rejects_1p1() -> None:
    """Test that spectra need a 3+1 field."""
    kernel = CorrelatorKernel(kind="wightman", state=FieldState(dimension=1))

    with pytest.raises(WrongVariant):
        wightman_spectrum(kernel, AnalyticTrajectory.static(), 1.0, window=10.0)


@pytest.mark.parametrize("a", [0.5, 2.0 * np.pi])
def test_thermal_equivalence_across_accelerations(a: float) -> None:
    """Test the accelerated vacuum against the bath at T = a/2π, weak and strong a."""
    lags = np.linspace(0.5, 3.0, 11) / a

    assert thermal_equivalence_check(a, lags) < 1e-6


def test_hyperbolic_pullback_worked_value() -> None:
    """Test G_H = -a²/(8π² sinh²(aΔτ/2)) at a = 2, Δτ = 1."""
    kernel = CorrelatorKernel(state=FieldState(dimension=3), eps=1e-7)
    hyperbola = AnalyticTrajectory.uniform_acceleration(2.0)

    value = hadamard_pullback(
        kernel, hyperbola, hyperbola, np.array([0.5]), np.array([-0.5])
    )

    expected = -4.0 / (8.0 * np.pi**2 * np.sinh(1.0) ** 2)
    assert float(np.ravel(value)[0]) == pytest.approx(expected, rel=1e-6)
    assert expected == pytest.approx(-3.67e-2, rel=1e-3)


def test_static_constrained_worked_value() -> None:
    """Test the free term at r = 1 minus the image at r = 3 for a mirror at z = 0."""
    mirror = MirrorConfig(variant="static-plane-3p1")
    y, y2 = np.array([0.0, 0.0, 0.0, 1.0]), np.array([0.0, 0.0, 0.0, 2.0])

    value = hadamard_constrained_static(mirror, FieldState(dimension=3), y, y2, 1e-9)

    assert value == pytest.approx((1.0 - 1.0 / 9.0) / (2.0 * np.pi**2), rel=1e-9)
    assert value == pytest.approx(0.04503, rel=1e-4)
