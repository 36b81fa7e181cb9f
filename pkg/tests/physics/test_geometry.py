"""Test cases for worldline geometry and reference trajectories."""

import numpy as np
import pytest

from physics.errors import GridMismatch, NonTimelike, OutOfRange
from physics.geometry import (
    WORLDLINE_COLUMNS,
    AnalyticTrajectory,
    Worldline,
    comoving_tetrad,
    eval_analytic,
    interpolate,
    is_stationary,
    minkowski_dot,
    renormalize_velocity,
    sample_worldline,
)


def test_minkowski_dot_signature() -> None:
    """Test the (+,-,-,-) inner product on single and batched vectors."""
    u = np.array([2.0, 1.0, 0.0, 0.0])
    assert minkowski_dot(u, u) == pytest.approx(3.0)

    batch = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    np.testing.assert_allclose(minkowski_dot(batch, batch), [1.0, -1.0])


def test_renormalize_velocity_rejects_spacelike() -> None:
    """Test that null and spacelike vectors are rejected."""
    np.testing.assert_allclose(
        renormalize_velocity(np.array([2.0, 0.0, 0.0, 0.0])), [1.0, 0.0, 0.0, 0.0]
    )

    with pytest.raises(NonTimelike):
        renormalize_velocity(np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(NonTimelike):
        renormalize_velocity(np.array([0.5, 1.0, 0.0, 0.0]))


def test_hyperbola_invariants(hyperbola: AnalyticTrajectory) -> None:
    """Test u·u = 1, u·ẍ = 0 and ẍ·ẍ = -a² along hyperbolic motion."""
    taus = np.linspace(-3.0, 3.0, 13)
    x, u, acc, jerk = hyperbola.arrays(taus)

    np.testing.assert_allclose(minkowski_dot(u, u), 1.0, rtol=1e-12)
    np.testing.assert_allclose(minkowski_dot(u, acc), 0.0, atol=1e-9)
    np.testing.assert_allclose(minkowski_dot(acc, acc), -1.0, rtol=1e-12)
    # Jerk of hyperbolic motion is a²u
    np.testing.assert_allclose(jerk, u)
    # Starts from rest at the origin
    np.testing.assert_allclose(x[6], 0.0, atol=1e-15)


def test_eval_analytic_carries_exact_acceleration() -> None:
    """Test that closed-form states report ẍ·ẍ exactly."""
    state = eval_analytic(AnalyticTrajectory.uniform_acceleration(2.0), 0.7)

    assert state.proper_acceleration_squared == -4.0
    state.check()


def test_uniform_velocity_requires_subluminal_speed() -> None:
    """Test inertial trajectories reject |v| >= 1."""
    traj = AnalyticTrajectory.uniform_velocity((0.6, 0.0, 0.0))
    assert traj.velocity[0] == pytest.approx(1.25)

    with pytest.raises(NonTimelike):
        AnalyticTrajectory.uniform_velocity((0.8, 0.6, 0.0))


def test_uniform_acceleration_requires_positive_a() -> None:
    """Test that non-positive accelerations are rejected."""
    with pytest.raises(OutOfRange):
        AnalyticTrajectory.uniform_acceleration(0.0)


def test_from_state_classifies_motion(hyperbola: AnalyticTrajectory) -> None:
    """Test that a sampled state maps back to the matching trajectory family."""
    moving = AnalyticTrajectory.from_state(eval_analytic(hyperbola, 1.5))
    assert moving.kind == "uniform-acceleration"
    assert moving.proper_acceleration == pytest.approx(1.0)

    # The reconstructed path agrees with the original away from tau0
    late = np.array([2.5])
    np.testing.assert_allclose(
        moving.arrays(late)[0], hyperbola.arrays(late)[0], atol=1e-9
    )

    static = AnalyticTrajectory.static((1.0, 2.0, 3.0))
    rest = AnalyticTrajectory.from_state(eval_analytic(static, 0.0))
    assert rest.kind == "static"


def test_worldline_interpolation_matches_closed_form(
    hyperbola: AnalyticTrajectory,
) -> None:
    """Test cubic Hermite interpolation between samples of a hyperbola."""
    worldline = sample_worldline(hyperbola, np.linspace(0.0, 2.0, 201))

    state = interpolate(worldline, 1.2345)
    exact = eval_analytic(hyperbola, 1.2345)

    np.testing.assert_allclose(state.x, exact.x, atol=1e-8)
    np.testing.assert_allclose(state.u, exact.u, atol=1e-7)
    assert minkowski_dot(state.u, state.u) == pytest.approx(1.0, abs=1e-12)


def test_worldline_interpolation_out_of_range(hyperbola: AnalyticTrajectory) -> None:
    """Test that interpolation outside the samples raises OutOfRange."""
    worldline = sample_worldline(hyperbola, np.linspace(0.0, 1.0, 11))

    with pytest.raises(OutOfRange):
        interpolate(worldline, 1.5)


def test_worldline_validation() -> None:
    """Test shape, ordering and normalization checks on construction."""
    tau = np.array([0.0, 1.0])
    rest = np.tile([1.0, 0.0, 0.0, 0.0], (2, 1))
    zeros = np.zeros((2, 4))

    with pytest.raises(GridMismatch):
        Worldline(tau=np.array([1.0, 0.0]), x=zeros, u=rest, acc=zeros)
    with pytest.raises(GridMismatch):
        Worldline(tau=tau, x=zeros[:1], u=rest, acc=zeros)
    with pytest.raises(NonTimelike):
        Worldline(tau=tau, x=zeros, u=2.0 * rest, acc=zeros)


def test_worldline_to_frame(hyperbola: AnalyticTrajectory) -> None:
    """Test the worldline CSV layout."""
    table = sample_worldline(hyperbola, np.linspace(0.0, 1.0, 5)).to_frame()

    assert list(table.columns) == WORLDLINE_COLUMNS
    assert len(table) == 5


def test_is_stationary(hyperbola: AnalyticTrajectory) -> None:
    """Test stationarity detection for sampled worldlines."""
    assert is_stationary(hyperbola)
    assert is_stationary(sample_worldline(hyperbola, np.linspace(0.0, 1.0, 11)))

    # Varying acceleration along x¹
    tau = np.linspace(0.0, 1.0, 11)
    rapidity = 0.5 * tau**2
    u = np.column_stack([np.cosh(rapidity), np.sinh(rapidity), 0 * tau, 0 * tau])
    acc = tau[:, None] * np.column_stack(
        [np.sinh(rapidity), np.cosh(rapidity), 0 * tau, 0 * tau]
    )
    jerk = np.gradient(acc, tau, axis=0)
    varying = Worldline(tau=tau, x=np.zeros((11, 4)), u=u, acc=acc, jerk=jerk)
    assert not is_stationary(varying)


def test_comoving_tetrad_is_orthonormal(hyperbola: AnalyticTrajectory) -> None:
    """Test that e_(a)·e_(b) = η_ab with e_(0) = u and e_(1) along ẍ."""
    _, u, acc, _ = hyperbola.arrays(np.array([0.0, 1.0, 2.0]))
    frames = comoving_tetrad(u, acc)

    for frame in frames:
        gram = minkowski_dot(frame[:, None, :], frame[None, :, :])
        np.testing.assert_allclose(gram, np.diag([1.0, -1.0, -1.0, -1.0]), atol=1e-10)
    np.testing.assert_allclose(frames[:, 0], u)
    np.testing.assert_allclose(frames[:, 1], acc, atol=1e-12)


def test_comoving_tetrad_at_large_rapidity(hyperbola: AnalyticTrajectory) -> None:
    """Test that the frames keep four orthonormal legs deep into the boost."""
    tau = np.array([12.5, 25.0, 40.0])
    _, u, acc, _ = hyperbola.arrays(tau)

    frames = comoving_tetrad(u, acc)

    # Verify the legs: u, the acceleration direction and the untouched transverse axes
    assert frames.shape == (3, 4, 4)
    np.testing.assert_allclose(frames[:, 0], u)
    np.testing.assert_allclose(frames[:, 1], acc, rtol=1e-9)
    np.testing.assert_array_equal(frames[:, 2], np.tile([0.0, 0.0, 1.0, 0.0], (3, 1)))
    np.testing.assert_array_equal(frames[:, 3], np.tile([0.0, 0.0, 0.0, 1.0], (3, 1)))

    # Verify orthonormality relative to the size of the boosted components
    for frame, gamma in zip(frames, u[:, 0]):
        gram = minkowski_dot(frame[:, None, :], frame[None, :, :])
        np.testing.assert_allclose(
            gram, np.diag([1.0, -1.0, -1.0, -1.0]), atol=1e-12 * gamma**2
        )


def test_comoving_tetrad_generic_direction() -> None:
    """Test a boosted, accelerated state whose legs mix every lab axis."""
    state = AnalyticTrajectory.uniform_acceleration(2.0, axis=3)
    boost = np.eye(4)
    boost[:2, :2] = [[1.25, 0.75], [0.75, 1.25]]
    _, u, acc, _ = state.arrays(np.array([0.3, 1.7]))
    u, acc = u @ boost.T, acc @ boost.T

    frames = comoving_tetrad(u, acc)

    for frame, a in zip(frames, acc):
        gram = minkowski_dot(frame[:, None, :], frame[None, :, :])
        np.testing.assert_allclose(gram, np.diag([1.0, -1.0, -1.0, -1.0]), atol=1e-10)
        np.testing.assert_allclose(frame[1], a / 2.0, atol=1e-10)
