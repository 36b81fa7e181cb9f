"""Minkowski four-vectors, proper-time worldlines and analytic reference paths.

Signature is (+,-,-,-) throughout and four-vectors are stored with upper
indices as numpy arrays whose last axis has length 4.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import pandas as pd
from scipy.interpolate import CubicHermiteSpline

from physics.errors import GridMismatch, NonTimelike, OutOfRange


logger = logging.getLogger(__name__)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

# Normalization tolerances, scaled by (u⁰)² so boosted states are not rejected
# for plain rounding in cosh² - sinh².
NORM_TOL = 1e-9
ORTHO_TOL = 1e-7

WORLDLINE_COLUMNS = [
    "tau",
    "x0", "x1", "x2", "x3",
    "u0", "u1", "u2", "u3",
    "a0", "a1", "a2", "a3",
]  # fmt: skip

PathArrays = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minkowski inner product a·b = a0·b0 - a1·b1 - a2·b2 - a3·b3.

    Broadcasts over leading axes and accepts complex input.

    Args:
        a: Four-vector(s), last axis of length 4.
        b: Four-vector(s), last axis of length 4.

    Returns:
        np.ndarray: The inner product with the last axis contracted.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def lower(v: np.ndarray) -> np.ndarray:
    """Lower the index of a four-vector."""
    return np.asarray(v) @ METRIC


def renormalize_velocity(u: np.ndarray) -> np.ndarray:
    """Rescale a timelike four-velocity to unit norm.

    Args:
        u: Four-velocity, or an array of them.

    Returns:
        np.ndarray: u / sqrt(u·u).

    Raises:
        NonTimelike: If u·u <= 0 for any vector.
    """
    u = np.asarray(u, dtype=float)
    norm = minkowski_dot(u, u)
    if np.any(norm <= 0.0) or not np.all(np.isfinite(norm)):
        raise NonTimelike(f"Four-velocity is not timelike: u·u = {norm}")
    return u / np.sqrt(norm)[..., None]


def _scaled(tol: float, u: np.ndarray) -> np.ndarray:
    return tol * (1.0 + np.asarray(u)[..., 0] ** 2)


@dataclass(frozen=True)
class WorldlineState:
    """Position, velocity, acceleration and optional jerk at one proper time."""

    tau: float
    x: np.ndarray
    u: np.ndarray
    acc: np.ndarray
    jerk: np.ndarray | None = None
    # Exact ẍ·ẍ when known in closed form; None means compute it.
    acc_squared: float | None = None

    @property
    def proper_acceleration_squared(self) -> float:
        """ẍ·ẍ, using the closed-form value when one was supplied."""
        if self.acc_squared is not None:
            return self.acc_squared
        return float(minkowski_dot(self.acc, self.acc))

    def check(self) -> None:
        """Validate the normalization invariants.

        Raises:
            NonTimelike: If u·u or u·ẍ drift beyond tolerance.
        """
        norm = float(minkowski_dot(self.u, self.u))
        if abs(norm - 1.0) > _scaled(NORM_TOL, self.u):
            raise NonTimelike(f"u·u = {norm} at tau={self.tau}")
        ortho = float(minkowski_dot(self.u, self.acc))
        if abs(ortho) > _scaled(ORTHO_TOL, self.u):
            raise NonTimelike(f"u·acc = {ortho} at tau={self.tau}")


def induced_metric(state: WorldlineState) -> float:
    """Pulled-back metric h = ẋ·ẋ; equals 1 in proper-time gauge."""
    return float(minkowski_dot(state.u, state.u))


@dataclass(frozen=True)
class Worldline:
    """Sampled proper-time worldline with cubic Hermite interpolation."""

    tau: np.ndarray
    x: np.ndarray
    u: np.ndarray
    acc: np.ndarray
    jerk: np.ndarray | None = None
    order: Literal["cubic", "linear"] = "cubic"

    def __post_init__(self) -> None:
        """Validate shapes, ordering and normalization."""
        tau = np.asarray(self.tau, dtype=float)
        if tau.ndim != 1 or tau.size < 2:
            raise GridMismatch("A worldline needs at least two samples")
        if np.any(np.diff(tau) <= 0.0):
            raise GridMismatch("Worldline proper times must be strictly increasing")
        for name in ("x", "u", "acc", "jerk"):
            value = getattr(self, name)
            if value is None:
                continue
            if np.shape(value) != (tau.size, 4):
                raise GridMismatch(
                    f"'{name}' has shape {np.shape(value)}, expected ({tau.size}, 4)"
                )
        norm = minkowski_dot(self.u, self.u)
        if np.any(np.abs(norm - 1.0) > _scaled(NORM_TOL, self.u)):
            raise NonTimelike("Worldline samples violate u·u = 1")
        ortho = minkowski_dot(self.u, self.acc)
        if np.any(np.abs(ortho) > _scaled(ORTHO_TOL, self.u)):
            raise NonTimelike("Worldline samples violate u·acc = 0")

    @classmethod
    def from_states(
        cls,
        states: list[WorldlineState],
        *,
        order: Literal["cubic", "linear"] = "cubic",
    ) -> "Worldline":
        """Build a worldline from an ordered list of states."""
        jerk = None
        if all(s.jerk is not None for s in states):
            jerk = np.array([s.jerk for s in states])
        return cls(
            tau=np.array([s.tau for s in states]),
            x=np.array([s.x for s in states]),
            u=np.array([s.u for s in states]),
            acc=np.array([s.acc for s in states]),
            jerk=jerk,
            order=order,
        )

    def __len__(self) -> int:
        """Number of samples."""
        return len(self.tau)

    def state(self, index: int) -> WorldlineState:
        """Return the stored sample at ``index``."""
        return WorldlineState(
            tau=float(self.tau[index]),
            x=self.x[index],
            u=self.u[index],
            acc=self.acc[index],
            jerk=None if self.jerk is None else self.jerk[index],
        )

    @property
    def samples(self) -> list[WorldlineState]:
        """All samples as states."""
        return [self.state(i) for i in range(len(self))]

    @cached_property
    def _splines(
        self,
    ) -> tuple[CubicHermiteSpline, CubicHermiteSpline, CubicHermiteSpline]:
        jerk = self.jerk
        if jerk is None:
            jerk = np.gradient(self.acc, self.tau, axis=0)
        return (
            CubicHermiteSpline(self.tau, self.x, self.u, axis=0),
            CubicHermiteSpline(self.tau, self.u, self.acc, axis=0),
            CubicHermiteSpline(self.tau, self.acc, jerk, axis=0),
        )

    def arrays(self, taus: np.ndarray) -> PathArrays:
        """Interpolated (x, u, acc, jerk) at the given proper times.

        Args:
            taus: Proper times inside the sampled range.

        Returns:
            tuple: Arrays of shape (len(taus), 4).

        Raises:
            OutOfRange: If any proper time lies outside the samples.
        """
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        if np.any(taus < self.tau[0]) or np.any(taus > self.tau[-1]):
            raise OutOfRange(
                f"Proper time outside [{self.tau[0]}, {self.tau[-1]}]: "
                f"{taus.min()}..{taus.max()}"
            )
        if self.order == "linear":

            def lerp(values: np.ndarray) -> np.ndarray:
                return np.column_stack(
                    [np.interp(taus, self.tau, values[:, k]) for k in range(4)]
                )

            jerk = self.jerk
            if jerk is None:
                jerk = np.gradient(self.acc, self.tau, axis=0)
            x, u, acc, jerk = lerp(self.x), lerp(self.u), lerp(self.acc), lerp(jerk)
        else:
            x_spline, u_spline, acc_spline = self._splines
            x, u, acc = x_spline(taus), u_spline(taus), acc_spline(taus)
            jerk = acc_spline.derivative()(taus)

        u = renormalize_velocity(u)
        acc = acc - u * minkowski_dot(u, acc)[:, None]

        # Exact hits return the stored sample untouched
        hits = np.searchsorted(self.tau, taus)
        for row, idx in enumerate(hits):
            if idx < len(self.tau) and self.tau[idx] == taus[row]:
                x[row], u[row], acc[row] = self.x[idx], self.u[idx], self.acc[idx]
                if self.jerk is not None:
                    jerk[row] = self.jerk[idx]
        return x, u, acc, jerk

    def to_frame(self) -> pd.DataFrame:
        """Tabulate the samples with the worldline CSV header."""
        data = np.column_stack([self.tau, self.x, self.u, self.acc])
        return pd.DataFrame(data, columns=WORLDLINE_COLUMNS)


def interpolate(w: Worldline, tau: float) -> WorldlineState:
    """Interpolate a worldline at one proper time.

    Args:
        w: Sampled worldline.
        tau: Proper time within the sampled range.

    Returns:
        WorldlineState: Interpolated state with renormalized velocity.

    Raises:
        OutOfRange: If ``tau`` lies outside the samples.
    """
    x, u, acc, jerk = w.arrays(np.array([tau]))
    return WorldlineState(tau=float(tau), x=x[0], u=u[0], acc=acc[0], jerk=jerk[0])


@dataclass(frozen=True)
class AnalyticTrajectory:
    """Closed-form stationary trajectory.

    Uniform acceleration is parametrized by the state at ``tau0``: position
    ``position``, velocity ``velocity`` and acceleration ``acceleration``
    (spacelike, orthogonal to the velocity).
    """

    kind: Literal["static", "uniform-velocity", "uniform-acceleration"]
    position: np.ndarray = field(default_factory=lambda: np.zeros(4))
    velocity: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    acceleration: np.ndarray = field(default_factory=lambda: np.zeros(4))
    tau0: float = 0.0

    @classmethod
    def static(
        cls, position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ) -> "AnalyticTrajectory":
        """Particle at rest at a spatial point."""
        return cls(kind="static", position=np.array([0.0, *position]))

    @classmethod
    def uniform_velocity(
        cls,
        velocity: tuple[float, float, float],
        position: tuple[float, float, float] = (0.0, 0.0, 0.0),
    ) -> "AnalyticTrajectory":
        """Inertial motion with three-velocity ``velocity`` (|v| < 1)."""
        v = np.asarray(velocity, dtype=float)
        if v @ v >= 1.0:
            raise NonTimelike(f"Three-velocity {velocity} is not subluminal")
        gamma = 1.0 / np.sqrt(1.0 - v @ v)
        return cls(
            kind="uniform-velocity",
            position=np.array([0.0, *position]),
            velocity=gamma * np.array([1.0, *v]),
        )

    @classmethod
    def uniform_acceleration(
        cls,
        a: float,
        *,
        axis: int = 1,
        position: tuple[float, float, float] = (0.0, 0.0, 0.0),
    ) -> "AnalyticTrajectory":
        """Hyperbolic motion from rest with proper acceleration ``a`` along ``axis``."""
        if a <= 0.0:
            raise OutOfRange(f"Proper acceleration must be positive, got {a}")
        acceleration = np.zeros(4)
        acceleration[axis] = a
        return cls(
            kind="uniform-acceleration",
            position=np.array([0.0, *position]),
            acceleration=acceleration,
        )

    @classmethod
    def from_state(
        cls, state: WorldlineState, *, tol: float = 1e-9
    ) -> "AnalyticTrajectory":
        """Stationary trajectory through a state, classified by its acceleration."""
        a_sq = -state.proper_acceleration_squared
        if a_sq <= tol**2:
            at_rest = np.allclose(state.u[1:], 0.0, atol=tol)
            return cls(
                kind="static" if at_rest else "uniform-velocity",
                position=np.asarray(state.x, dtype=float),
                velocity=np.asarray(state.u, dtype=float),
                tau0=state.tau,
            )
        return cls(
            kind="uniform-acceleration",
            position=np.asarray(state.x, dtype=float),
            velocity=np.asarray(state.u, dtype=float),
            acceleration=np.asarray(state.acc, dtype=float),
            tau0=state.tau,
        )

    @property
    def proper_acceleration(self) -> float:
        """Magnitude a of the proper acceleration."""
        if self.kind != "uniform-acceleration":
            return 0.0
        return float(np.sqrt(-minkowski_dot(self.acceleration, self.acceleration)))

    def canonical(self) -> "AnalyticTrajectory":
        """Same motion in the comoving frame at ``tau0``, starting at the origin."""
        if self.kind == "uniform-acceleration":
            return AnalyticTrajectory.uniform_acceleration(self.proper_acceleration)
        return AnalyticTrajectory.static()

    def arrays(self, taus: np.ndarray) -> PathArrays:
        """Closed-form (x, u, acc, jerk); ``taus`` may be complex."""
        s = np.atleast_1d(np.asarray(taus)) - self.tau0
        s = s[:, None]
        x0, u0, a0 = self.position, self.velocity, self.acceleration
        if self.kind != "uniform-acceleration":
            x = x0 + u0 * s
            u = np.broadcast_to(u0, x.shape) + 0.0 * s
            zero = np.zeros_like(x)
            return x, u, zero, zero.copy()
        a = self.proper_acceleration
        sh, ch = np.sinh(a * s), np.cosh(a * s)
        x = x0 + u0 * sh / a + a0 * (ch - 1.0) / a**2
        u = u0 * ch + a0 * sh / a
        acc = a * u0 * sh + a0 * ch
        return x, u, acc, a**2 * u


def eval_analytic(traj: AnalyticTrajectory, tau: float) -> WorldlineState:
    """Evaluate a closed-form trajectory at proper time ``tau``.

    Args:
        traj: Analytic trajectory.
        tau: Proper time.

    Returns:
        WorldlineState: State with jerk and the exact ẍ·ẍ attached.
    """
    x, u, acc, jerk = traj.arrays(np.array([float(tau)]))
    return WorldlineState(
        tau=float(tau),
        x=x[0],
        u=u[0],
        acc=acc[0],
        jerk=jerk[0],
        acc_squared=-traj.proper_acceleration**2,
    )


Path = Worldline | AnalyticTrajectory


def path_arrays(path: Path, taus: np.ndarray) -> PathArrays:
    """(x, u, acc, jerk) along either kind of path."""
    return path.arrays(taus)


def sample_worldline(path: Path, taus: np.ndarray) -> Worldline:
    """Tabulate a path on a proper-time grid."""
    taus = np.asarray(taus, dtype=float)
    x, u, acc, jerk = path.arrays(taus)
    return Worldline(tau=taus, x=x, u=u, acc=acc, jerk=jerk)


def is_stationary(path: Path, *, tol: float = 1e-6) -> bool:
    """Whether a path is static, inertial or uniformly accelerated.

    For sampled worldlines the proper acceleration must be constant and the
    jerk must equal a²u, the hyperbolic-motion condition.
    """
    if isinstance(path, AnalyticTrajectory):
        return True
    if path.jerk is None:
        return False
    a_sq = minkowski_dot(path.acc, path.acc)
    scale = max(1.0, float(np.max(np.abs(a_sq))))
    if np.ptp(a_sq) > tol * scale:
        return False
    residual = path.jerk + path.u * a_sq[:, None]
    return bool(np.max(np.abs(residual)) <= tol * scale * np.max(np.abs(path.u)))


def comoving_tetrad(
    u: np.ndarray, acc: np.ndarray, *, tol: float = 1e-12
) -> np.ndarray:
    """Orthonormal frames e_(a) along a path, e_(0) = u.

    The spatial legs are lab axes carried to the rest frame by the pure boost
    taking (1, 0, 0, 0) to u, rotated so that e_(1) points along the
    acceleration when it is nonzero. The remaining two legs are the lab axis
    least aligned with the rest-frame acceleration, orthogonalized, and the
    cross product that completes a right-handed triad. All orthogonalization
    happens between rest-frame 3-vectors, so the frames stay orthonormal at
    any rapidity.

    Args:
        u: Four-velocities, shape (n, 4).
        acc: Accelerations, shape (n, 4).
        tol: Rest-frame acceleration below which the boosted lab axes are kept.

    Returns:
        np.ndarray: Shape (n, 4, 4); ``frames[i, a]`` is e_(a) at sample i.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    acc = np.atleast_2d(np.asarray(acc, dtype=float))
    n = u.shape[0]
    gamma, p = u[:, 0], u[:, 1:]
    boosted = np.zeros((n, 3, 4))
    boosted[:, :, 0] = p
    outer = np.einsum("ni,nj->nij", p, p)
    boosted[:, :, 1:] = np.eye(3) + outer / (1.0 + gamma)[:, None, None]

    # Rest-frame acceleration: the part along p shrinks by γ, the rest is unchanged.
    speed = np.linalg.norm(p, axis=1)
    direction = np.divide(
        p, speed[:, None], out=np.zeros_like(p), where=speed[:, None] > 0.0
    )
    along = np.sum(direction * acc[:, 1:], axis=1)[:, None] * direction
    rest = (acc[:, 1:] - along) + along / gamma[:, None]
    a_norm = np.linalg.norm(rest, axis=1)
    accelerated = a_norm > tol
    triads = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    if np.any(accelerated):
        first = rest[accelerated] / a_norm[accelerated, None]
        axis = np.eye(3)[np.argmin(np.abs(first), axis=1)]
        second = axis - first * np.sum(first * axis, axis=1)[:, None]
        second /= np.linalg.norm(second, axis=1)[:, None]
        triads[accelerated] = np.stack([first, second, np.cross(first, second)], axis=1)

    frames = np.empty((n, 4, 4))
    frames[:, 0] = u
    frames[:, 1:] = np.einsum("nij,njm->nim", triads, boosted)
    return frames
