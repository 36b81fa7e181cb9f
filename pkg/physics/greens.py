"""Two-point functions of the massless scalar field.

Conventions:
    G⁺(y, y') = <φ(y) φ(y')> is the Wightman function, regulated by shifting
    the time separation to Δt - iε. The Hadamard function is the full
    anticommutator G_H = 2 Re G⁺, and the commutator function used as the
    dissipation kernel is -2 Im G⁺.

    3+1 vacuum:  G⁺ = -1 / (4π² ((Δt - iε)² - r²))
    1+1 vacuum:  G⁺ = -(1/4π) ln[(Δu - iε)(Δv - iε) / ℓ²]
                 with u = t - x, v = t + x

Thermal states use closed forms of the image sum over Δt + inβ. Dirichlet
mirrors use the image method when static and the null-ray map p(u) when
moving (1+1 only).
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Callable, Literal

import numpy as np
import pandas as pd
from scipy import integrate, optimize, special
from scipy.interpolate import CubicSpline

from physics.errors import (
    BadRegulator,
    ConfigurationError,
    DegenerateMap,
    NonStationaryTrajectory,
    PointBehindMirror,
    QuadratureNotConverged,
    RootBracketFailure,
    SuperluminalMirror,
    WrongVariant,
)
from physics.geometry import (
    AnalyticTrajectory,
    Path,
    Worldline,
    is_stationary,
    minkowski_dot,
)


logger = logging.getLogger(__name__)

THERMAL_IMAGES = 50
FOUR_PI_SQ = 4.0 * np.pi**2


# --- Field states and mirrors ---


@dataclass(frozen=True)
class FieldState:
    """Gaussian state of the massless field."""

    dimension: Literal[1, 3] = 3
    temperature: float | None = None
    ir_scale: float = 1.0

    def __post_init__(self) -> None:
        """Validate the state."""
        if self.dimension not in (1, 3):
            raise WrongVariant(
                f"Spatial dimension must be 1 or 3, got {self.dimension}"
            )
        if self.temperature is not None and self.temperature <= 0.0:
            raise ConfigurationError(
                f"Thermal state needs T > 0, got {self.temperature}"
            )
        if self.ir_scale <= 0.0:
            raise ConfigurationError(f"IR scale must be positive, got {self.ir_scale}")

    @property
    def is_vacuum(self) -> bool:
        """True for the zero-temperature state."""
        return self.temperature is None

    @property
    def beta(self) -> float:
        """Inverse temperature; infinite in vacuum."""
        return np.inf if self.temperature is None else 1.0 / self.temperature


@dataclass(frozen=True)
class MirrorConfig:
    """Perfectly reflecting Dirichlet boundary.

    ``static-plane-3p1`` is the plane n·x = offset. ``static-point-1p1`` sits at
    x¹ = offset. ``moving-point-1p1`` follows z(t) given either as callables
    (``trajectory`` plus optional ``derivatives`` ż, z̈, z⃛) or as a sample
    table ``(t, z)``.
    """

    variant: Literal["static-plane-3p1", "static-point-1p1", "moving-point-1p1"]
    offset: float = 0.0
    normal: tuple[float, float, float] = (0.0, 0.0, 1.0)
    trajectory: Callable[[float], float] | None = None
    derivatives: tuple[Callable[[float], float], ...] | None = None
    table: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self) -> None:
        """Validate the variant's inputs."""
        if self.variant == "static-plane-3p1":
            n = np.asarray(self.normal, dtype=float)
            if not np.isclose(n @ n, 1.0):
                raise ConfigurationError(
                    f"Mirror normal must be a unit vector, got {self.normal}"
                )
        if self.variant == "moving-point-1p1":
            if self.trajectory is None and self.table is None:
                raise ConfigurationError(
                    "Moving mirror needs a trajectory or a sample table"
                )
            if self.table is not None:
                t, z = (np.asarray(c, dtype=float) for c in self.table)
                speeds = np.abs(np.diff(z) / np.diff(t))
                if np.any(speeds >= 1.0):
                    raise SuperluminalMirror(
                        f"Tabulated mirror speed reaches {speeds.max():.6f}"
                    )

    @property
    def is_static(self) -> bool:
        """True for the image-method variants."""
        return self.variant != "moving-point-1p1"

    @property
    def unit_normal(self) -> np.ndarray:
        """Spatial unit normal as a four-vector with zero time part."""
        if self.variant == "static-point-1p1":
            return np.array([0.0, 1.0, 0.0, 0.0])
        return np.array([0.0, *self.normal], dtype=float)

    @property
    def reflection(self) -> np.ndarray:
        """Linear part of the reflection across the mirror."""
        n = self.unit_normal
        return np.eye(4) - 2.0 * np.outer(n, n)

    @cached_property
    def interpolant(self) -> CubicSpline:
        """Cubic spline through the sample table."""
        t, z = (np.asarray(c, dtype=float) for c in self.table)
        return CubicSpline(t, z)


def image_point(mirror: MirrorConfig, y: np.ndarray) -> np.ndarray:
    """Reflect the spatial part of ``y`` across a static mirror.

    Args:
        mirror: Static mirror.
        y: Point(s), last axis of length 4.

    Returns:
        np.ndarray: Mirror image; the time component is unchanged.

    Raises:
        WrongVariant: For moving mirrors.
    """
    if not mirror.is_static:
        raise WrongVariant("Image points exist only for static mirrors")
    y = np.asarray(y)
    anchor = mirror.offset * mirror.unit_normal
    return (y - anchor) @ mirror.reflection.T + anchor


# --- Moving mirror ray map ---


@dataclass(frozen=True)
class RayMap:
    """Null-ray map v = p(u) of a moving mirror and its first three derivatives."""

    p: Callable[[float], float]
    dp: Callable[[float], float]
    d2p: Callable[[float], float]
    d3p: Callable[[float], float]

    @classmethod
    def from_function(
        cls,
        p: Callable[[float], float],
        dp: Callable[[float], float],
        d2p: Callable[[float], float],
        d3p: Callable[[float], float],
    ) -> "RayMap":
        """Wrap an explicitly known map."""
        return cls(p=p, dp=dp, d2p=d2p, d3p=d3p)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """Evaluate p elementwise."""
        return np.vectorize(self.p, otypes=[float])(u)


def _reflection_time(
    z: Callable[[float], float], u: float, bounds: tuple[float, float] | None
) -> float:
    """Solve t - z(t) = u for the mirror time t."""

    def condition(t: float) -> float:
        return t - z(t) - u

    if bounds is not None:
        lo, hi = bounds
        if condition(lo) > 0.0 or condition(hi) < 0.0:
            raise RootBracketFailure(
                f"Mirror table [{lo}, {hi}] does not reach u={u}"
            )
    else:
        width = 1.0
        lo, hi = u - width, u + width
        for _ in range(80):
            if condition(lo) <= 0.0 <= condition(hi):
                break
            width *= 2.0
            lo, hi = u - width, u + width
        else:
            raise RootBracketFailure(f"Could not bracket the reflection time for u={u}")
    return optimize.brentq(
        condition, lo, hi, xtol=1e-14, rtol=4.0 * np.finfo(float).eps, maxiter=500
    )


def build_ray_map(mirror: MirrorConfig, *, step: float = 1e-3) -> RayMap:
    """Build p(u) for a moving point mirror in 1+1 dimensions.

    For each u the reflection time t_m solves t_m - z(t_m) = u and
    p(u) = t_m + z(t_m). Derivatives are analytic when ż, z̈ and z⃛ are given,
    otherwise five-point finite differences of the solved map.

    Args:
        mirror: Moving-point mirror.
        step: Finite-difference step in u.

    Returns:
        RayMap: The map and its derivatives.

    Raises:
        WrongVariant: For static mirrors.
        SuperluminalMirror: If |ż| >= 1 at a solved reflection point.
        RootBracketFailure: If the reflection condition cannot be bracketed.
    """
    if mirror.variant != "moving-point-1p1":
        raise WrongVariant("Ray maps are built from moving-point mirrors only")

    if mirror.table is not None:
        spline = mirror.interpolant
        t_table = np.asarray(mirror.table[0], dtype=float)
        bounds = (float(t_table[0]), float(t_table[-1]))
        z = lambda t: float(spline(t))  # noqa: E731
        derivatives = tuple(spline.derivative(order) for order in (1, 2, 3))
    else:
        bounds = None
        z = mirror.trajectory
        derivatives = mirror.derivatives

    def t_mirror(u: float) -> float:
        t = _reflection_time(z, u, bounds)
        if derivatives is not None and abs(float(derivatives[0](t))) >= 1.0:
            raise SuperluminalMirror(
                f"Mirror speed reaches {float(derivatives[0](t))} at t={t}"
            )
        return t

    def p(u: float) -> float:
        t = t_mirror(u)
        return t + float(z(t))

    if derivatives is not None:
        zd, zdd, zddd = derivatives

        def dp(u: float) -> float:
            t = t_mirror(u)
            return (1.0 + zd(t)) / (1.0 - zd(t))

        def d2p(u: float) -> float:
            t = t_mirror(u)
            return 2.0 * zdd(t) / (1.0 - zd(t)) ** 3

        def d3p(u: float) -> float:
            t = t_mirror(u)
            w = 1.0 - zd(t)
            return 2.0 * zddd(t) / w**4 + 6.0 * zdd(t) ** 2 / w**5

    else:
        h = step

        def dp(u: float) -> float:
            outer = p(u + 2 * h) - p(u - 2 * h)
            inner = p(u + h) - p(u - h)
            return (8 * inner - outer) / (12 * h)

        def d2p(u: float) -> float:
            outer = p(u + 2 * h) + p(u - 2 * h)
            inner = p(u + h) + p(u - h)
            return (16 * inner - outer - 30 * p(u)) / (12 * h**2)

        def d3p(u: float) -> float:
            outer = p(u + 2 * h) - p(u - 2 * h)
            inner = p(u + h) - p(u - h)
            return (outer - 2 * inner) / (2 * h**3)

    return RayMap(p=p, dp=dp, d2p=d2p, d3p=d3p)


def mirror_energy_flux(ray_map: RayMap, u: float) -> float:
    """Radiated flux <T_uu> = -(1/24π)[p'''/p' - (3/2)(p''/p')²].

    Args:
        ray_map: Mirror ray map.
        u: Retarded null coordinate.

    Returns:
        float: Energy flux; zero for affine maps.

    Raises:
        DegenerateMap: If p'(u) <= 0.
    """
    d1 = float(ray_map.dp(u))
    if d1 <= 0.0:
        raise DegenerateMap(f"p'(u) = {d1} at u={u}")
    d2, d3 = float(ray_map.d2p(u)), float(ray_map.d3p(u))
    return -(d3 / d1 - 1.5 * (d2 / d1) ** 2) / (24.0 * np.pi)


# --- Closed-form Wightman functions ---


def _vacuum_3p1(dt: np.ndarray, r_sq: np.ndarray) -> np.ndarray:
    return -1.0 / (FOUR_PI_SQ * (dt**2 - r_sq))


def _thermal_3p1(dt: np.ndarray, r_sq: np.ndarray, beta: float) -> np.ndarray:
    """Summed images over Δt + inβ, in closed form."""
    dt, r_sq = np.broadcast_arrays(
        np.asarray(dt, dtype=complex), np.asarray(r_sq, dtype=complex)
    )
    r = np.sqrt(r_sq)
    k = np.pi / beta
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        coincident = -(k**2) / (FOUR_PI_SQ * np.sinh(k * dt) ** 2)
        coth_gap = 1.0 / np.tanh(k * (dt - r)) - 1.0 / np.tanh(k * (dt + r))
        split = -coth_gap / (8.0 * np.pi * beta * r)
    small = np.abs(r) < 1e-7 * max(beta, 1.0)
    return np.where(small, coincident, split)


def _free_1p1(dt: np.ndarray, dx: np.ndarray, state: FieldState) -> np.ndarray:
    du, dv = dt - dx, dt + dx
    if state.is_vacuum:
        logs = np.log(du) + np.log(dv)
    else:
        k = np.pi / state.beta
        logs = np.log(np.sinh(k * du) / k) + np.log(np.sinh(k * dv) / k)
    return -(logs - 2.0 * np.log(state.ir_scale)) / (4.0 * np.pi)


def _free_wightman(state: FieldState, d: np.ndarray, eps: float) -> np.ndarray:
    d = np.asarray(d)
    dt = d[..., 0] - 1j * eps
    if state.dimension == 1:
        return _free_1p1(dt, d[..., 1], state)
    r_sq = np.sum(d[..., 1:] ** 2, axis=-1)
    if state.is_vacuum:
        return _vacuum_3p1(dt, r_sq)
    return _thermal_3p1(dt, r_sq, state.beta)


def thermal_image_sum(
    dt: np.ndarray,
    r: np.ndarray,
    beta: float,
    eps: float,
    *,
    n_max: int = THERMAL_IMAGES,
) -> np.ndarray:
    """3+1 thermal Wightman function as a truncated image sum.

    Sums the vacuum function over Δt + inβ for |n| <= n_max and adds the
    leading tail Σ_{|n|>n_max} 1/(4π²n²β²) through the trigamma function.
    """
    dt = np.asarray(dt, dtype=complex) - 1j * eps
    r_sq = np.asarray(r, dtype=float) ** 2
    total = np.zeros(np.broadcast(dt, r_sq).shape, dtype=complex)
    for n in range(-n_max, n_max + 1):
        total += _vacuum_3p1(dt + 1j * n * beta, r_sq)
    tail = 2.0 * special.polygamma(1, n_max + 1) / (FOUR_PI_SQ * beta**2)
    return total + tail


def hadamard_free(
    state: FieldState, y: np.ndarray, y2: np.ndarray, eps: float
) -> np.ndarray:
    """Hadamard function 2 Re G⁺ of the unconstrained field.

    Args:
        state: Field state.
        y: First point(s).
        y2: Second point(s).
        eps: Point-splitting regulator.

    Returns:
        np.ndarray: G_H(y, y').

    Raises:
        BadRegulator: If eps <= 0.
    """
    if eps <= 0.0:
        raise BadRegulator(f"Regulator must be positive, got {eps}")
    return 2.0 * np.real(_free_wightman(state, np.asarray(y) - np.asarray(y2), eps))


def hadamard_constrained_static(
    mirror: MirrorConfig, state: FieldState, y: np.ndarray, y2: np.ndarray, eps: float
) -> np.ndarray:
    """Dirichlet Hadamard function by the image method.

    G_H^c(y, y') = G_H(y, y') - G_H(y, image(y')).

    Raises:
        WrongVariant: For moving mirrors or a dimension mismatch.
        BadRegulator: If eps <= 0.
    """
    if not mirror.is_static:
        raise WrongVariant("Image method needs a static mirror")
    image = image_point(mirror, y2)
    return hadamard_free(state, y, y2, eps) - hadamard_free(state, y, image, eps)


def _moving_wightman(
    ray_map: RayMap, y: np.ndarray, y2: np.ndarray, eps: float
) -> np.ndarray:
    y, y2 = np.broadcast_arrays(np.atleast_2d(y), np.atleast_2d(y2))
    u, v = y[..., 0] - y[..., 1], y[..., 0] + y[..., 1]
    u2, v2 = y2[..., 0] - y2[..., 1], y2[..., 0] + y2[..., 1]
    pu, pu2 = ray_map(u), ray_map(u2)
    for vv, pp in ((v, pu), (v2, pu2)):
        if np.any(vv < pp - 1e-12 * (1.0 + np.abs(vv))):
            raise PointBehindMirror("Field point lies behind the moving mirror")
    logs = (
        np.log(v - v2 - 1j * eps)
        + np.log(pu - pu2 - 1j * eps)
        - np.log(v - pu2 - 1j * eps)
        - np.log(pu - v2 - 1j * eps)
    )
    return -logs / (4.0 * np.pi)


def hadamard_constrained_moving_1p1(
    ray_map: RayMap,
    point: tuple[float, float],
    point2: tuple[float, float],
    eps: float,
) -> float:
    """Dirichlet Hadamard function next to a moving mirror in 1+1 dimensions.

    Args:
        ray_map: Mirror ray map.
        point: Null coordinates (u, v) of the first point.
        point2: Null coordinates (u', v') of the second point.
        eps: Regulator.

    Returns:
        float: 2 Re G⁺ with G⁺ = -(1/4π) ln[(Δv - iε)(p(u) - p(u') - iε)
        / ((v - p(u') - iε)(p(u) - v' - iε))].

    Raises:
        PointBehindMirror: If v < p(u) for either point.
        BadRegulator: If eps <= 0.
    """
    if eps <= 0.0:
        raise BadRegulator(f"Regulator must be positive, got {eps}")
    (u, v), (u2, v2) = point, point2
    y = np.array([(u + v) / 2.0, (v - u) / 2.0, 0.0, 0.0])
    y2 = np.array([(u2 + v2) / 2.0, (v2 - u2) / 2.0, 0.0, 0.0])
    return float(2.0 * np.real(_moving_wightman(ray_map, y, y2, eps))[0])


# --- Kernels ---


@dataclass(frozen=True)
class CorrelatorKernel:
    """Evaluable two-point function of a field state, optionally mirror-constrained."""

    kind: Literal["hadamard", "wightman", "retarded-kernel"] = "hadamard"
    state: FieldState = field(default_factory=FieldState)
    mirror: MirrorConfig | None = None
    eps: float = 1e-3

    def __post_init__(self) -> None:
        """Check that the mirror and state fit together."""
        if self.eps <= 0.0:
            raise BadRegulator(f"Regulator must be positive, got {self.eps}")
        if self.mirror is None:
            return
        wants_3d = self.mirror.variant == "static-plane-3p1"
        if wants_3d != (self.state.dimension == 3):
            raise WrongVariant(
                f"Mirror '{self.mirror.variant}' does not live "
                f"in d={self.state.dimension}"
            )
        if not self.mirror.is_static and not self.state.is_vacuum:
            raise WrongVariant("Moving mirrors are supported in the vacuum state only")

    @property
    def boost_invariant(self) -> bool:
        """Vacuum kernels without boundaries are Lorentz invariant."""
        return self.mirror is None and self.state.is_vacuum

    @cached_property
    def ray_map(self) -> RayMap | None:
        """Ray map of a moving mirror, built on first use."""
        if self.mirror is None or self.mirror.is_static:
            return None
        return build_ray_map(self.mirror)

    def wightman(self, y: np.ndarray, y2: np.ndarray) -> np.ndarray:
        """G⁺(y, y'); points may be complex for analytic continuation."""
        y, y2 = np.asarray(y), np.asarray(y2)
        if self.mirror is not None and not self.mirror.is_static:
            return _moving_wightman(self.ray_map, y, y2, self.eps)
        value = _free_wightman(self.state, y - y2, self.eps)
        if self.mirror is not None:
            image = image_point(self.mirror, y2)
            value = value - _free_wightman(self.state, y - image, self.eps)
        return value

    def hadamard(self, y: np.ndarray, y2: np.ndarray) -> np.ndarray:
        """G_H(y, y') = 2 Re G⁺."""
        return 2.0 * np.real(self.wightman(y, y2))

    def commutator(self, y: np.ndarray, y2: np.ndarray) -> np.ndarray:
        """Odd part of the Wightman function, -2 Im G⁺ = i<[φ(y), φ(y')]>."""
        return -2.0 * np.imag(self.wightman(y, y2))

    def evaluate(self, y: np.ndarray, y2: np.ndarray) -> np.ndarray:
        """Evaluate according to ``kind``."""
        if self.kind == "wightman":
            return self.wightman(y, y2)
        if self.kind == "retarded-kernel":
            return self.commutator(y, y2)
        return self.hadamard(y, y2)


# --- Pullbacks ---


def _positions(path: Path, tau: np.ndarray) -> np.ndarray:
    return path.arrays(np.atleast_1d(tau))[0]


def hadamard_pullback(
    kernel: CorrelatorKernel, w1: Path, w2: Path, tau: np.ndarray, tau2: np.ndarray
) -> np.ndarray:
    """Hadamard function between x₁(τ) and x₂(τ').

    Args:
        kernel: Correlator kernel.
        w1: First path.
        w2: Second path.
        tau: Proper time(s) on the first path.
        tau2: Proper time(s) on the second path.

    Returns:
        np.ndarray: G_H(x₁(τ), x₂(τ')).
    """
    return kernel.hadamard(_positions(w1, tau), _positions(w2, tau2))


def wightman_pullback(
    kernel: CorrelatorKernel, w1: Path, w2: Path, tau: np.ndarray, tau2: np.ndarray
) -> np.ndarray:
    """Complex Wightman function between x₁(τ) and x₂(τ')."""
    return kernel.wightman(_positions(w1, tau), _positions(w2, tau2))


def pullback_matrix(
    kernel: CorrelatorKernel, path: Path, taus: np.ndarray
) -> pd.DataFrame:
    """Kernel matrix K(τᵢ, τⱼ) along one path, indexed by the τ grid."""
    taus = np.asarray(taus, dtype=float)
    x = _positions(path, taus)
    values = kernel.evaluate(x[:, None, :], x[None, :, :])
    if np.iscomplexobj(values):
        values = np.real(values)
    frame = pd.DataFrame(values, index=taus, columns=taus)
    frame.index.name = "tau"
    return frame


def thermal_equivalence_check(
    a: float, lags: np.ndarray, eps: float | None = None
) -> float:
    """Compare the accelerated vacuum pullback with a static thermal one.

    Evaluates the Hadamard function on a uniformly accelerated path in the
    3+1 vacuum and on a static path in the thermal state at T = a/2π, at the
    proper-time separations ``lags``. Points are placed symmetrically around
    τ = 0 to keep the interval well conditioned.

    Args:
        a: Proper acceleration, > 0.
        lags: Proper-time separations.
        eps: Regulator; defaults to 1e-3 times the smallest separation.

    Returns:
        float: Maximum absolute difference over the grid.
    """
    if a <= 0.0:
        raise ConfigurationError(f"Acceleration must be positive, got {a}")
    lags = np.asarray(lags, dtype=float)
    eps = 1e-3 * np.min(np.abs(lags)) if eps is None else eps
    accelerated = AnalyticTrajectory.uniform_acceleration(a)
    static = AnalyticTrajectory.static()
    vacuum = CorrelatorKernel(state=FieldState(dimension=3), eps=eps)
    bath = FieldState(dimension=3, temperature=a / (2.0 * np.pi))
    thermal = CorrelatorKernel(state=bath, eps=eps)
    lhs = hadamard_pullback(vacuum, accelerated, accelerated, lags / 2.0, -lags / 2.0)
    rhs = hadamard_pullback(thermal, static, static, lags / 2.0, -lags / 2.0)
    return float(np.max(np.abs(lhs - rhs)))


# --- Derivative moments for noise covariances ---


def _image_terms(
    kernel: CorrelatorKernel, y: np.ndarray, y2: np.ndarray, frames_j: np.ndarray
):
    """Yield (sign, separation, second-point frames) for every image term."""
    separations = [(1.0, y - y2, frames_j)]
    if kernel.mirror is not None:
        reflection = kernel.mirror.reflection
        image = image_point(kernel.mirror, y2)
        separations.append((-1.0, y - image, frames_j @ reflection.T))
    if kernel.state.is_vacuum:
        images = [0.0]
    else:
        beta = kernel.state.beta
        images = [n * beta for n in range(-THERMAL_IMAGES, THERMAL_IMAGES + 1)]
    for sign, d, frames in separations:
        for shift in images:
            d_n = d.astype(complex)
            d_n[..., 0] += 1j * shift - 1j * kernel.eps
            yield sign, d_n, frames


def frame_moments(
    kernel: CorrelatorKernel,
    y: np.ndarray,
    y2: np.ndarray,
    frames_i: np.ndarray,
    frames_j: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Hadamard function and its frame derivatives at point pairs.

    For each pair returns G_H, e_(a)·∂G_H at the first point, e_(b)·∂'G_H at
    the second point and e_(a)^μ e_(b)^ν ∂_μ∂'_ν G_H, using analytic
    derivatives of the 3+1 Wightman function.

    Args:
        kernel: 3+1 kernel, free, thermal or plane-constrained.
        y: First points, shape (P, 4).
        y2: Second points, shape (P, 4).
        frames_i: Frames at the first points, shape (P, 4, 4).
        frames_j: Frames at the second points, shape (P, 4, 4).

    Returns:
        tuple: Arrays of shape (P,), (P, 4), (P, 4), (P, 4, 4).

    Raises:
        WrongVariant: For 1+1 states or moving mirrors.
    """
    moving = kernel.mirror is not None and not kernel.mirror.is_static
    if kernel.state.dimension != 3 or moving:
        raise WrongVariant(
            "Derivative covariances are implemented for 3+1 static settings"
        )
    g = np.zeros(y.shape[:-1], dtype=complex)
    d_i = np.zeros(y.shape[:-1] + (4,), dtype=complex)
    d_j = np.zeros_like(d_i)
    dd = np.zeros(y.shape[:-1] + (4, 4), dtype=complex)
    for sign, d, frames in _image_terms(kernel, y, y2, frames_j):
        sigma = minkowski_dot(d, d)
        f1 = 1.0 / (FOUR_PI_SQ * sigma**2)
        f2 = -2.0 / (FOUR_PI_SQ * sigma**3)
        e_i = minkowski_dot(frames_i, d[..., None, :])
        e_j = minkowski_dot(frames, d[..., None, :])
        metric = minkowski_dot(frames_i[..., :, None, :], frames[..., None, :, :])
        g += sign * (-1.0 / (FOUR_PI_SQ * sigma))
        d_i += sign * 2.0 * f1[..., None] * e_i
        d_j += sign * -2.0 * f1[..., None] * e_j
        dd += sign * (
            -4.0 * f2[..., None, None] * e_i[..., :, None] * e_j[..., None, :]
            - 2.0 * f1[..., None, None] * metric
        )
    if not kernel.state.is_vacuum:
        tail = 2.0 * special.polygamma(1, THERMAL_IMAGES + 1)
        g += tail / (FOUR_PI_SQ * kernel.state.beta**2)
    return 2.0 * np.real(g), 2.0 * np.real(d_i), 2.0 * np.real(d_j), 2.0 * np.real(dd)


# --- Stationary spectra ---


def stationary_reference(kernel: CorrelatorKernel, path: Path) -> AnalyticTrajectory:
    """Closed-form path whose pullback equals the given one at every lag."""
    if not is_stationary(path):
        raise NonStationaryTrajectory("Path is not stationary")
    if isinstance(path, Worldline):
        path = AnalyticTrajectory.from_state(path.state(0))
    if kernel.boost_invariant:
        return path.canonical()
    inertial = path.kind == "uniform-velocity" and kernel.mirror is None
    if path.kind == "static" or inertial:
        return path
    raise NonStationaryTrajectory(
        f"A {path.kind} path is not stationary with respect to this field state"
    )


def _contour_shift(
    kernel: CorrelatorKernel, path: AnalyticTrajectory, omega: float
) -> float:
    shift = 0.5 / abs(omega)
    if not kernel.state.is_vacuum:
        shift = min(shift, kernel.state.beta / 4.0)
    if path.kind == "uniform-acceleration":
        shift = min(shift, np.pi / (2.0 * path.proper_acceleration))
    return shift


def wightman_spectrum(
    kernel: CorrelatorKernel,
    path: Path,
    omega: float,
    *,
    window: float,
    limit: int = 400,
) -> tuple[float, float]:
    """Fourier transform ∫ ds e^{-iωs} G⁺(s) of a stationary 3+1 pullback.

    The free vacuum part -1/(4π²s²) is transformed in closed form, giving
    (|ω|/2π)θ(-ω). The remainder is integrated over |s| <= window along the
    contour s - iδ, with δ inside the analyticity strip of the state, which
    keeps light-cone singularities of mirror images off the real axis.

    Args:
        kernel: 3+1 kernel.
        path: Stationary path.
        omega: Frequency, nonzero.
        window: Half-width of the lag window.
        limit: Subinterval limit passed to the quadrature.

    Returns:
        tuple[float, float]: Transform value and absolute error estimate.

    Raises:
        NonStationaryTrajectory: If the pullback depends on more than the lag.
        QuadratureNotConverged: If the adaptive quadrature fails.
    """
    if kernel.state.dimension != 3:
        raise WrongVariant("Spectra are implemented for 3+1 fields")
    if omega == 0.0:
        raise ConfigurationError("Frequency must be nonzero")
    reference = stationary_reference(kernel, path)
    delta = _contour_shift(kernel, reference, omega)
    sharp = replace(kernel, eps=1e-12)

    @lru_cache(maxsize=None)
    def remainder(s: float) -> complex:
        w = s - 1j * delta
        x = reference.arrays(np.array([w / 2.0, -w / 2.0]))[0]
        with np.errstate(over="ignore", invalid="ignore"):
            g = complex(sharp.wightman(x[0], x[1]))
        if not np.isfinite(g):
            g = 0.0
        return g + 1.0 / (FOUR_PI_SQ * w**2)

    def plus(s: float) -> complex:
        return remainder(s) + remainder(-s)

    def minus(s: float) -> complex:
        return remainder(s) - remainder(-s)

    parts = (
        (lambda s: plus(s).real, "cos", 1.0, 0.0),
        (lambda s: minus(s).imag, "sin", 1.0, 0.0),
        (lambda s: plus(s).imag, "cos", 0.0, 1.0),
        (lambda s: minus(s).real, "sin", 0.0, -1.0),
    )
    value = 0.0 + 0.0j
    error = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for func, weight, re, im in parts:
            try:
                result, abserr = integrate.quad(
                    func, 0.0, window, weight=weight, wvar=omega, limit=limit
                )
            except integrate.IntegrationWarning as e:
                raise QuadratureNotConverged(
                    f"Spectrum quadrature at omega={omega}: {e}"
                ) from e
            value += complex(re, im) * result
            error += abserr
    scale = np.exp(-omega * delta)
    free = abs(omega) / (2.0 * np.pi) if omega < 0.0 else 0.0
    return float(free + scale * value.real), float(scale * error)
