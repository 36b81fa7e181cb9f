"""Colored quantum noise along a worldline.

The stochastic field χ and its frame gradient ∂_(a)χ = e_(a)^μ ∂_μχ are
sampled jointly as one Gaussian vector whose covariance is the Hadamard
function and its derivatives at pairs of worldline points. Gradients are
expressed in the comoving tetrad e_(a) (e_(0) = u), which keeps entries
bounded along strongly boosted paths.

Covariance layout: index ``alpha * n + i`` holds component ``alpha`` at grid
point ``i``, with alpha = 0 for χ and alpha = 1 + a for ∂_(a)χ.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
import pandas as pd
from scipy import fft, linalg, signal

from physics.errors import (
    BadRegulator,
    ConfigurationError,
    GridMismatch,
    NonStationaryTrajectory,
    NotPSD,
    TooFewMembers,
    WrongVariant,
)
from physics.geometry import Path, comoving_tetrad, is_stationary
from physics.greens import CorrelatorKernel, frame_moments, stationary_reference


logger = logging.getLogger(__name__)

JITTER_START = 1e-10
JITTER_MAX = 1e-6
MIN_PSD_MEMBERS = 100
PSD_BAND_BINS = 3
NOISE_COLUMNS = [
    "tau",
    "chi",
    "dchi_t0",
    "dchi_t1",
    "dchi_t2",
    "dchi_t3",
    "eta0",
    "eta1",
    "eta2",
    "eta3",
]


@dataclass(frozen=True)
class NoiseGrid:
    """Uniform proper-time grid on a base path."""

    tau: np.ndarray
    worldline: Path

    def __post_init__(self) -> None:
        """Require at least two uniformly spaced, increasing points."""
        tau = np.asarray(self.tau, dtype=float)
        if tau.ndim != 1 or tau.size < 2:
            raise GridMismatch(f"Noise grid needs at least 2 points, got {tau.size}")
        steps = np.diff(tau)
        if steps[0] <= 0.0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise GridMismatch("Noise grid must be uniform and increasing")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def uniform(
        cls, worldline: Path, *, n: int, dt: float, start: float = 0.0
    ) -> "NoiseGrid":
        """``n`` points spaced by ``dt`` from ``start``."""
        return cls(tau=start + dt * np.arange(n), worldline=worldline)

    @property
    def n(self) -> int:
        """Number of grid points."""
        return self.tau.size

    @property
    def dt(self) -> float:
        """Grid spacing."""
        return float(self.tau[1] - self.tau[0])

    @cached_property
    def frames(self) -> np.ndarray:
        """Comoving tetrads at the grid points, shape (n, 4, 4)."""
        _, u, acc, _ = self.worldline.arrays(self.tau)
        return comoving_tetrad(u, acc)


@dataclass(frozen=True)
class NoiseCovariance:
    """Assembled covariance and its lower Cholesky factor."""

    grid: NoiseGrid
    matrix: np.ndarray
    factor: np.ndarray
    jitter: float
    gradient: bool = True
    method: Literal["analytic", "finite-difference"] = "analytic"
    fd_step: float = 0.0

    @property
    def chi_block(self) -> np.ndarray:
        """Covariance of χ alone."""
        n = self.grid.n
        return self.matrix[:n, :n]


@dataclass(frozen=True)
class NoiseRealization:
    """One joint sample of χ and its frame gradient on a grid."""

    tau: np.ndarray
    chi: np.ndarray
    dchi: np.ndarray | None
    seed: int

    def to_frame(self, eta: np.ndarray | None = None) -> pd.DataFrame:
        """Tabulate as ``tau,chi,dchi_t0..3,eta0..3``.

        Gradients are tetrad components and η is lab-frame; NaN when missing.
        """
        n = self.tau.size
        dchi = self.dchi if self.dchi is not None else np.full((n, 4), np.nan)
        eta = eta if eta is not None else np.full((n, 4), np.nan)
        data = np.column_stack([self.tau, self.chi, dchi, eta])
        return pd.DataFrame(data, columns=NOISE_COLUMNS)


# --- Covariance assembly ---


def _moment_block(
    kernel: CorrelatorKernel,
    y: np.ndarray,
    y2: np.ndarray,
    frames_i: np.ndarray,
    frames_j: np.ndarray,
) -> np.ndarray:
    """5x5 moment matrices (χ, ∂_(0..3)χ) for each point pair, shape (P, 5, 5)."""
    g, d_i, d_j, dd = frame_moments(kernel, y, y2, frames_i, frames_j)
    block = np.empty(g.shape + (5, 5))
    block[..., 0, 0] = g
    block[..., 1:, 0] = d_i
    block[..., 0, 1:] = d_j
    block[..., 1:, 1:] = dd
    return block


def _stationary_blocks(kernel: CorrelatorKernel, grid: NoiseGrid) -> np.ndarray | None:
    """Lag-indexed blocks on the closed-form reference path, None if not stationary."""
    if not is_stationary(grid.worldline):
        return None
    try:
        reference = stationary_reference(kernel, grid.worldline)
    except NonStationaryTrajectory:
        return None
    lags = grid.dt * np.arange(-(grid.n - 1), grid.n)
    x_plus, u_plus, a_plus, _ = reference.arrays(lags / 2.0)
    x_minus, u_minus, a_minus, _ = reference.arrays(-lags / 2.0)
    frames_plus = comoving_tetrad(u_plus, a_plus)
    frames_minus = comoving_tetrad(u_minus, a_minus)
    return _moment_block(kernel, x_plus, x_minus, frames_plus, frames_minus)


def _pairwise_blocks(
    kernel: CorrelatorKernel, grid: NoiseGrid, threads: int
) -> np.ndarray:
    """Blocks for every (i, j) pair, computed row by row. Shape (n, n, 5, 5)."""
    x = grid.worldline.arrays(grid.tau)[0]
    frames = grid.frames

    def row(i: int) -> np.ndarray:
        y = np.broadcast_to(x[i], x.shape)
        frames_i = np.broadcast_to(frames[i], frames.shape)
        return _moment_block(kernel, y, x, frames_i, frames)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        rows = list(pool.map(row, range(grid.n)))
    return np.stack(rows)


def _factorize(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Cholesky factor with escalating diagonal jitter."""
    scale = float(np.max(np.diag(matrix)))
    ratio = JITTER_START
    while ratio <= JITTER_MAX * (1.0 + 1e-9):
        jitter = ratio * scale
        try:
            shifted = matrix + jitter * np.eye(matrix.shape[0])
            factor = linalg.cholesky(shifted, lower=True)
            return factor, jitter
        except linalg.LinAlgError:
            logger.warning(
                f"Cholesky failed with jitter {ratio:.0e} x max diag; escalating"
            )
            ratio *= 10.0
    raise NotPSD(
        "Covariance is not positive semidefinite "
        f"even with jitter {JITTER_MAX:.0e} x max diag"
    )


def _finite_difference_matrix(
    kernel: CorrelatorKernel, grid: NoiseGrid, step: float
) -> np.ndarray:
    """Hadamard covariance over the 9-point stencil x ± h e_(a) at every grid point."""
    x = grid.worldline.arrays(grid.tau)[0]
    frames = grid.frames
    points = [x]
    for a in range(4):
        points.append(x + step * frames[:, a, :])
        points.append(x - step * frames[:, a, :])
    stencil = np.concatenate(points)
    return kernel.hadamard(stencil[:, None, :], stencil[None, :, :])


def build_covariance(
    grid: NoiseGrid,
    kernel: CorrelatorKernel,
    *,
    hbar: float = 1.0,
    gradient: bool = True,
    method: Literal["analytic", "finite-difference"] = "analytic",
    fd_step: float | None = None,
    threads: int = 1,
) -> NoiseCovariance:
    """Assemble and factorize the noise covariance on a grid.

    Stationary paths reuse one row of lag-dependent blocks (Toeplitz form)
    evaluated on the closed-form reference path; other paths evaluate every
    pair in the lab frame. The finite-difference method samples χ on a
    stencil around each point instead of using derivative kernels; it works
    for any kernel, including 1+1 and moving mirrors.

    Args:
        grid: Proper-time grid and path.
        kernel: Hadamard kernel.
        hbar: Overall scale of the correlator.
        gradient: Include the gradient blocks; False gives a χ-only covariance.
        method: ``analytic`` derivative kernels or ``finite-difference``.
        fd_step: Stencil step, defaults to the regulator.
        threads: Worker threads for row-wise assembly.

    Returns:
        NoiseCovariance: Symmetric matrix, factor and the jitter used.

    Raises:
        WrongVariant: If the kernel is not a Hadamard kernel.
        BadRegulator: If the regulator is below dt/10.
        NotPSD: If factorization fails at the largest jitter.
    """
    if kernel.kind != "hadamard":
        raise WrongVariant(
            f"Noise covariance needs a hadamard kernel, got '{kernel.kind}'"
        )
    if kernel.eps < grid.dt / 10.0 * (1.0 - 1e-12):
        raise BadRegulator(f"Regulator {kernel.eps} is below dt/10 = {grid.dt / 10.0}")
    if hbar <= 0.0:
        raise ConfigurationError(f"hbar scale must be positive, got {hbar}")
    n = grid.n

    if method == "finite-difference":
        step = kernel.eps if fd_step is None else fd_step
        matrix = hbar * _finite_difference_matrix(kernel, grid, step)
        if not gradient:
            matrix = matrix[:n, :n]
    else:
        step = 0.0
        lagged = _stationary_blocks(kernel, grid)
        if lagged is not None:
            index = np.subtract.outer(np.arange(n), np.arange(n)) + n - 1
            blocks = lagged[index]
            logger.info(f"Assembling stationary covariance from {lagged.shape[0]} lags")
        else:
            blocks = _pairwise_blocks(kernel, grid, threads)
            logger.info(f"Assembling covariance from {n * n} point pairs")
        if not gradient:
            blocks = blocks[..., :1, :1]
        size = blocks.shape[-1]
        matrix = hbar * blocks.transpose(2, 0, 3, 1).reshape(size * n, size * n)

    matrix = 0.5 * (matrix + matrix.T)
    factor, jitter = _factorize(matrix)
    return NoiseCovariance(
        grid=grid,
        matrix=matrix,
        factor=factor,
        jitter=jitter,
        gradient=gradient,
        method=method,
        fd_step=step,
    )


# --- Sampling ---


def noise_generator(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed``."""
    if seed < 0:
        raise ConfigurationError(f"Seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


def sample_noise(cov: NoiseCovariance, seed: int) -> NoiseRealization:
    """Draw one zero-mean realization ``factor @ ξ`` with ξ standard normal.

    Args:
        cov: Factorized covariance.
        seed: Philox key.

    Returns:
        NoiseRealization: Bit-identical for the same (cov, seed).
    """
    xi = noise_generator(seed).standard_normal(cov.factor.shape[0])
    values = cov.factor @ xi
    n = cov.grid.n
    chi = values[:n]
    dchi = None
    if cov.gradient:
        if cov.method == "finite-difference":
            stencil = values.reshape(9, n)
            dchi = ((stencil[1::2] - stencil[2::2]) / (2.0 * cov.fd_step)).T
        else:
            dchi = values[n:].reshape(4, n).T
    return NoiseRealization(tau=cov.grid.tau.copy(), chi=chi, dchi=dchi, seed=seed)


def assemble_eta(
    worldline: Path,
    realization: NoiseRealization,
    *,
    e: float,
    weight: float = 0.5,
) -> np.ndarray:
    """Covariant noise η^μ = e[ẍ^μ χ + w(∂^μχ - u^μ(u·∂χ))].

    In the comoving tetrad the bracket is -Σ_k e_(k)^μ ∂_(k)χ, so η is
    orthogonal to u by construction.

    Args:
        worldline: Path the realization was sampled on.
        realization: Sample with gradient data.
        e: Charge.
        weight: Antisymmetrization weight w.

    Returns:
        np.ndarray: Noise four-vectors, shape (n, 4).

    Raises:
        GridMismatch: If the realization has no gradient or lies off the path's range.
    """
    if realization.dchi is None:
        raise GridMismatch("Realization carries no gradient samples")
    try:
        _, u, acc, _ = worldline.arrays(realization.tau)
    except ConfigurationError as e_:
        raise GridMismatch(f"Realization grid does not fit the worldline: {e_}") from e_
    frames = comoving_tetrad(u, acc)
    transverse = np.einsum("nk,nkm->nm", realization.dchi[:, 1:], frames[:, 1:, :])
    return e * (acc * realization.chi[:, None] - weight * transverse)


# --- Spectra ---


def band_nperseg(
    n: int, dt: float, low: float, high: float, *, bins: int = PSD_BAND_BINS
) -> int:
    """Shortest power-of-two Welch segment with ``bins`` frequencies in [low, high].

    Args:
        n: Samples per member.
        dt: Grid spacing.
        low: Lower angular frequency of the band.
        high: Upper angular frequency of the band.
        bins: Required number of Welch bins inside the band.

    Returns:
        int: Segment length, at most ``n``.

    Raises:
        GridMismatch: If a single segment of length ``n`` still under-resolves it.
    """
    nperseg = 8
    while True:
        nperseg = min(nperseg, n)
        omega = 2.0 * np.pi * fft.rfftfreq(nperseg, dt)
        inside = int(np.count_nonzero((omega >= low) & (omega <= high)))
        if inside >= bins:
            return nperseg
        if nperseg == n:
            raise GridMismatch(
                f"Band [{low:g}, {high:g}] holds {inside} Welch bins "
                f"with n={n}, dt={dt:g}; "
                f"need {bins}, lengthen the grid"
            )
        nperseg *= 2


def noise_psd(
    ensemble: np.ndarray,
    dt: float,
    *,
    component: int | None = None,
    nperseg: int | None = None,
) -> pd.DataFrame:
    """Ensemble-averaged Welch spectrum of a noise component.

    Args:
        ensemble: Samples of shape (members, n) or (members, n, 4).
        dt: Grid spacing.
        component: Four-vector component for 3-D input.
        nperseg: Welch segment length, defaults to n/4.

    Returns:
        pd.DataFrame: Columns ``omega`` (angular frequency) and ``value``.

    Raises:
        TooFewMembers: With fewer than 100 members.
    """
    ensemble = np.asarray(ensemble, dtype=float)
    if ensemble.ndim == 3:
        if component is None:
            raise ConfigurationError("Select a component for four-vector noise")
        ensemble = ensemble[..., component]
    if ensemble.shape[0] < MIN_PSD_MEMBERS:
        raise TooFewMembers(
            f"Need at least {MIN_PSD_MEMBERS} members, got {ensemble.shape[0]}"
        )
    n = ensemble.shape[1]
    frequencies, power = signal.welch(
        ensemble,
        fs=1.0 / dt,
        nperseg=nperseg or max(n // 4, 8),
        detrend=False,
        axis=-1,
    )
    return pd.DataFrame(
        {"omega": 2.0 * np.pi * frequencies, "value": power.mean(axis=0)}
    )


def psd_ratio(spectrum: pd.DataFrame, baseline: pd.DataFrame) -> pd.DataFrame:
    """Pointwise ratio of two spectra on the same frequency grid."""
    if not np.allclose(spectrum["omega"], baseline["omega"]):
        raise GridMismatch("Spectra live on different frequency grids")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = spectrum["value"] / baseline["value"]
        return pd.DataFrame({"omega": spectrum["omega"], "value": ratio})
