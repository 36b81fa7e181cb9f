"""Pydantic models."""

from typing import Annotated, Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictBool,
    StrictFloat,
    StrictInt,
    StrictStr,
    ValidationInfo,
    field_validator,
    model_validator,
)

from physics.ald import ExternalPotential, ParticleParams, SwitchProfile
from physics.geometry import AnalyticTrajectory
from physics.greens import FieldState, MirrorConfig


Vector3 = tuple[StrictFloat, StrictFloat, StrictFloat]

SCENARIO_NAMES = (
    "ald-causality",
    "ald-runaway",
    "uniform-acceleration-unruh",
    "fdr-check",
    "detector-response",
    "mirror-static",
    "mirror-moving",
    "custom",
)


class StrictModel(BaseModel):
    """Base model rejecting unknown keys."""

    model_config = ConfigDict(extra="forbid", frozen=True)


# --- Particle and dynamics ---


class ParticleConfig(StrictModel):
    """Bare particle parameters."""

    e: Annotated[StrictFloat, Field(description="Charge coupling to the scalar field.")]

    cutoff: Annotated[StrictFloat, Field(gt=0.0, description="UV cutoff Λ.")]

    kappa: Annotated[
        StrictFloat,
        Field(
            default=1.0,
            gt=0.0,
            description="Regulator constant κ in the mass shift κe²Λ/8π.",
        ),
    ]

    m0: Annotated[
        StrictFloat,
        Field(
            gt=0.0,
            description="Bare mass; must exceed κe²Λ/8π so no runaway mode exists.",
        ),
    ]

    r0: Annotated[
        StrictFloat | None,
        Field(
            default=None,
            gt=0.0,
            description="Classical-radius scale, defaults to e²/(4π m0).",
        ),
    ]

    @field_validator("m0")
    @classmethod
    def runaway_free(cls, m0: float, info: ValidationInfo) -> float:
        """Enforce m0 > κe²Λ/8π."""
        e, cutoff, kappa = (info.data.get(key) for key in ("e", "cutoff", "kappa"))
        if e is None or cutoff is None or kappa is None:
            return m0
        bound = kappa * e**2 * cutoff / (8.0 * np.pi)
        if m0 <= bound:
            raise ValueError(
                f"runaway-free condition m0 > κe²Λ/8π violated: {m0} <= {bound:.6g}"
            )
        return m0

    def to_params(self) -> ParticleParams:
        """Physics parameters."""
        return ParticleParams(
            m0=self.m0, e=self.e, cutoff=self.cutoff, kappa=self.kappa, r0=self.r0
        )


class SwitchConfig(StrictModel):
    """Dressing switch profile."""

    shape: Annotated[
        Literal["exponential", "smoothstep"], Field(default="exponential")
    ]

    tau_d: Annotated[
        StrictFloat | None,
        Field(default=None, gt=0.0, description="Dressing time, m0·r0/Λ by default."),
    ]

    def to_profile(self, params: ParticleParams) -> SwitchProfile:
        """Profile for the given particle."""
        return SwitchProfile.for_particle(params, shape=self.shape, tau_d=self.tau_d)


class PotentialConfig(StrictModel):
    """External potential."""

    variant: Literal["none", "linear", "harmonic", "linear-harmonic"]

    force: Annotated[
        Vector3,
        Field(
            default=(0.0, 0.0, 0.0),
            description="Rest-frame force F for linear variants.",
        ),
    ]

    k: Annotated[
        StrictFloat,
        Field(default=0.0, ge=0.0, description="Spring constant of harmonic variants."),
    ]

    center: Annotated[Vector3, Field(default=(0.0, 0.0, 0.0))]

    axes: Annotated[
        list[Literal[1, 2, 3]],
        Field(default=[1, 2, 3], min_length=1, description="Confined axes."),
    ]

    onset: Annotated[
        StrictFloat,
        Field(default=0.0, ge=0.0, description="Proper time the force switches on."),
    ]

    def to_potential(self) -> ExternalPotential:
        """Physics potential."""
        return ExternalPotential(
            variant=self.variant,
            force=np.array([0.0, *self.force]),
            k=self.k,
            center=np.array([0.0, *self.center]),
            axes=tuple(self.axes),
            onset=self.onset,
        )


class IntegratorConfig(StrictModel):
    """Mean-worldline integrator settings."""

    mode: Annotated[
        Literal["order-reduced", "naive-third-order"], Field(default="order-reduced")
    ]

    dt: Annotated[StrictFloat, Field(default=1e-3, gt=0.0)]

    tau_max: Annotated[StrictFloat, Field(default=10.0, gt=0.0)]

    initial_position: Annotated[Vector3, Field(default=(0.0, 0.0, 0.0))]

    initial_velocity: Annotated[
        Vector3,
        Field(default=(0.0, 0.0, 0.0), description="Initial three-velocity."),
    ]

    initial_acceleration: Annotated[
        Vector3,
        Field(
            default=(0.0, 0.0, 0.0),
            description="Initial spatial acceleration, naive mode only.",
        ),
    ]

    sweeps: Annotated[StrictInt, Field(default=2, ge=1)]

    naive_g: Annotated[
        StrictFloat | None,
        Field(
            default=1.0,
            description="Constant naive-mode switch value; null follows the profile.",
        ),
    ]

    @field_validator("initial_velocity")
    @classmethod
    def subluminal(
        cls, velocity: tuple[float, float, float]
    ) -> tuple[float, float, float]:
        """Reject |v| >= 1."""
        if sum(v * v for v in velocity) >= 1.0:
            raise ValueError("initial three-velocity must satisfy |v| < 1")
        return velocity

    def initial_four_velocity(self) -> np.ndarray:
        """γ(1, v)."""
        v = np.asarray(self.initial_velocity)
        return np.array([1.0, *v]) / np.sqrt(1.0 - v @ v)


# --- Field, trajectories and mirrors ---


class FieldConfig(StrictModel):
    """Field state."""

    dimension: Annotated[
        Literal[1, 3],
        Field(default=3, description="Number of spatial dimensions."),
    ]

    temperature: Annotated[
        StrictFloat | None,
        Field(default=None, gt=0.0, description="Null for vacuum."),
    ]

    ir_scale: Annotated[
        StrictFloat,
        Field(default=1.0, gt=0.0, description="IR length scale of 1+1 logarithms."),
    ]

    def to_state(self) -> FieldState:
        """Physics field state."""
        return FieldState(
            dimension=self.dimension,
            temperature=self.temperature,
            ir_scale=self.ir_scale,
        )


class TrajectoryConfig(StrictModel):
    """Prescribed stationary trajectory."""

    kind: Literal["static", "uniform-velocity", "uniform-acceleration"]

    acceleration: Annotated[
        StrictFloat | None,
        Field(default=None, gt=0.0, description="Proper acceleration a."),
    ]

    axis: Annotated[Literal[1, 2, 3], Field(default=1)]

    velocity: Annotated[Vector3, Field(default=(0.0, 0.0, 0.0))]

    position: Annotated[Vector3, Field(default=(0.0, 0.0, 0.0))]

    @model_validator(mode="after")
    def complete(self) -> "TrajectoryConfig":
        """Uniform acceleration needs a."""
        if self.kind == "uniform-acceleration" and self.acceleration is None:
            raise ValueError("uniform-acceleration trajectories need 'acceleration'")
        return self

    def to_trajectory(self) -> AnalyticTrajectory:
        """Closed-form trajectory."""
        if self.kind == "static":
            return AnalyticTrajectory.static(self.position)
        if self.kind == "uniform-velocity":
            return AnalyticTrajectory.uniform_velocity(self.velocity, self.position)
        return AnalyticTrajectory.uniform_acceleration(
            self.acceleration, axis=self.axis, position=self.position
        )


class MirrorSettings(StrictModel):
    """Dirichlet mirror."""

    variant: Literal["static-plane-3p1", "static-point-1p1", "moving-point-1p1"]

    offset: Annotated[StrictFloat, Field(default=0.0)]

    normal: Annotated[Vector3, Field(default=(0.0, 0.0, 1.0))]

    motion: Annotated[
        Literal["uniform", "oscillating"] | None,
        Field(default=None, description="Trajectory family of a moving mirror."),
    ]

    speed: Annotated[StrictFloat, Field(default=0.0, gt=-1.0, lt=1.0)]

    amplitude: Annotated[StrictFloat, Field(default=0.0, ge=0.0)]

    frequency: Annotated[StrictFloat, Field(default=0.0, ge=0.0)]

    @model_validator(mode="after")
    def complete(self) -> "MirrorSettings":
        """Moving mirrors need a subluminal motion."""
        if self.variant == "moving-point-1p1":
            if self.motion is None:
                raise ValueError("moving-point-1p1 mirrors need 'motion'")
            if self.motion == "oscillating" and self.amplitude * self.frequency >= 1.0:
                raise ValueError(
                    "oscillating mirror speed amplitude·frequency must be < 1"
                )
        return self

    def to_mirror(self) -> MirrorConfig:
        """Physics mirror."""
        if self.variant != "moving-point-1p1":
            return MirrorConfig(
                variant=self.variant, offset=self.offset, normal=self.normal
            )
        x0, v, a, w = self.offset, self.speed, self.amplitude, self.frequency
        if self.motion == "uniform":
            trajectory = lambda t: x0 + v * t  # noqa: E731
            derivatives = (lambda t: v, lambda t: 0.0, lambda t: 0.0)
        else:
            trajectory = lambda t: x0 + a * np.sin(w * t)  # noqa: E731
            derivatives = (
                lambda t: a * w * np.cos(w * t),
                lambda t: -a * w**2 * np.sin(w * t),
                lambda t: -a * w**3 * np.cos(w * t),
            )
        return MirrorConfig(
            variant=self.variant,
            offset=x0,
            trajectory=trajectory,
            derivatives=derivatives,
        )


# --- Noise, ensembles and spectra ---


class NoiseConfig(StrictModel):
    """Noise sampling settings."""

    n_tau: Annotated[StrictInt, Field(default=256, ge=2, description="Grid points.")]

    dt: Annotated[
        StrictFloat, Field(default=0.05, gt=0.0, description="Grid spacing.")
    ]

    eps_factor: Annotated[
        StrictFloat,
        Field(default=0.1, ge=0.1, description="Regulator ε in units of dt."),
    ]

    hbar: Annotated[
        StrictFloat,
        Field(default=1.0, gt=0.0, description="Scale of the noise correlator."),
    ]

    bracket_weight: Annotated[
        StrictFloat,
        Field(default=0.5, gt=0.0, description="Antisymmetrization weight."),
    ]

    method: Annotated[
        Literal["analytic", "finite-difference"], Field(default="analytic")
    ]

    psd_n_tau: Annotated[
        StrictInt | None,
        Field(
            default=None,
            ge=2,
            description="Grid points of the χ spectrum check; defaults to n_tau.",
        ),
    ]

    psd_dt: Annotated[
        StrictFloat | None,
        Field(
            default=None,
            gt=0.0,
            description="Grid spacing of the χ spectrum check; defaults to dt.",
        ),
    ]

    @property
    def eps(self) -> float:
        """Regulator ε."""
        return self.eps_factor * self.dt


class EnsembleConfig(StrictModel):
    """Ensemble settings."""

    n: Annotated[StrictInt, Field(default=100, ge=2)]

    base_seed: Annotated[
        StrictInt | None,
        Field(
            default=None,
            ge=0,
            description="Overrides the scenario base seed for the ensemble.",
        ),
    ]

    stats_start: Annotated[
        StrictFloat,
        Field(
            default=5.0,
            ge=0.0,
            description="Statistics window start in units of τ_d.",
        ),
    ]

    running_mass: Annotated[StrictBool, Field(default=True)]

    switch_tensors: Annotated[StrictBool, Field(default=True)]

    hessian_sign: Annotated[
        Literal["linearized", "literal"], Field(default="linearized")
    ]


class FDRConfig(StrictModel):
    """Frequency grid of the fluctuation-dissipation check."""

    omegas: Annotated[
        list[StrictFloat],
        Field(min_length=1, description="Positive frequencies."),
    ]

    window_periods: Annotated[StrictFloat, Field(default=200.0, gt=1.0)]


class DetectorSettings(StrictModel):
    """Detector settings."""

    omega: Annotated[
        StrictFloat,
        Field(description="Gap Ω; negative values give de-excitation."),
    ]

    coupling: Annotated[Literal["monopole", "minimal"], Field(default="monopole")]

    e: Annotated[StrictFloat, Field(default=1.0)]

    window: Annotated[
        StrictFloat | None,
        Field(default=None, gt=0.0, description="T_obs, defaults to 200/|Ω|."),
    ]

    distances: Annotated[
        list[StrictFloat] | None,
        Field(default=None, description="Distances from a plane mirror to scan."),
    ]

    @field_validator("omega")
    @classmethod
    def nonzero(cls, omega: float) -> float:
        """Ω must be nonzero."""
        if omega == 0.0:
            raise ValueError("detector gap must be nonzero")
        return omega


class MirrorScan(StrictModel):
    """Grid of the mirror checks."""

    u_min: Annotated[StrictFloat, Field(default=-5.0)]

    u_max: Annotated[StrictFloat, Field(default=5.0)]

    points: Annotated[StrictInt, Field(default=41, ge=2)]

    eps: Annotated[StrictFloat, Field(default=1e-3, gt=0.0)]


# --- Scenario ---


REQUIRED_SECTIONS = {
    "ald-causality": ("particle", "potential"),
    "ald-runaway": ("particle",),
    "uniform-acceleration-unruh": ("particle", "trajectory", "potential"),
    "fdr-check": ("trajectory", "fdr"),
    "detector-response": ("trajectory", "detector"),
    "mirror-static": ("mirror",),
    "mirror-moving": ("mirror",),
    "custom": ("particle",),
}


class ScenarioConfig(StrictModel):
    """Complete scenario file."""

    scenario: Literal[SCENARIO_NAMES]

    output_dir: Annotated[StrictStr, Field(default="output")]

    base_seed: Annotated[StrictInt, Field(default=0, ge=0)]

    particle: ParticleConfig | None = None

    switch: SwitchConfig = Field(default_factory=SwitchConfig)

    potential: PotentialConfig | None = None

    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)

    field: FieldConfig = Field(default_factory=FieldConfig)

    trajectory: TrajectoryConfig | None = None

    noise: NoiseConfig = Field(default_factory=NoiseConfig)

    ensemble: EnsembleConfig = Field(default_factory=EnsembleConfig)

    fdr: FDRConfig | None = None

    detector: DetectorSettings | None = None

    mirror: MirrorSettings | None = None

    scan: MirrorScan = Field(default_factory=MirrorScan)

    @model_validator(mode="after")
    def sections_present(self) -> "ScenarioConfig":
        """Each scenario names the sections it needs."""
        missing = [
            name
            for name in REQUIRED_SECTIONS[self.scenario]
            if getattr(self, name) is None
        ]
        if missing:
            raise ValueError(
                f"scenario '{self.scenario}' requires section(s): {', '.join(missing)}"
            )
        return self


# --- Outputs ---


class RunManifest(BaseModel):
    """Record of one scenario run."""

    scenario: StrictStr
    config_hash: Annotated[
        StrictStr, Field(description="SHA-256 of the canonical config JSON.")
    ]
    seed: StrictInt
    versions: Annotated[
        dict[str, str],
        Field(description="Versions of the simulator and numerical libraries."),
    ]
    files: Annotated[
        dict[str, str], Field(description="Output file name to SHA-256 checksum.")
    ]
    results: Annotated[
        dict[str, float | None],
        Field(default_factory=dict, description="Scalar results."),
    ]


class ScenarioInfo(BaseModel):
    """Catalog entry of a built-in scenario."""

    name: StrictStr
    description: StrictStr
    equations: Annotated[
        StrictStr,
        Field(description="Equations of motion or kernels the scenario exercises."),
    ]
    required_keys: list[StrictStr]
    example: Annotated[StrictStr, Field(description="Example configuration in TOML.")]
