"""Built-in scenario catalog with example configurations."""

from models import ScenarioInfo


ALD_CAUSALITY = """\
scenario = "ald-causality"
output_dir = "output/ald-causality"

[particle]
e = 0.3
cutoff = 10.0
kappa = 1.0
m0 = 1.0

[switch]
shape = "exponential"
tau_d = 0.1

[potential]
variant = "linear"
force = [0.5, 0.0, 0.0]
onset = 1.0

[integrator]
mode = "order-reduced"
dt = 1e-3
tau_max = 3.0
"""

ALD_RUNAWAY = """\
scenario = "ald-runaway"
output_dir = "output/ald-runaway"

[particle]
e = 0.31622776601683794
cutoff = 1e-6
m0 = 1.0

[integrator]
mode = "naive-third-order"
dt = 1e-3
tau_max = 1.0
initial_acceleration = [1e-6, 0.0, 0.0]
"""

UNIFORM_ACCELERATION_UNRUH = """\
scenario = "uniform-acceleration-unruh"
output_dir = "output/uniform-acceleration-unruh"
base_seed = 7

[particle]
e = 1.0
cutoff = 1.0
m0 = 1.0

[trajectory]
kind = "uniform-acceleration"
acceleration = 1.0

[potential]
variant = "linear-harmonic"
force = [0.96, 0.0, 0.0]
k = 24.0
axes = [2, 3]

[integrator]
dt = 1e-3
tau_max = 2.0

[noise]
n_tau = 256
dt = 0.05
eps_factor = 2.0
psd_n_tau = 512
psd_dt = 0.08

[ensemble]
n = 100
stats_start = 5.0

[fdr]
omegas = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]
"""

FDR_CHECK = """\
scenario = "fdr-check"
output_dir = "output/fdr-check"

[trajectory]
kind = "uniform-acceleration"
acceleration = 1.0

[fdr]
omegas = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]
"""

DETECTOR_RESPONSE = """\
scenario = "detector-response"
output_dir = "output/detector-response"

[trajectory]
kind = "uniform-acceleration"
acceleration = 6.283185307179586

[detector]
omega = 1.0
coupling = "monopole"
"""

MIRROR_STATIC = """\
scenario = "mirror-static"
output_dir = "output/mirror-static"

[field]
temperature = 0.5

[mirror]
variant = "static-plane-3p1"
offset = 0.0
normal = [0.0, 0.0, 1.0]

[detector]
omega = 1.0
distances = [0.1, 0.25, 0.5, 0.785398163397448, 1.0, 1.5, 2.0, 3.0]
"""

MIRROR_MOVING = """\
scenario = "mirror-moving"
output_dir = "output/mirror-moving"

[field]
dimension = 1

[mirror]
variant = "moving-point-1p1"
motion = "oscillating"
amplitude = 0.1
frequency = 1.0

[scan]
u_min = -5.0
u_max = 5.0
points = 41
"""

CATALOG = [
    ScenarioInfo(
        name="ald-causality",
        description=(
            "Dressed ALD mean worldline with a force switched on late; "
            "reports the preacceleration measure."
        ),
        equations=(
            "Time-dependent ALD equation m(τ)ẍ = f + e²g(τ)(ẋẍ² + x⃛) "
            "with order reduction."
        ),
        required_keys=[
            "particle.e",
            "particle.cutoff",
            "particle.m0",
            "potential.variant",
        ],
        example=ALD_CAUSALITY,
    ),
    ScenarioInfo(
        name="ald-runaway",
        description=(
            "Third-order ALD equation integrated naively; "
            "fits the runaway growth rate m(τ)/(e²g)."
        ),
        equations="Undressed ALD equation mẍ = e²(ẋẍ² + x⃛).",
        required_keys=["particle.e", "particle.cutoff", "particle.m0"],
        example=ALD_RUNAWAY,
    ),
    ScenarioInfo(
        name="uniform-acceleration-unruh",
        description=(
            "Mean hyperbolic worldline, colored noise, ALD-Langevin ensemble "
            "and Unruh temperature fits."
        ),
        equations=(
            "ALD mean equation, covariant noise η built from χ and ∂χ, "
            "Hadamard noise correlator, linear ALD-Langevin equation."
        ),
        required_keys=["particle.*", "trajectory.acceleration", "potential.variant"],
        example=UNIFORM_ACCELERATION_UNRUH,
    ),
    ScenarioInfo(
        name="fdr-check",
        description=(
            "Noise-to-dissipation spectral ratio on a stationary path "
            "fitted to coth(ω/2T)."
        ),
        equations=(
            "Hadamard and commutator functions of the pulled-back Wightman function."
        ),
        required_keys=["trajectory.kind", "fdr.omegas"],
        example=FDR_CHECK,
    ),
    ScenarioInfo(
        name="detector-response",
        description=(
            "Transition rate of an oscillator detector on a stationary trajectory."
        ),
        equations=(
            "Monopole (or derivative) coupling e∫dτ j[Q(τ)]φ(x(τ)); "
            "rate from the Wightman transform."
        ),
        required_keys=["trajectory.kind", "detector.omega"],
        example=DETECTOR_RESPONSE,
    ),
    ScenarioInfo(
        name="mirror-static",
        description=(
            "Dirichlet image-method correlators and detector rates "
            "versus distance from a plane mirror."
        ),
        equations=(
            "Constrained field G^c(y, y') = G(y, y') - G(y, ŷ') "
            "realizing φ = 0 on the mirror."
        ),
        required_keys=["mirror.variant"],
        example=MIRROR_STATIC,
    ),
    ScenarioInfo(
        name="mirror-moving",
        description=(
            "Ray map, constrained correlator and radiated flux "
            "of a moving mirror in 1+1 dimensions."
        ),
        equations="Moving-mirror ray map p(u) and flux -(1/24π){p, u}.",
        required_keys=["mirror.variant", "mirror.motion"],
        example=MIRROR_MOVING,
    ),
]
