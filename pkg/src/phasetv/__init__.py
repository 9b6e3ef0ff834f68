"""Total-variation denoising of wrapped phase maps with a unit-circle coupling term."""

from .energy import (
    DominanceCertificate,
    EnergyBreakdown,
    ModelParams,
    check_diagonal_dominance,
    evaluate,
    gradient,
)
from .grid import GradMagnitudes, curvature, grad_magnitudes, sample_with_neumann
from .phase import (
    PhasePair,
    UndefinedPhaseError,
    decompose,
    normalize,
    pythagorean_deviation,
    reconstruct,
    wrap,
)
from .solvers import (
    DivergenceError,
    SolveConfig,
    SolveReport,
    fixed_point_denoise,
    gradient_descent_denoise,
    strobel_denoise,
)
from .synth import (
    MetricsRecord,
    NoiseSpec,
    SceneSpec,
    add_noise,
    compute_metrics,
    generate_scene,
)

__version__ = "0.1.0"
