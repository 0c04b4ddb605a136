"""Linear wavelet and multiwavelet density estimation."""
from .basis import BasisSpec, evaluate, evaluate_vector, local_evaluations, translate_range
from .bench import ExperimentConfig, ExperimentResult, best_per_density, run_benchmark
from .cascade import CascadeError, ScalingTable, cascade, orthonormality_residual
from .densities import ZOO, MixtureDensity, get_density, load_mixture
from .estimator import (
    CoefficientSet,
    DensityEstimate,
    NormalizationError,
    estimate,
    estimate_coefficients,
    normalize,
    reconstruct,
)
from .metrics import QuadratureGrid, ise, l2_distance
from .multifilter import (
    FilterError,
    Multifilter,
    balance_scalar_filter,
    list_filters,
    load_filter,
    orthogonality_residual,
)

__version__ = "0.1.0"
