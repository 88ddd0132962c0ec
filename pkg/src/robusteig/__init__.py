"""Robust distributed eigenspace estimation under arbitrary node corruptions.

A library plus simulation CLI: robust reference selection, Procrustes
alignment, adaptive spectral-filtering robust mean estimation, and a
synthetic distributed-PCA harness for studying breakdown behavior.
"""

__version__ = "0.1.0"

from .linalg import (
    OrthonormalFrame,
    SpectralDecomposition,
    SymmetricMatrix,
    eigengap_and_kappa,
    leading_eigenpair,
    pairwise_subspace_distances,
    polar_orthonormalize,
    procrustes_rotation,
    spectral_decomposition,
    subspace_dist,
    top_r_eigenframe,
)
from .reference import ReferenceResult, robust_reference
from .alignment import procrustes_fixing
from .filtering import (
    AdaptiveConfig,
    FilterConfig,
    FilterOutcome,
    MatrixSampleSet,
    ProxyMode,
    RemovalMode,
    Termination,
    adaptive_filter,
    empirical_covariance,
    empirical_mean,
    error_proxy,
    filter_samples,
)
from .pipeline import (
    EstimateReport,
    PipelineConfig,
    covariance_diagnostic,
    naive_estimate,
    procrustes_only_estimate,
    robust_estimate,
)
from .synthetic import (
    AdversaryKind,
    CorruptionSpec,
    SpectrumModel,
    WorldInstance,
    adversarial_frame,
    build_world,
    generate_responses,
    sample_local_covariance,
)
from .experiment import (
    ExperimentConfig,
    Method,
    OmegaRule,
    TrialRecord,
    run_experiment,
    write_csv,
    write_summary_json,
)

__all__ = [
    "__version__",
    "OrthonormalFrame",
    "SymmetricMatrix",
    "SpectralDecomposition",
    "subspace_dist",
    "pairwise_subspace_distances",
    "procrustes_rotation",
    "top_r_eigenframe",
    "leading_eigenpair",
    "eigengap_and_kappa",
    "polar_orthonormalize",
    "spectral_decomposition",
    "ReferenceResult",
    "robust_reference",
    "procrustes_fixing",
    "MatrixSampleSet",
    "FilterConfig",
    "AdaptiveConfig",
    "FilterOutcome",
    "RemovalMode",
    "ProxyMode",
    "Termination",
    "empirical_mean",
    "empirical_covariance",
    "filter_samples",
    "error_proxy",
    "adaptive_filter",
    "PipelineConfig",
    "EstimateReport",
    "robust_estimate",
    "naive_estimate",
    "procrustes_only_estimate",
    "covariance_diagnostic",
    "SpectrumModel",
    "CorruptionSpec",
    "AdversaryKind",
    "WorldInstance",
    "build_world",
    "sample_local_covariance",
    "adversarial_frame",
    "generate_responses",
    "ExperimentConfig",
    "TrialRecord",
    "Method",
    "OmegaRule",
    "run_experiment",
    "write_csv",
    "write_summary_json",
]
