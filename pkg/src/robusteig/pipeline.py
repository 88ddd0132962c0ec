"""End-to-end estimators: the robust pipeline and its two non-robust baselines.

The robust pipeline is reference selection -> Procrustes alignment ->
adaptive filtering; its raw output is a (generally non-orthonormal) mean
matrix, so the report carries both that matrix and its polar factor, which
is what distance-to-truth is measured on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import procrustes_fixing
from .filtering import (
    AdaptiveConfig,
    FilterConfig,
    FilterOutcome,
    MatrixSampleSet,
    ProxyMode,
    RemovalMode,
    adaptive_filter,
    empirical_covariance,
    empirical_mean,
)
from .linalg import (
    OrthonormalFrame,
    polar_orthonormalize,
    procrustes_factor,
    subspace_distances_from,
)
from .reference import ReferenceResult, robust_reference


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of the robust pipeline.

    ``omega`` is the lower end of the adaptive filter's search grid; the
    upper end defaults to 6, a generous constant bound on the aligned
    responses' covariance (frames have unit spectral norm).
    """

    alpha: float
    omega: float
    failure_prob: float = 0.01
    lambda_ub: float = 6.0
    removal_mode: RemovalMode = RemovalMode.RANDOMIZED_PROPORTIONAL
    proxy_mode: ProxyMode = ProxyMode.PAPER
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must be in [0, 0.5), got {self.alpha}")
        if not 0 < self.failure_prob < 1:
            raise ValueError(f"failure_prob must be in (0, 1), got {self.failure_prob}")
        if not 0 < self.omega <= self.lambda_ub:
            raise ValueError(
                f"need 0 < omega <= lambda_ub, got ({self.omega}, {self.lambda_ub})"
            )


@dataclass(frozen=True)
class EstimateReport:
    raw_mean: np.ndarray
    orthonormalized: OrthonormalFrame
    reference: ReferenceResult
    filter_outcome: FilterOutcome | None


def robust_estimate(
    responses: list[OrthonormalFrame],
    config: PipelineConfig,
    distances: np.ndarray | None = None,
) -> EstimateReport:
    """Reference selection, alignment, then adaptive robust averaging."""
    if len(responses) < 3:
        raise ValueError(f"need at least 3 responses, got {len(responses)}")
    reference = robust_reference(responses, distances)
    aligned = procrustes_fixing(responses, reference.frame)
    outcome = adaptive_filter(
        MatrixSampleSet.from_frames(aligned),
        AdaptiveConfig(
            lambda_lb=config.omega,
            lambda_ub=config.lambda_ub,
            failure_prob=config.failure_prob,
            alpha=config.alpha,
            m=len(responses),
            proxy_mode=config.proxy_mode,
        ),
        FilterConfig(
            lambda_ub=config.lambda_ub,
            removal_mode=config.removal_mode,
            rng_seed=config.rng_seed,
        ),
    )
    return EstimateReport(
        raw_mean=outcome.mean,
        orthonormalized=polar_orthonormalize(outcome.mean),
        reference=reference,
        filter_outcome=outcome,
    )


def naive_estimate(responses: list[OrthonormalFrame]) -> EstimateReport:
    """Align everything to the first response and average, no robustness."""
    if not responses:
        raise ValueError("need at least one response")
    first = responses[0]
    # radius reported for the record: the same majority-ball radius the
    # robust selector would assign to index 0
    row = subspace_distances_from(first, list(responses))
    row[0] = 0.0  # self-distance, exactly zero by convention
    radius = float(np.sort(row)[len(responses) // 2])
    reference = ReferenceResult(index=0, frame=first, radius=radius)
    aligned = procrustes_fixing(responses, first)
    mean = empirical_mean(MatrixSampleSet.from_frames(aligned))
    return EstimateReport(
        raw_mean=mean,
        orthonormalized=polar_orthonormalize(mean),
        reference=reference,
        filter_outcome=None,
    )


def procrustes_only_estimate(
    responses: list[OrthonormalFrame],
    distances: np.ndarray | None = None,
) -> EstimateReport:
    """Robust reference and alignment, but a plain mean instead of filtering."""
    if len(responses) < 3:
        raise ValueError(f"need at least 3 responses, got {len(responses)}")
    reference = robust_reference(responses, distances)
    aligned = procrustes_fixing(responses, reference.frame)
    mean = empirical_mean(MatrixSampleSet.from_frames(aligned))
    return EstimateReport(
        raw_mean=mean,
        orthonormalized=polar_orthonormalize(mean),
        reference=reference,
        filter_outcome=None,
    )


def covariance_diagnostic(
    responses: list[OrthonormalFrame],
    aligned: list[OrthonormalFrame],
    ground_truth: OrthonormalFrame,
    good_set,
) -> tuple[float, float]:
    """Covariance bound over the known-good responses (simulation only).

    Returns (lhs, rhs) where lhs is the spectral norm of the empirical
    covariance of the aligned good responses and rhs is the sum of the
    projector-average deviation and twice the aligned-mean deviation from
    the ground truth. The inequality lhs <= rhs holds for any orthonormal
    representative of the true subspace, but is informative when
    ``ground_truth`` is the representative aligned to the reference frame
    the alignment step used.
    """
    good = sorted(int(i) for i in good_set)
    if not good:
        raise ValueError("good set is empty")
    v = ground_truth.data
    d = v.shape[0]
    good_aligned = np.stack([aligned[i].data for i in good])
    mu = good_aligned.mean(axis=0)
    dev = good_aligned - mu
    flat = np.transpose(dev, (1, 0, 2)).reshape(d, -1)
    lhs = float(np.linalg.eigvalsh(flat @ flat.T / len(good))[-1])
    proj_avg = np.zeros((d, d))
    for i in good:
        u = responses[i].data
        proj_avg += u @ u.T
    proj_avg /= len(good)
    term1 = float(np.abs(np.linalg.eigvalsh(proj_avg - v @ v.T)).max())
    term2 = 2.0 * float(np.linalg.svd(mu - v, compute_uv=False)[0])
    return lhs, term1 + term2


def aligned_ground_truth(
    ground_truth: OrthonormalFrame, reference: OrthonormalFrame
) -> OrthonormalFrame:
    """Representative of the true subspace optimally aligned to a reference."""
    return ground_truth.rotate(procrustes_factor(ground_truth.data, reference.data))
