"""Robust mean estimation for matrix-valued samples.

The core primitive is an iterative spectral filter: while the top eigenvalue
of the empirical covariance of the active samples exceeds 18 times a given
bound, one sample is removed according to its outlier score (the squared
projection of its deviation onto the top eigenvector), and the loop repeats.
An adaptive wrapper searches a dyadic grid of candidate bounds from above
and returns the estimate at the smallest bound still consistent with all
larger ones, consistency being measured against an error proxy.

RNG contract (relied on by the vector-specialized test oracle): a filter run
creates one ``numpy.random.default_rng(rng_seed)`` generator; in randomized
removal mode each removal step makes exactly one ``rng.choice(k, p=...)``
call over the currently active samples in ascending index order. The
adaptive wrapper derives the per-grid-point seed with
``seeding.substream_seed(rng_seed, j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .linalg import SymmetricMatrix, leading_eigenpair
from .seeding import substream_seed


class RemovalMode(Enum):
    """How the filter picks the sample to drop when over threshold."""

    RANDOMIZED_PROPORTIONAL = "randomized-proportional"
    DETERMINISTIC_MAX = "deterministic-max"


class ProxyMode(Enum):
    """Which error proxy the adaptive consistency check uses."""

    PAPER = "paper"
    SIMPLIFIED = "simplified"


class Termination(Enum):
    THRESHOLD_MET = "threshold-met"
    FLOOR_REACHED = "floor-reached"


@dataclass(frozen=True)
class FilterConfig:
    lambda_ub: float
    removal_mode: RemovalMode = RemovalMode.RANDOMIZED_PROPORTIONAL
    min_active_fraction: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.lambda_ub <= 0:
            raise ValueError(f"lambda_ub must be positive, got {self.lambda_ub}")
        if not 0 < self.min_active_fraction <= 1:
            raise ValueError(
                f"min_active_fraction must be in (0, 1], got {self.min_active_fraction}"
            )


@dataclass(frozen=True)
class AdaptiveConfig:
    """Parameters of the dyadic search over covariance bounds.

    ``m`` is the sample count entering the error proxy, and ``alpha`` the
    assumed corruption fraction. Values of alpha up to 0.5 are accepted:
    the analysis behind the proxy needs alpha + 6 ln(1/p)/m < 1/12, but the
    estimator itself is routinely run far beyond that.
    """

    lambda_lb: float
    lambda_ub: float
    failure_prob: float
    alpha: float
    m: int
    proxy_mode: ProxyMode = ProxyMode.PAPER

    def __post_init__(self):
        if not 0 < self.lambda_lb <= self.lambda_ub:
            raise ValueError(
                f"need 0 < lambda_lb <= lambda_ub, got ({self.lambda_lb}, {self.lambda_ub})"
            )
        if not 0 < self.failure_prob < 1:
            raise ValueError(f"failure_prob must be in (0, 1), got {self.failure_prob}")
        if not 0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must be in [0, 0.5), got {self.alpha}")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")


@dataclass(frozen=True)
class FilterOutcome:
    mean: np.ndarray
    removed: tuple[int, ...]  # in removal order
    final_top_eigenvalue: float
    terminated_by: Termination


class MatrixSampleSet:
    """A stack of equally shaped d x r samples plus an active index subset."""

    def __init__(self, samples: np.ndarray, active=None):
        samples = np.array(samples, dtype=float)
        if samples.ndim != 3:
            raise ValueError(f"samples must be (m, d, r), got shape {samples.shape}")
        if samples.shape[0] == 0:
            raise ValueError("sample set is empty")
        m = samples.shape[0]
        if active is None:
            active = range(m)
        active = tuple(sorted(int(i) for i in active))
        if not active:
            raise ValueError("active subset is empty")
        if active[0] < 0 or active[-1] >= m or len(set(active)) != len(active):
            raise ValueError(f"active indices must be distinct and in [0, {m})")
        samples.setflags(write=False)
        self.samples = samples
        self.active = active

    @classmethod
    def from_matrices(cls, matrices) -> "MatrixSampleSet":
        return cls(np.stack([np.asarray(x, dtype=float) for x in matrices]))

    @classmethod
    def from_frames(cls, frames) -> "MatrixSampleSet":
        return cls(np.stack([f.data for f in frames]))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def _mean_over(samples: np.ndarray, active: list[int] | tuple[int, ...]) -> np.ndarray:
    return samples[list(active)].mean(axis=0)


def _covariance_over(samples: np.ndarray, active) -> SymmetricMatrix:
    sub = samples[list(active)]
    dev = sub - sub.mean(axis=0)
    d = samples.shape[1]
    flat = np.transpose(dev, (1, 0, 2)).reshape(d, -1)
    return SymmetricMatrix(flat @ flat.T / sub.shape[0])


def empirical_mean(sample_set: MatrixSampleSet) -> np.ndarray:
    """Plain average of the active samples."""
    return _mean_over(sample_set.samples, sample_set.active)


def empirical_covariance(sample_set: MatrixSampleSet) -> SymmetricMatrix:
    """d x d covariance of the active samples.

    Samples are d x r matrices, so each contributes the outer product of its
    deviation with itself (rank up to r).
    """
    return _covariance_over(sample_set.samples, sample_set.active)


def filter_samples(sample_set: MatrixSampleSet, config: FilterConfig) -> FilterOutcome:
    """Iteratively strip high-score samples until the covariance is tame.

    Stops with THRESHOLD_MET as soon as the top covariance eigenvalue drops
    below 18 * lambda_ub. If instead the active set would shrink below
    ceil(min_active_fraction * m), the current mean is returned with
    FLOOR_REACHED: removing more than that signals misconfiguration and
    silent unbounded shrinkage would be worse.
    """
    samples = sample_set.samples
    m_total = sample_set.n_samples
    floor = math.ceil(config.min_active_fraction * m_total)
    active = list(sample_set.active)
    removed: list[int] = []
    rng = np.random.default_rng(config.rng_seed)

    while True:
        theta = _mean_over(samples, active)
        lam, v = leading_eigenpair(_covariance_over(samples, active))
        if lam < 18.0 * config.lambda_ub:
            return FilterOutcome(theta, tuple(removed), lam, Termination.THRESHOLD_MET)
        if len(active) - 1 < floor:
            return FilterOutcome(theta, tuple(removed), lam, Termination.FLOOR_REACHED)
        dev = samples[active] - theta
        scores = np.einsum("mdr,d->mr", dev, v)
        scores = np.einsum("mr,mr->m", scores, scores)
        if config.removal_mode is RemovalMode.DETERMINISTIC_MAX:
            pick = int(np.argmax(scores))  # first max = lowest sample index
        else:
            total = float(scores.sum())
            if total <= 0.0:
                raise RuntimeError(
                    "covariance above threshold but all outlier scores are zero"
                )
            pick = int(rng.choice(len(active), p=scores / total))
        removed.append(active[pick])
        del active[pick]


def error_proxy(lam: float, config: AdaptiveConfig) -> float:
    """Analytic error bound used to compare estimates across the grid.

    Paper form: 18 sqrt(5 lam) (alpha + 4 ln(1/p) / m)^(1/2).
    Simplified form (the experiments' default): sqrt(lam * alpha).
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if config.proxy_mode is ProxyMode.SIMPLIFIED:
        return math.sqrt(lam * config.alpha)
    tail = config.alpha + 4.0 * math.log(1.0 / config.failure_prob) / config.m
    return 18.0 * math.sqrt(5.0 * lam) * math.sqrt(tail)


def _spectral_norm(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def adaptive_filter(
    sample_set: MatrixSampleSet,
    config: AdaptiveConfig,
    filter_template: FilterConfig,
) -> FilterOutcome:
    """Run the filter over the dyadic grid 2^j, j from ceil(log2 lambda_ub)
    down to floor(log2 lambda_lb), returning the estimate at the smallest
    grid point consistent with everything above it.

    At each j the fresh estimate is compared against every previously
    computed k > j; on the first violation of
    ||theta_j - theta_k||_2 <= f(2^j) + f(2^k) the estimate at 2^(j+1) is
    returned, even when the violating k is further up the grid. If the loop
    completes, the estimate at the grid bottom is returned.

    ``filter_template`` supplies removal mode, floor, and the root seed;
    its lambda_ub is replaced per grid point, and each grid point runs on
    an independent substream derived from (rng_seed, j).
    """
    j_lo = math.floor(math.log2(config.lambda_lb))
    j_hi = math.ceil(math.log2(config.lambda_ub))
    outcomes: dict[int, FilterOutcome] = {}
    for j in range(j_hi, j_lo - 1, -1):
        cfg_j = replace(
            filter_template,
            lambda_ub=2.0 ** j,
            rng_seed=substream_seed(filter_template.rng_seed, j),
        )
        outcomes[j] = filter_samples(sample_set, cfg_j)
        f_j = error_proxy(2.0 ** j, config)
        for k in range(j + 1, j_hi + 1):
            gap = _spectral_norm(outcomes[j].mean - outcomes[k].mean)
            if gap > f_j + error_proxy(2.0 ** k, config):
                return outcomes[j + 1]
    return outcomes[j_lo]
