"""Synthetic distributed-PCA world: spectrum model, Gaussian node sampling,
and the corruption strategies used by the experiment harness.

Seed scheme: all randomness of a simulated trial derives from one integer
seed through fixed substream roles (see ``seeding``):

* world construction consumes the seed directly,
* node i's data lives on substream (seed, NODE_STREAM, i),
* the shared adversarial frame on (seed, ADVERSARY_STREAM),
* a random-frames corrupter at node i on (seed, RANDOM_FRAME_STREAM, i).

Node substreams are independent of m and of the corruption level, so
adding nodes never perturbs earlier nodes' data and all corruption levels
share the clean nodes' data (common random numbers for paired comparisons).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import (
    OrthonormalFrame,
    SymmetricMatrix,
    polar_orthonormalize,
    subspace_dist,
    top_r_eigenframe,
)
from .seeding import substream_rng

NODE_STREAM = 1
ADVERSARY_STREAM = 2
RANDOM_FRAME_STREAM = 3

ADVERSARY_MIX = 0.01


class AdversaryKind(Enum):
    COLLUSION_NEAR_ORTHOGONAL = "collusion-near-orthogonal"
    RANDOM_FRAMES = "random-frames"
    NONE = "none"


@dataclass(frozen=True)
class SpectrumModel:
    """Covariance spectrum with unit top block and geometrically decaying tail.

    The top r eigenvalues are all 1; the tail is (1 - delta) * eta^j for
    j = 1 .. d - r with eta = 1 - (1 - delta) / (r_star - r), which makes
    r_star approximately the effective rank trace/||A||.
    """

    d: int
    r: int
    r_star: float
    delta: float

    def __post_init__(self):
        if not 1 <= self.r < self.d:
            raise ValueError(f"need 1 <= r < d, got r={self.r}, d={self.d}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not self.r_star > self.r:
            raise ValueError(f"need r_star > r, got r_star={self.r_star}, r={self.r}")
        if not 0 < self.eta < 1:
            raise ValueError(
                f"eta = 1 - (1-delta)/(r_star-r) = {self.eta} is outside (0, 1); "
                "increase r_star or delta"
            )

    @property
    def eta(self) -> float:
        return 1.0 - (1.0 - self.delta) / (self.r_star - self.r)

    def eigenvalues(self) -> np.ndarray:
        tail = (1.0 - self.delta) * self.eta ** np.arange(1, self.d - self.r + 1)
        return np.concatenate([np.ones(self.r), tail])


@dataclass(frozen=True)
class CorruptionSpec:
    """Fraction of lying nodes and how they lie.

    The corrupted nodes are the first floor(alpha * m) indices.
    """

    alpha: float
    strategy: AdversaryKind = AdversaryKind.COLLUSION_NEAR_ORTHOGONAL

    def __post_init__(self):
        if not 0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must be in [0, 0.5), got {self.alpha}")

    def corrupted_count(self, m: int) -> int:
        return int(math.floor(self.alpha * m))


@dataclass(frozen=True)
class WorldInstance:
    """One realized population: covariance, ground truth, and sampling factor."""

    model: SpectrumModel
    covariance: SymmetricMatrix
    v_true: OrthonormalFrame
    basis: np.ndarray  # full d x d orthogonal [V V_perp]
    sqrt_factor: np.ndarray  # sqrt_factor @ sqrt_factor.T == covariance
    kappa: float
    gap: float


def haar_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed d x d orthogonal matrix.

    QR of a standard Gaussian matrix with the R-diagonal signs folded into
    Q; plain QR alone is not Haar.
    """
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def haar_frame(rng: np.random.Generator, d: int, r: int) -> OrthonormalFrame:
    return OrthonormalFrame(haar_orthogonal(rng, d)[:, :r])


def build_world(model: SpectrumModel, seed: int) -> WorldInstance:
    """Draw a Haar basis and assemble the population covariance."""
    rng = np.random.default_rng(seed)
    basis = haar_orthogonal(rng, model.d)
    eigenvalues = model.eigenvalues()
    covariance = SymmetricMatrix((basis * eigenvalues) @ basis.T)
    gap = 1.0 - (1.0 - model.delta) * model.eta
    return WorldInstance(
        model=model,
        covariance=covariance,
        v_true=OrthonormalFrame(basis[:, : model.r]),
        basis=basis,
        sqrt_factor=basis * np.sqrt(eigenvalues),
        kappa=1.0 / gap,  # top eigenvalue is exactly 1
        gap=gap,
    )


def sample_local_covariance(world: WorldInstance, n: int, seed) -> SymmetricMatrix:
    """Empirical covariance of n i.i.d. draws from N(0, world.covariance)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, world.model.d)) @ world.sqrt_factor.T
    return SymmetricMatrix(x.T @ x / n)


def adversarial_frame(world: WorldInstance, seed) -> OrthonormalFrame:
    """Frame near-orthogonal to the ground truth.

    Takes the leading r columns of the orthogonal complement block and mixes
    in one percent of a random frame before re-orthonormalizing, so the
    collusion is near but not exactly orthogonal; the result always has
    subspace distance at least 0.99 from the truth.
    """
    d, r = world.model.d, world.model.r
    if d < 2 * r:
        raise ValueError(f"need d >= 2r to build a near-orthogonal frame, got d={d}, r={r}")
    rng = np.random.default_rng(seed)
    perturbation = haar_frame(rng, d, r)
    return polar_orthonormalize(world.basis[:, r : 2 * r] + ADVERSARY_MIX * perturbation.data)


def clean_responses(world: WorldInstance, m: int, n: int, seed: int) -> list[OrthonormalFrame]:
    """Each node's honest response: top-r eigenframe of its local covariance."""
    out = []
    for i in range(m):
        local = sample_local_covariance(world, n, substream_rng(seed, NODE_STREAM, i))
        frame, _ = top_r_eigenframe(local, world.model.r)
        out.append(frame)
    return out


def apply_corruption(
    world: WorldInstance,
    responses: list[OrthonormalFrame],
    corruption: CorruptionSpec,
    seed: int,
) -> tuple[list[OrthonormalFrame], tuple[int, ...]]:
    """Overwrite the corrupted prefix of a clean response list.

    Returns the corrupted list plus the true good index set (simulation-only
    knowledge, used for diagnostics).
    """
    m = len(responses)
    bad = corruption.corrupted_count(m)
    if bad >= m / 2:
        raise ValueError(f"corrupted count {bad} must stay below m/2 = {m / 2}")
    out = list(responses)
    if corruption.strategy is AdversaryKind.COLLUSION_NEAR_ORTHOGONAL and bad > 0:
        shared = adversarial_frame(world, substream_rng(seed, ADVERSARY_STREAM))
        for i in range(bad):
            out[i] = shared
    elif corruption.strategy is AdversaryKind.RANDOM_FRAMES:
        for i in range(bad):
            rng = substream_rng(seed, RANDOM_FRAME_STREAM, i)
            out[i] = haar_frame(rng, world.model.d, world.model.r)
    return out, tuple(range(bad, m))


def generate_responses(
    world: WorldInstance,
    m: int,
    n: int,
    corruption: CorruptionSpec,
    seed: int,
) -> tuple[list[OrthonormalFrame], tuple[int, ...]]:
    """Full response list for one trial: honest nodes plus corrupted prefix."""
    return apply_corruption(world, clean_responses(world, m, n, seed), corruption, seed)


def davis_kahan_check(
    world: WorldInstance, responses: list[OrthonormalFrame], local_errors: list[float]
) -> float:
    """Largest slack in dist(V_i, V) <= 2 ||A_i - A|| / gap over the inputs.

    Positive slack means a violation; used as a sampling sanity diagnostic.
    """
    worst = -math.inf
    for frame, err in zip(responses, local_errors):
        worst = max(worst, subspace_dist(frame, world.v_true) - 2.0 * err / world.gap)
    return worst
