"""Robust selection of a reference frame from untrusted responses.

Out of m candidate frames, pick one whose median-style ball radius is the
smallest: for each candidate, the radius is the smallest eps such that
strictly more than m/2 of the candidates (itself included, at distance 0)
lie within subspace distance eps. Whenever a majority of the inputs cluster
within eps of some common frame V, the selected frame is within 3*eps of V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import OrthonormalFrame, pairwise_subspace_distances


@dataclass(frozen=True)
class ReferenceResult:
    """Selected reference: its index, the frame itself, and the achieved radius."""

    index: int
    frame: OrthonormalFrame
    radius: float


def majority_radii(distances: np.ndarray) -> np.ndarray:
    """Per-candidate smallest radius covering a strict majority.

    ``distances`` is the full m x m pairwise matrix (zero diagonal). The
    strict-majority count (> m/2, self included) makes the radius the
    (floor(m/2) + 1)-th smallest entry of each row. For even m this differs
    by one order statistic from the median over the m-1 distances to the
    other candidates; the strict-majority counting rule is the one the
    selection guarantee relies on, so it is used for all m.
    """
    m = distances.shape[0]
    k = m // 2 + 1
    return np.sort(distances, axis=1)[:, k - 1]


def robust_reference(
    frames: list[OrthonormalFrame],
    distances: np.ndarray | None = None,
) -> ReferenceResult:
    """Pick the frame with the smallest strict-majority ball radius.

    Ties resolve to the lowest index. ``distances`` may carry a precomputed
    pairwise matrix (the harness reuses it for diagnostics); otherwise the
    O(m^2) matrix is computed here.
    """
    m = len(frames)
    if m == 0:
        raise ValueError("need at least one candidate frame")
    if distances is None:
        distances = pairwise_subspace_distances(frames)
    if distances.shape != (m, m):
        raise ValueError(f"distance matrix shape {distances.shape} != ({m}, {m})")
    radii = majority_radii(distances)
    index = int(np.argmin(radii))
    return ReferenceResult(index=index, frame=frames[index], radius=float(radii[index]))
