"""Procrustes alignment of every response to a common reference frame.

Invariant subspaces have no canonical basis, so averaging raw responses can
cancel instead of denoise. Rotating each frame by its closed-form Procrustes
factor against one shared reference removes the per-node orthogonal
ambiguity while leaving every column span untouched. All responses are
aligned, including any corrupted ones: the caller cannot know which those
are, and the downstream robust mean stage handles them.
"""

from __future__ import annotations

from .linalg import OrthonormalFrame, procrustes_rotation


def procrustes_fixing(
    frames: list[OrthonormalFrame], reference: OrthonormalFrame
) -> list[OrthonormalFrame]:
    """Rotate each frame to best match the reference in Frobenius norm."""
    return [f.rotate(procrustes_rotation(f, reference)) for f in frames]
