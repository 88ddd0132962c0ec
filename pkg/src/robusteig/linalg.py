"""Dense symmetric linear algebra and subspace geometry primitives.

Everything here is a pure function of immutable inputs; matrices are small
and dense (d up to a few hundred), so the full LAPACK eigendecomposition and
SVD paths are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ORTHO_TOL = 1e-8
ORTHO_REPAIR_TOL = 1e-4
SYM_TOL = 1e-10


def _as_matrix(data, name: str) -> np.ndarray:
    arr = np.array(data, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _polar_factor(mat: np.ndarray) -> np.ndarray:
    """Orthonormal polar factor P @ Qt of a full-column-rank matrix."""
    p, s, qt = np.linalg.svd(mat, full_matrices=False)
    if s[-1] <= 1e-12 * max(1.0, float(s[0])):
        raise ValueError("matrix is rank deficient, no unique nearest frame")
    return p @ qt


@dataclass(frozen=True)
class OrthonormalFrame:
    """A d x r matrix with orthonormal columns.

    Construction enforces ||U^T U - I||_2 <= 1e-8. Inputs that drift beyond
    that but stay below 1e-4 are re-orthonormalized via the polar factor;
    anything worse is rejected so that badly broken inputs surface as errors
    instead of being silently repaired.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.data, "frame")
        d, r = arr.shape
        if not 1 <= r <= d:
            raise ValueError(f"need 1 <= r <= d, got shape {arr.shape}")
        gram_defect = arr.T @ arr - np.eye(r)
        defect = float(np.linalg.norm(gram_defect, 2))
        if defect > ORTHO_REPAIR_TOL:
            raise ValueError(
                f"columns are not orthonormal (defect {defect:.3e} > {ORTHO_REPAIR_TOL})"
            )
        if defect > ORTHO_TOL:
            arr = _polar_factor(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def r(self) -> int:
        return self.data.shape[1]

    def rotate(self, z: np.ndarray) -> "OrthonormalFrame":
        """Frame spanning the same subspace, columns mixed by orthogonal z."""
        return OrthonormalFrame(self.data @ z)


@dataclass(frozen=True)
class SymmetricMatrix:
    """A real symmetric d x d matrix; symmetrized on construction."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.data, "matrix")
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        arr = 0.5 * (arr + arr.T)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def d(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full eigendecomposition with eigenvalues sorted non-increasing."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns paired with eigenvalues

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(vals) > 0):
            raise ValueError("eigenvalues must be sorted non-increasing")


def spectral_decomposition(mat: SymmetricMatrix) -> SpectralDecomposition:
    vals, vecs = np.linalg.eigh(mat.data)
    return SpectralDecomposition(vals[::-1].copy(), vecs[:, ::-1].copy())


def _check_same_shape(u: OrthonormalFrame, v: OrthonormalFrame):
    if u.data.shape != v.data.shape:
        raise ValueError(f"frame shapes differ: {u.data.shape} vs {v.data.shape}")


def subspace_dist(u: OrthonormalFrame, v: OrthonormalFrame) -> float:
    """Largest principal angle's sine between the two column spans.

    Computed as ||(I - U U^T) V||_2 via the SVD of the d x r residual,
    which is O(d r^2) instead of forming the d x d projector.
    """
    _check_same_shape(u, v)
    residual = v.data - u.data @ (u.data.T @ v.data)
    top = float(np.linalg.svd(residual, compute_uv=False)[0])
    return min(top, 1.0)


def _distances_from_stack(u: np.ndarray, stack: np.ndarray) -> np.ndarray:
    residual = stack - np.einsum("dk,mkr->mdr", u, np.einsum("dk,mdr->mkr", u, stack))
    top = np.linalg.svd(residual, compute_uv=False)[:, 0]
    return np.minimum(top, 1.0)


def subspace_distances_from(u: OrthonormalFrame, frames: list[OrthonormalFrame]) -> np.ndarray:
    """Distances from one frame to each frame in the list (batched SVD)."""
    for f in frames:
        _check_same_shape(u, f)
    stack = np.ascontiguousarray(np.stack([f.data for f in frames]))
    return _distances_from_stack(u.data, stack)


def pairwise_subspace_distances(frames: list[OrthonormalFrame]) -> np.ndarray:
    """Symmetric m x m matrix of subspace distances, zero diagonal.

    Row i is computed with one batched SVD over the residuals
    (I - U_i U_i^T) V_j, matching subspace_dist pair by pair.
    """
    m = len(frames)
    if m == 0:
        return np.zeros((0, 0))
    for f in frames[1:]:
        _check_same_shape(frames[0], f)
    stack = np.ascontiguousarray(np.stack([f.data for f in frames]))
    dist = np.zeros((m, m))
    for i in range(m):
        dist[i] = _distances_from_stack(frames[i].data, stack)
    np.fill_diagonal(dist, 0.0)
    return dist


def procrustes_factor(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Orthogonal Z minimizing ||source @ Z - target||_F, via full SVD.

    A singular source^T target makes the minimizer non-unique; any SVD
    factor pair is an acceptable minimizer, so no rank check is done.
    """
    p, _, qt = np.linalg.svd(source.T @ target)
    return p @ qt


def procrustes_rotation(y: OrthonormalFrame, y_ref: OrthonormalFrame) -> np.ndarray:
    """Closed-form solution of the orthogonal Procrustes alignment problem."""
    _check_same_shape(y, y_ref)
    return procrustes_factor(y.data, y_ref.data)


def top_r_eigenframe(mat: SymmetricMatrix, r: int) -> tuple[OrthonormalFrame, np.ndarray]:
    """Frame spanning the invariant subspace of the r largest eigenvalues.

    Returns the frame and the r eigenvalues in non-increasing order. With a
    (near-)degenerate gap at position r any valid basis is returned.
    """
    if not 1 <= r <= mat.d:
        raise ValueError(f"need 1 <= r <= d={mat.d}, got r={r}")
    vals, vecs = np.linalg.eigh(mat.data)
    order = np.argsort(vals)[::-1]
    top = order[:r]
    return OrthonormalFrame(vecs[:, top]), vals[top].copy()


def leading_eigenpair(mat: SymmetricMatrix) -> tuple[float, np.ndarray]:
    """Algebraically largest eigenvalue and a unit eigenvector."""
    vals, vecs = np.linalg.eigh(mat.data)
    return float(vals[-1]), vecs[:, -1].copy()


def eigengap_and_kappa(eigenvalues: np.ndarray, r: int) -> tuple[float, float]:
    """Gap delta_r = lambda_r - lambda_{r+1} and kappa = lambda_1 / delta_r."""
    vals = np.asarray(eigenvalues, dtype=float)
    if vals.ndim != 1 or len(vals) <= r or r < 1:
        raise ValueError(f"need 1 <= r < len(eigenvalues), got r={r}, len={len(vals)}")
    if np.any(np.diff(vals) > 0):
        raise ValueError("eigenvalues must be sorted non-increasing")
    gap = float(vals[r - 1] - vals[r])
    if gap <= 0:
        raise ValueError(f"no eigengap at r={r} (delta_r={gap})")
    return gap, float(vals[0]) / gap


def polar_orthonormalize(mat: np.ndarray) -> OrthonormalFrame:
    """Nearest orthonormal frame in Frobenius norm (polar factor).

    Requires full column rank; the output spans the same column space as
    the input.
    """
    arr = _as_matrix(mat, "matrix")
    return OrthonormalFrame(_polar_factor(arr))
