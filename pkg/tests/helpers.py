"""Shared test utilities: independent oracles and frame factories."""

from __future__ import annotations

import math

import numpy as np

from robusteig.linalg import OrthonormalFrame, polar_orthonormalize, subspace_dist
from robusteig.synthetic import haar_frame

GRID_STEP = 1e-4


def frame_near(truth: OrthonormalFrame, eps: float, rng: np.random.Generator) -> OrthonormalFrame:
    """Random frame guaranteed within subspace distance eps of truth."""
    noise = rng.standard_normal(truth.data.shape)
    noise *= 0.7 * eps / np.linalg.norm(noise, 2)
    frame = polar_orthonormalize(truth.data + noise)
    assert subspace_dist(frame, truth) <= eps
    return frame


def random_rotation(r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar orthogonal r x r matrix (either determinant sign)."""
    q, rr = np.linalg.qr(rng.standard_normal((r, r)))
    signs = np.sign(np.diag(rr))
    signs[signs == 0] = 1.0
    return q * signs


def grid_procrustes_min(y: np.ndarray, y_ref: np.ndarray, step: float = GRID_STEP) -> float:
    """Brute-force minimum of ||Y Z - Y_ref||_F over a dense grid of r x r
    orthogonal matrices, r in {1, 2}, covering both determinant signs.

    Cost at each grid point uses the expansion
    ||Y Z - Y_ref||_F^2 = ||Y||_F^2 + ||Y_ref||_F^2 - 2 tr(Z^T Y^T Y_ref),
    which is plain algebra and shares nothing with the SVD closed form.
    """
    r = y.shape[1]
    const = float(np.sum(y * y) + np.sum(y_ref * y_ref))
    mat = y.T @ y_ref
    if r == 1:
        best = max(float(mat[0, 0]), -float(mat[0, 0]))
    elif r == 2:
        angles = np.arange(0.0, 2.0 * math.pi, step)
        cos, sin = np.cos(angles), np.sin(angles)
        # rotation [[c, -s], [s, c]] and reflection [[c, s], [s, -c]]
        rot = cos * (mat[0, 0] + mat[1, 1]) + sin * (mat[1, 0] - mat[0, 1])
        ref = cos * (mat[0, 0] - mat[1, 1]) + sin * (mat[1, 0] + mat[0, 1])
        best = float(max(rot.max(), ref.max()))
    else:
        raise ValueError("grid oracle only covers r in {1, 2}")
    return math.sqrt(max(const - 2.0 * best, 0.0))


def rotation_from_angle(theta: float, reflection: bool) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    if reflection:
        return np.array([[c, s], [s, -c]])
    return np.array([[c, -s], [s, c]])


def random_frame(rng: np.random.Generator, d: int, r: int) -> OrthonormalFrame:
    return haar_frame(rng, d, r)


def vector_filter_oracle(vectors, lambda_ub, mode, seed, min_active_fraction=0.5):
    """Independently written r=1 specialization of the spectral filter.

    Mirrors the documented RNG contract (one default_rng(seed); one choice
    per removal) but does all linear algebra on plain vectors.
    """
    from robusteig.filtering import RemovalMode

    m_total = vectors.shape[0]
    floor = math.ceil(min_active_fraction * m_total)
    active = list(range(m_total))
    removed = []
    rng = np.random.default_rng(seed)
    while True:
        x = vectors[active]
        mu = x.mean(axis=0)
        dev = x - mu
        cov = dev.T @ dev / len(active)
        cov = 0.5 * (cov + cov.T)
        evals, evecs = np.linalg.eigh(cov)
        lam, v = float(evals[-1]), evecs[:, -1]
        if lam < 18.0 * lambda_ub:
            return mu, removed, lam
        if len(active) - 1 < floor:
            return mu, removed, lam
        scores = (dev @ v) ** 2
        if mode is RemovalMode.DETERMINISTIC_MAX:
            pick = int(np.argmax(scores))
        else:
            pick = int(rng.choice(len(active), p=scores / scores.sum()))
        removed.append(active[pick])
        del active[pick]
