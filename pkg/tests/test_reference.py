import numpy as np
import pytest

from robusteig.linalg import OrthonormalFrame, pairwise_subspace_distances, subspace_dist
from robusteig.reference import majority_radii, robust_reference

from helpers import frame_near, random_frame


def brute_force_radii(frames):
    """Independent O(m^2) recomputation: per-pair distances, per-row order stat."""
    m = len(frames)
    radii = []
    for i in range(m):
        dists = sorted(
            0.0 if i == j else subspace_dist(frames[i], frames[j]) for j in range(m)
        )
        count_needed = m // 2 + 1  # strictly more than m/2, self included
        radii.append(dists[count_needed - 1])
    return radii


class TestRobustReference:
    def test_all_identical(self):
        rng = np.random.default_rng(0)
        frame = random_frame(rng, 8, 2)
        result = robust_reference([frame] * 6)
        assert result.index == 0
        assert result.radius == pytest.approx(0.0, abs=1e-12)
        assert result.frame is frame

    def test_majority_of_copies(self):
        a = OrthonormalFrame(np.eye(4)[:, :1])
        b = OrthonormalFrame(np.eye(4)[:, 1:2])
        result = robust_reference([a, b, a, b, a])
        assert result.index == 0
        assert result.radius == 0.0
        assert subspace_dist(result.frame, a) == 0.0

    @pytest.mark.parametrize("m,seed", [(7, 1), (8, 2), (15, 3)])
    def test_matches_brute_force(self, m, seed):
        rng = np.random.default_rng(seed)
        frames = [random_frame(rng, 10, 2) for _ in range(m)]
        result = robust_reference(frames)
        radii = brute_force_radii(frames)
        expected = int(np.argmin(radii))
        assert result.index == expected
        assert result.radius == pytest.approx(radii[expected], abs=1e-10)

    def test_planted_cluster_guarantee(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            truth = random_frame(rng, 12, 3)
            eps = float(rng.uniform(0.02, 0.3))
            inliers = [frame_near(truth, eps, rng) for _ in range(5)]
            outliers = [random_frame(rng, 12, 3) for _ in range(4)]
            result = robust_reference(inliers + outliers)
            assert subspace_dist(result.frame, truth) <= 3 * eps

    def test_permutation_keeps_radius(self):
        rng = np.random.default_rng(5)
        frames = [random_frame(rng, 9, 2) for _ in range(9)]
        base = robust_reference(frames)
        perm = list(rng.permutation(len(frames)))
        permuted = robust_reference([frames[i] for i in perm])
        assert permuted.radius == pytest.approx(base.radius, abs=1e-12)

    def test_output_is_input_member(self):
        rng = np.random.default_rng(6)
        frames = [random_frame(rng, 7, 2) for _ in range(5)]
        result = robust_reference(frames)
        assert any(result.frame is f for f in frames)

    def test_empty_input_errors(self):
        with pytest.raises(ValueError):
            robust_reference([])

    def test_single_frame(self):
        rng = np.random.default_rng(7)
        frame = random_frame(rng, 6, 2)
        result = robust_reference([frame])
        assert result.index == 0 and result.radius == 0.0

    def test_precomputed_distances_agree(self):
        rng = np.random.default_rng(8)
        frames = [random_frame(rng, 8, 2) for _ in range(7)]
        dist = pairwise_subspace_distances(frames)
        assert robust_reference(frames, dist) == robust_reference(frames)

    def test_bad_distance_shape_errors(self):
        rng = np.random.default_rng(9)
        frames = [random_frame(rng, 6, 2) for _ in range(3)]
        with pytest.raises(ValueError):
            robust_reference(frames, np.zeros((2, 2)))

    def test_even_m_counting_rule(self):
        # m=4: strict majority needs 3 points in the ball, so the radius is
        # the 3rd smallest row entry including the self distance
        a = OrthonormalFrame(np.eye(4)[:, :1])
        b = OrthonormalFrame(np.eye(4)[:, 1:2])
        radii = majority_radii(pairwise_subspace_distances([a, a, b, b]))
        assert np.allclose(radii, [1.0, 1.0, 1.0, 1.0])
