import numpy as np
import pytest

from robusteig.alignment import procrustes_fixing
from robusteig.linalg import OrthonormalFrame, subspace_dist

from helpers import frame_near, random_frame, random_rotation


class TestProcrustesFixing:
    def test_already_aligned_is_identity(self):
        rng = np.random.default_rng(0)
        ref = random_frame(rng, 8, 2)
        out = procrustes_fixing([ref, ref, ref], ref)
        for frame in out:
            assert np.allclose(frame.data, ref.data, atol=1e-12)

    def test_sign_fixing_r1(self):
        v = OrthonormalFrame(np.array([[0.6], [0.8]]))
        flipped = OrthonormalFrame(-v.data)
        out = procrustes_fixing([v, flipped], v)
        assert np.allclose(out[0].data, v.data, atol=1e-12)
        assert np.allclose(out[1].data, v.data, atol=1e-12)

    def test_span_preserved(self):
        rng = np.random.default_rng(1)
        frames = [random_frame(rng, 9, 3) for _ in range(6)]
        ref = random_frame(rng, 9, 3)
        for before, after in zip(frames, procrustes_fixing(frames, ref)):
            assert subspace_dist(before, after) <= 1e-10

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        frames = [random_frame(rng, 7, 2) for _ in range(5)]
        ref = random_frame(rng, 7, 2)
        once = procrustes_fixing(frames, ref)
        twice = procrustes_fixing(once, ref)
        for a, b in zip(once, twice):
            assert np.allclose(a.data, b.data, atol=1e-10)

    def test_alignment_is_optimal(self):
        rng = np.random.default_rng(3)
        frames = [random_frame(rng, 8, 2) for _ in range(4)]
        ref = random_frame(rng, 8, 2)
        aligned = procrustes_fixing(frames, ref)
        for original, out in zip(frames, aligned):
            best = np.linalg.norm(out.data - ref.data, "fro")
            for _ in range(20):
                z = random_rotation(2, rng)
                assert best <= np.linalg.norm(original.data @ z - ref.data, "fro") + 1e-8

    def test_alignment_improves_averaging(self):
        # responses share a subspace but carry random basis ambiguity; the
        # naive average cancels, the aligned average does not
        rng = np.random.default_rng(4)
        truth = random_frame(rng, 10, 2)
        responses = [
            frame_near(truth, 0.05, rng).rotate(random_rotation(2, rng))
            for _ in range(40)
        ]
        aligned = procrustes_fixing(responses, truth)
        naive_err = np.linalg.norm(
            np.mean([f.data for f in responses], axis=0) - truth.data, 2
        )
        aligned_err = np.linalg.norm(
            np.mean([f.data for f in aligned], axis=0) - truth.data, 2
        )
        assert aligned_err < naive_err
