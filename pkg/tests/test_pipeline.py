import numpy as np
import pytest

from robusteig.filtering import ProxyMode, RemovalMode
from robusteig.linalg import OrthonormalFrame, polar_orthonormalize, subspace_dist
from robusteig.pipeline import (
    PipelineConfig,
    aligned_ground_truth,
    covariance_diagnostic,
    naive_estimate,
    procrustes_only_estimate,
    robust_estimate,
)
from robusteig.alignment import procrustes_fixing
from robusteig.reference import robust_reference
from robusteig.synthetic import (
    CorruptionSpec,
    SpectrumModel,
    build_world,
    generate_responses,
)

from helpers import frame_near, random_frame, random_rotation


def experiment_responses(alpha, *, d=30, r=2, n=1000, m=50, trial_seed=7):
    world = build_world(SpectrumModel(d=d, r=r, r_star=2.0 * r, delta=0.25), trial_seed)
    responses, good = generate_responses(
        world, m, n, CorruptionSpec(alpha), seed=trial_seed + 1
    )
    return world, responses, good


def harness_config(alpha, m, n, seed=0):
    return PipelineConfig(
        alpha=alpha,
        omega=float(np.sqrt(1.0 / (m * n))),
        removal_mode=RemovalMode.DETERMINISTIC_MAX,
        proxy_mode=ProxyMode.SIMPLIFIED,
        rng_seed=seed,
    )


class TestRobustEstimate:
    def test_fixed_point_on_identical_responses(self):
        rng = np.random.default_rng(0)
        w = random_frame(rng, 9, 2)
        responses = [w] * 4  # power of two so the plain mean is exact
        report = robust_estimate(responses, PipelineConfig(alpha=0.1, omega=0.5, rng_seed=1))
        assert np.allclose(report.raw_mean, w.data, atol=1e-10)
        assert subspace_dist(report.orthonormalized, w) <= 1e-10
        assert report.filter_outcome.removed == ()

    def test_noiseless_rotation_ambiguity_removed(self):
        rng = np.random.default_rng(1)
        truth = random_frame(rng, 10, 3)
        responses = [truth.rotate(random_rotation(3, rng)) for _ in range(10)]
        report = robust_estimate(responses, PipelineConfig(alpha=0.0, omega=0.5, rng_seed=2))
        assert subspace_dist(report.orthonormalized, truth) <= 1e-8

    def test_beats_naive_under_collusion(self):
        for trial in range(3):
            world, responses, _ = experiment_responses(0.2, trial_seed=10 + trial)
            cfg = harness_config(0.2, m=50, n=1000, seed=trial)
            robust = robust_estimate(responses, cfg)
            naive = naive_estimate(responses)
            d_robust = subspace_dist(robust.orthonormalized, world.v_true)
            d_naive = subspace_dist(naive.orthonormalized, world.v_true)
            assert d_robust < d_naive

    def test_rejects_tiny_m(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            robust_estimate(
                [random_frame(rng, 5, 1)] * 2, PipelineConfig(alpha=0.0, omega=0.5)
            )

    def test_report_invariant(self):
        rng = np.random.default_rng(3)
        truth = random_frame(rng, 8, 2)
        responses = [frame_near(truth, 0.1, rng) for _ in range(6)]
        report = robust_estimate(responses, PipelineConfig(alpha=0.0, omega=0.5, rng_seed=4))
        recomputed = polar_orthonormalize(report.raw_mean)
        assert np.allclose(report.orthonormalized.data, recomputed.data, atol=1e-12)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(alpha=0.6, omega=0.5)
        with pytest.raises(ValueError):
            PipelineConfig(alpha=0.1, omega=7.0)  # above default lambda_ub
        with pytest.raises(ValueError):
            PipelineConfig(alpha=0.1, omega=0.5, failure_prob=1.5)

    def test_global_rotation_equivariance(self):
        rng = np.random.default_rng(4)
        world, responses, _ = experiment_responses(0.25, m=12, n=400, d=16, trial_seed=5)
        cfg = harness_config(0.25, m=12, n=400, seed=6)
        base = subspace_dist(
            robust_estimate(responses, cfg).orthonormalized, world.v_true
        )
        rotated = [f.rotate(random_rotation(f.r, rng)) for f in responses]
        twisted = subspace_dist(
            robust_estimate(rotated, cfg).orthonormalized, world.v_true
        )
        assert abs(base - twisted) <= 1e-8


class TestNaiveEstimate:
    def test_identical_responses(self):
        rng = np.random.default_rng(5)
        w = random_frame(rng, 7, 2)
        report = naive_estimate([w] * 4)
        assert subspace_dist(report.orthonormalized, w) <= 1e-10
        assert report.reference.index == 0
        assert report.filter_outcome is None

    def test_sign_fix_then_average(self):
        v = OrthonormalFrame(np.array([[0.8], [0.6]]))
        flipped = OrthonormalFrame(-v.data)
        report = naive_estimate([v, flipped, v, flipped])
        assert np.allclose(report.raw_mean, v.data, atol=1e-12)

    def test_breaks_down_with_adversarial_first_response(self):
        for trial in range(3):
            world, responses, _ = experiment_responses(0.2, trial_seed=20 + trial)
            report = naive_estimate(responses)
            assert subspace_dist(report.orthonormalized, world.v_true) > 0.9


class TestProcrustesOnlyEstimate:
    def test_identical_responses(self):
        rng = np.random.default_rng(6)
        w = random_frame(rng, 6, 2)
        report = procrustes_only_estimate([w] * 4)
        assert subspace_dist(report.orthonormalized, w) <= 1e-10

    def test_matches_robust_when_filter_is_noop(self):
        rng = np.random.default_rng(7)
        truth = random_frame(rng, 12, 2)
        responses = [frame_near(truth, 0.05, rng) for _ in range(8)]
        # omega = 1 makes every grid threshold at least 18, so nothing is
        # ever removed and the two estimates coincide exactly
        robust = robust_estimate(
            responses, PipelineConfig(alpha=0.0, omega=1.0, rng_seed=8)
        )
        plain = procrustes_only_estimate(responses)
        assert np.array_equal(robust.raw_mean, plain.raw_mean)
        assert robust.filter_outcome.removed == ()

    def test_sits_between_robust_and_naive_under_collusion(self):
        # strict separation of the three methods; at this corruption level
        # the adaptive filter still accepts the filtered estimate
        dists = {"robust": [], "procrustes": [], "naive": []}
        for trial in range(10):
            world, responses, _ = experiment_responses(0.2, trial_seed=30 + trial)
            cfg = harness_config(0.2, m=50, n=1000, seed=trial)
            dists["robust"].append(
                subspace_dist(robust_estimate(responses, cfg).orthonormalized, world.v_true)
            )
            dists["procrustes"].append(
                subspace_dist(
                    procrustes_only_estimate(responses).orthonormalized, world.v_true
                )
            )
            dists["naive"].append(
                subspace_dist(naive_estimate(responses).orthonormalized, world.v_true)
            )
        assert np.mean(dists["robust"]) < np.mean(dists["procrustes"])
        assert np.mean(dists["procrustes"]) < np.mean(dists["naive"])


class TestCovarianceDiagnostic:
    def test_perfect_responses(self):
        rng = np.random.default_rng(8)
        v = random_frame(rng, 8, 2)
        lhs, rhs = covariance_diagnostic([v] * 5, [v] * 5, v, range(5))
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-10)

    def test_single_good_response(self):
        rng = np.random.default_rng(9)
        v = random_frame(rng, 8, 2)
        other = frame_near(v, 0.2, rng)
        lhs, rhs = covariance_diagnostic([other], [other], v, [0])
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs >= 0.0

    def test_bound_holds_on_simulated_trials(self):
        for trial in range(5):
            world, responses, good = experiment_responses(
                0.25, m=20, n=500, d=16, trial_seed=40 + trial
            )
            reference = robust_reference(responses)
            aligned = procrustes_fixing(responses, reference.frame)
            truth = aligned_ground_truth(world.v_true, reference.frame)
            lhs, rhs = covariance_diagnostic(responses, aligned, truth, good)
            assert lhs <= rhs + 1e-8

    def test_empty_good_set_errors(self):
        rng = np.random.default_rng(10)
        v = random_frame(rng, 6, 2)
        with pytest.raises(ValueError):
            covariance_diagnostic([v], [v], v, [])
