import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specbayes import (
    EstimationProblem,
    GaussianBelief,
    Method,
    Observations,
    Role,
    SpectrumSet,
    WavelengthGrid,
    bayes_estimate,
    bayes_posterior,
    confidence,
    least_squares_estimate,
    normalize,
    rmse,
    sequential_update,
)
from specbayes.errors import (
    DegenerateDesign,
    DegenerateMean,
    NoConfidenceAvailable,
    RoleConflict,
    SpectralError,
)
from specbayes.estimators import least_squares_solution
from specbayes.priors import PrecisionSpec, flat_prior

from conftest import make_set, random_problem, random_spd

G2 = WavelengthGrid(400.0, 10.0, 2)


def hand_problem(x=2.0, beta=1.0):
    """Single observation x of the first wavelength only: design row (1, 0)."""
    R = make_set([[1.0, 0.0]], Role.REFLECTANCE, G2)
    C = make_set([[1.0, 1.0]], Role.SENSITIVITY, G2)
    return EstimationProblem(Role.ILLUMINATION, 0, R, C, Observations(np.full((1, 1, 1), x)), beta)


def identity_problem(x):
    R = make_set([[1.0, 0.0], [0.0, 1.0]], Role.REFLECTANCE, G2)
    C = make_set([[1.0, 1.0]], Role.SENSITIVITY, G2)
    return EstimationProblem(Role.ILLUMINATION, 0, R, C,
                             Observations(np.array(x, dtype=float).reshape(1, 2, 1)))


class TestProblem:
    def test_roles_must_complement(self, scene):
        obs = scene.render()
        with pytest.raises(RoleConflict):
            EstimationProblem(Role.REFLECTANCE, 0, scene.reflectance, scene.sensitivity, obs)

    def test_extent_checks(self, scene):
        obs = scene.render()
        with pytest.raises(SpectralError):
            EstimationProblem(Role.ILLUMINATION, 1, scene.reflectance, scene.sensitivity, obs)
        small = SpectrumSet(list(scene.reflectance)[:10])
        with pytest.raises(SpectralError):
            EstimationProblem(Role.ILLUMINATION, 0, small, scene.sensitivity, obs)

    def test_observation_order_follows_design(self, rng):
        for role in Role:
            p = random_problem(rng, role, 5)
            v = p.observation_vector
            for r, (a, b) in enumerate(p.design.row_index):
                idx = [0, 0, 0]
                idx[role.axis] = p.target_index
                idx[p.known_a.role.axis] = a
                idx[p.known_b.role.axis] = b
                assert v[r] == p.observations.values[tuple(idx)]


class TestNormalize:
    def test_simple(self):
        np.testing.assert_array_equal(normalize([2, 4]), [0.5, 1.0])

    def test_already_normalized(self):
        np.testing.assert_array_equal(normalize([1, 1, 1]), [1, 1, 1])

    def test_negatives_preserved(self):
        np.testing.assert_allclose(normalize([-0.1, 0.5]), [-0.2, 1.0], rtol=1e-15)

    @pytest.mark.parametrize("bad", [[0.0, 0.0], [-1.0, -2.0]])
    def test_degenerate(self, bad):
        with pytest.raises(DegenerateMean):
            normalize(bad)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=2, max_size=40)
           .filter(lambda v: max(v) > 1e-6))
    def test_argmax_and_peak(self, values):
        out = normalize(values)
        assert np.argmax(out) == np.argmax(values)
        assert out.max() == 1.0


class TestLeastSquares:
    def test_identity_design(self):
        est = least_squares_estimate(identity_problem([0.3, 0.6]))
        np.testing.assert_allclose(est.normalized.values, [0.5, 1.0], rtol=1e-15)
        assert est.method is Method.LEAST_SQUARES and est.posterior is None

    def test_zero_design(self):
        R = make_set([[0.0, 0.0]], Role.REFLECTANCE, G2)
        C = make_set([[1.0, 1.0]], Role.SENSITIVITY, G2)
        p = EstimationProblem(Role.ILLUMINATION, 0, R, C, Observations(np.ones((1, 1, 1))))
        with pytest.raises(DegenerateDesign):
            least_squares_estimate(p)

    def test_noiseless_d65(self, scene):
        p = scene.problem(Role.ILLUMINATION, 0, scene.render())
        assert rmse(least_squares_estimate(p).normalized, scene.illumination[0]) <= 1e-6

    def test_noise_hurts(self, scene):
        from specbayes import NoiseModel
        p = scene.problem(Role.ILLUMINATION, 0, scene.render(NoiseModel.gaussian(0.01, 3)))
        assert rmse(least_squares_estimate(p).normalized, scene.illumination[0]) > 0.1


class TestBayesPosterior:
    def test_hand_completion_of_square(self):
        prior = GaussianBelief(np.zeros(2), np.eye(2))
        post = bayes_posterior(hand_problem(), prior)
        np.testing.assert_allclose(post.precision, [[2.0, 0.0], [0.0, 1.0]], rtol=1e-15)
        np.testing.assert_allclose(post.mean, [1.0, 0.0], atol=1e-15)

    def test_empty_data_returns_prior(self, rng):
        p = random_problem(rng, Role.SENSITIVITY, 6)
        prior = GaussianBelief(rng.normal(size=6), random_spd(rng, 6))
        post = bayes_posterior(_zero_row_problem(p), prior)
        assert np.array_equal(post.mean, prior.mean)
        assert np.array_equal(post.precision, prior.precision)

    def test_dimension_mismatch(self, rng):
        p = random_problem(rng, Role.ILLUMINATION, 5)
        with pytest.raises(SpectralError):
            bayes_posterior(p, GaussianBelief(np.zeros(4), np.eye(4)))

    def test_flat_prior_matches_least_squares(self, scene):
        p = scene.problem(Role.ILLUMINATION, 0, scene.render())
        post = bayes_posterior(p, flat_prior(scene.grid, PrecisionSpec(alpha=1e-8)))
        lsq = least_squares_solution(p)
        assert np.linalg.norm(post.mean - lsq) <= 1e-4 * np.linalg.norm(lsq)

    @pytest.mark.parametrize("role", list(Role))
    def test_precision_never_decreases(self, rng, role):
        for _ in range(10):
            p = random_problem(rng, role, 8)
            prior = GaussianBelief(rng.normal(size=8), random_spd(rng, 8))
            post = bayes_posterior(p, prior)
            assert np.linalg.eigvalsh(post.precision - prior.precision).min() >= -1e-9

    def test_role_symmetry(self):
        g = WavelengthGrid(400.0, 10.0, 4)
        v = [[0.2, 0.5, 0.9, 0.4]]
        E, R, C = (make_set(v, r, g) for r in Role)
        obs = Observations(np.array([[[0.7]]]))
        prior = GaussianBelief(np.full(4, 0.3), np.eye(4) * 2)
        a = bayes_posterior(EstimationProblem(Role.ILLUMINATION, 0, R, C, obs, 3.0), prior)
        b = bayes_posterior(EstimationProblem(Role.REFLECTANCE, 0, E, C, obs, 3.0), prior)
        c = bayes_posterior(EstimationProblem(Role.SENSITIVITY, 0, E, R, obs, 3.0), prior)
        for other in (b, c):
            np.testing.assert_array_equal(a.mean, other.mean)
            np.testing.assert_array_equal(a.precision, other.precision)

    def test_known_family_order_irrelevant(self, rng):
        p = random_problem(rng, Role.REFLECTANCE, 6)
        q = EstimationProblem(p.target_role, p.target_index, p.known_b, p.known_a,
                              p.observations, p.noise_precision)
        prior = GaussianBelief(np.zeros(6), np.eye(6))
        np.testing.assert_allclose(bayes_posterior(p, prior).mean, bayes_posterior(q, prior).mean,
                                   rtol=1e-10, atol=1e-12)

    def test_jitter_rescues_near_singular(self):
        # precision that is PSD but singular in floating point
        prior = GaussianBelief(np.zeros(2), np.eye(2) * 1e-300 + np.diag([1.0, 1e-300]))
        post = bayes_posterior(hand_problem(beta=1.0), prior)
        assert np.all(np.isfinite(post.mean))


def _zero_row_problem(p):
    """Stand-in with the same design/observation attributes but zero rows.

    Observations always hold at least one pixel, so an empty batch cannot be
    built through EstimationProblem itself.
    """

    class Stub:
        def __init__(self, n):
            from specbayes.core import DesignMatrix
            self.design = DesignMatrix(np.zeros((0, n)), (), (p.known_a.role, p.known_b.role))
            self.observation_vector = np.zeros(0)
            self.noise_precision = p.noise_precision

    return Stub(p.grid.count)


class TestBayesEstimate:
    def test_normalized_and_tagged(self, rng):
        p = random_problem(rng, Role.ILLUMINATION, 6)
        est = bayes_estimate(p, GaussianBelief(np.full(6, 0.5), np.eye(6)))
        assert est.method is Method.BAYES
        assert est.normalized.values.max() == 1.0
        np.testing.assert_allclose(est.normalized.values, est.posterior.mean / est.posterior.mean.max())

    def test_all_negative_mean(self):
        prior = GaussianBelief(np.array([-5.0, -5.0]), np.eye(2) * 1e6)
        with pytest.raises(DegenerateMean):
            bayes_estimate(hand_problem(x=-1.0), prior)


class TestSequential:
    def test_single_equals_posterior(self, rng):
        p = random_problem(rng, Role.SENSITIVITY, 7)
        prior = GaussianBelief(np.zeros(7), random_spd(rng, 7))
        a, b = sequential_update(prior, [p]), bayes_posterior(p, prior)
        np.testing.assert_array_equal(a.mean, b.mean)

    def test_empty_list(self, rng):
        prior = GaussianBelief(np.zeros(3), np.eye(3))
        assert sequential_update(prior, []) is prior

    def test_split_matches_batch(self, scene, rng):
        from specbayes import NoiseModel
        obs = scene.render(NoiseModel.gaussian(0.01, 1)).values
        prior = GaussianBelief(np.full(31, 0.5), np.eye(31))
        full = scene.problem(Role.ILLUMINATION, 0, Observations(obs))
        perm = rng.permutation(24)
        parts = [np.sort(perm[:9]), np.sort(perm[9:])]
        problems = [EstimationProblem(Role.ILLUMINATION, 0,
                                      SpectrumSet([scene.reflectance[j] for j in part]),
                                      scene.sensitivity, Observations(obs[:, part, :]), full.noise_precision)
                    for part in parts]
        seq = sequential_update(prior, problems)
        batch = bayes_posterior(full, prior)
        np.testing.assert_allclose(seq.mean, batch.mean, atol=1e-8, rtol=0)
        np.testing.assert_allclose(seq.precision, batch.precision, atol=1e-8, rtol=0)


class TestConfidence:
    def test_passthrough(self):
        est = bayes_estimate(hand_problem(), GaussianBelief(np.array([0.0, 1.0]), np.eye(2)))
        np.testing.assert_array_equal(confidence(est), est.posterior.precision)

    def test_two_times_identity(self):
        est = bayes_estimate(hand_problem(x=2.0), GaussianBelief(np.array([0.0, 1.0]), np.diag([1.0, 2.0])))
        np.testing.assert_array_equal(confidence(est), 2 * np.eye(2))

    def test_second_batch_increases_touched_diagonal(self, rng):
        p = random_problem(rng, Role.ILLUMINATION, 6)
        prior = GaussianBelief(np.zeros(6), np.eye(6))
        once = bayes_estimate(p, prior)
        twice = bayes_estimate(p, once.posterior)
        touched = np.any(p.design.rows != 0, axis=0)
        assert np.all(np.diag(confidence(twice))[touched] > np.diag(confidence(once))[touched])

    def test_least_squares_has_none(self):
        with pytest.raises(NoConfidenceAvailable):
            confidence(least_squares_estimate(identity_problem([0.3, 0.6])))


class TestRmse:
    def test_zero_for_scaled_copy(self):
        assert rmse([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == 0.0

    def test_unnormalized(self):
        assert rmse([1.0, 2.0], [2.0, 4.0], normalized=False) == pytest.approx(np.sqrt(2.5))
