import numpy as np
import pytest

from specbayes import GaussianBelief, Role, bayes_posterior
from specbayes.errors import DegenerateDesign, SpectralError
from specbayes.estimators import least_squares_solution
from specbayes.oracle import dense_least_squares, least_squares_for, minimize_neg_log_posterior

from conftest import random_problem, random_spd
from test_estimators import _zero_row_problem, hand_problem


class TestMinimizer:
    def test_hand_case(self):
        prior = GaussianBelief(np.zeros(2), np.eye(2))
        np.testing.assert_allclose(minimize_neg_log_posterior(hand_problem(), prior), [1.0, 0.0], atol=1e-8)

    def test_dimension_guard(self, rng):
        p = random_problem(rng, Role.ILLUMINATION, 65, extents=(1, 2, 2))
        with pytest.raises(SpectralError):
            minimize_neg_log_posterior(p, GaussianBelief(np.zeros(65), np.eye(65)))

    @pytest.mark.parametrize("role", list(Role))
    def test_matches_posterior_n8(self, rng, role):
        p = random_problem(rng, role, 8)
        prior = GaussianBelief(rng.normal(size=8), random_spd(rng, 8))
        np.testing.assert_allclose(minimize_neg_log_posterior(p, prior), bayes_posterior(p, prior).mean,
                                   atol=1e-6, rtol=0)

    def test_independent_row_assembly(self, rng):
        from specbayes.oracle import _rows_and_targets
        p = random_problem(rng, Role.REFLECTANCE, 5)
        M, x = _rows_and_targets(p)
        np.testing.assert_array_equal(M, p.design.rows)
        np.testing.assert_array_equal(x, p.observation_vector)


class TestDenseLeastSquares:
    def test_identity(self):
        x = np.array([0.3, -1.0, 2.5])
        np.testing.assert_allclose(dense_least_squares(np.eye(3), x), x, rtol=1e-15)

    def test_overdetermined_consistent(self, rng):
        M = rng.normal(size=(20, 5))
        v = rng.normal(size=5)
        np.testing.assert_allclose(dense_least_squares(M, M @ v), v, atol=1e-10)

    def test_zero(self):
        with pytest.raises(DegenerateDesign):
            dense_least_squares(np.zeros((3, 2)), np.ones(3))

    def test_minimum_norm_underdetermined(self, rng):
        M = rng.normal(size=(3, 6))
        x = rng.normal(size=3)
        v = dense_least_squares(M, x)
        np.testing.assert_allclose(M @ v, x, atol=1e-12)
        # orthogonal to the null space
        null = np.linalg.svd(M)[2][3:]
        np.testing.assert_allclose(null @ v, 0, atol=1e-12)

    @pytest.mark.parametrize("role", list(Role))
    def test_matches_estimator(self, rng, role):
        p = random_problem(rng, role, 8)
        np.testing.assert_allclose(least_squares_for(p), least_squares_solution(p), atol=1e-8, rtol=0)

    def test_accepts_design_matrix(self, rng):
        p = random_problem(rng, Role.ILLUMINATION, 6)
        np.testing.assert_allclose(dense_least_squares(p.design, p.observation_vector),
                                   least_squares_solution(p), atol=1e-8)
