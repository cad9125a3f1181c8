import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ordqr import _backend
from ordqr.errors import DatasetError, DomainError, NotSPDError, RankDeficientError, TooFewCategoriesError
from ordqr.model import (OrdinalDataset, PriorOr1, PriorOr2, delta_to_gamma, gamma_to_delta,
                         neg_log_lik_or1, neg_log_lik_or2, or2_cutpoints, outcome_probs_or1,
                         outcome_probs_or2, recode_outcomes)

HALF_EXP = 0.5 * math.exp(-0.5)


def al_cdf_hand(u, p):
    # standard AL(0, 1, p) distribution function, written out independently
    return p * math.exp((1 - p) * u) if u <= 0 else 1 - (1 - p) * math.exp(-p * u)


class TestTransforms:
    def test_unit_spacing(self):
        g = delta_to_gamma([0.0, 0.0], J=4)
        assert np.array_equal(g[1:-1], [0.0, 1.0, 2.0])
        assert g[0] == -np.inf and g[-1] == np.inf

    def test_simulation_cutpoints(self):
        g = delta_to_gamma([math.log(2), math.log(2)], J=4)
        assert np.allclose(g[1:-1], [0, 2, 4], atol=1e-15)

    def test_inverse_examples(self):
        assert np.allclose(gamma_to_delta([0.0, 2.0, 4.0]), [math.log(2)] * 2, atol=1e-15)
        assert np.array_equal(gamma_to_delta([0.0, 1.0, 2.0]), [0.0, 0.0])
        assert np.array_equal(gamma_to_delta([-np.inf, 0.0, 1.0, 2.0, np.inf]), [0.0, 0.0])

    def test_non_monotone_rejected(self):
        with pytest.raises(DomainError):
            gamma_to_delta([0.0, 2.0, 1.0])
        with pytest.raises(DomainError):
            gamma_to_delta([1.0, 2.0])

    def test_wrong_length(self):
        with pytest.raises(DomainError):
            delta_to_gamma([0.0], J=4)

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
    def test_round_trip(self, delta):
        delta = np.array(delta)
        g = delta_to_gamma(delta)
        assert np.all(np.diff(g) > 0)
        assert np.allclose(gamma_to_delta(g), delta, atol=1e-9)

    def test_or2_cutpoints(self):
        assert np.array_equal(or2_cutpoints(3.0), [-np.inf, 0.0, 3.0, np.inf])
        with pytest.raises(DomainError):
            or2_cutpoints(0.0)


class TestOutcomeProbs:
    def test_hand_triple(self):
        g = delta_to_gamma([0.0])
        pr = outcome_probs_or1(np.array([1.0]), np.array([0.0]), g, 0.5)
        expected = (0.5, 1 - HALF_EXP - 0.5, HALF_EXP)
        assert np.allclose(pr, expected, atol=1e-12)
        assert np.allclose(pr, (0.5, 0.196734, 0.303265), atol=1e-6)

    @given(st.floats(0.05, 0.95), st.floats(-3, 3), st.lists(st.floats(-3, 1.5), min_size=1, max_size=5))
    def test_simplex(self, p, mu, delta):
        g = delta_to_gamma(delta)
        pr = outcome_probs_or1(np.array([1.0]), np.array([mu]), g, p)
        assert pr.shape == (len(delta) + 2,)
        assert np.all(pr >= 0)
        assert abs(pr.sum() - 1) < 1e-12

    def test_matches_hand_cdf(self):
        g = delta_to_gamma([0.4, -0.3])
        x, beta = np.array([1.0, 0.7]), np.array([0.2, 0.9])
        mu = x @ beta
        cuts = [-np.inf] + list(g[1:-1]) + [np.inf]
        F = [0.0] + [al_cdf_hand(c - mu, 0.3) for c in cuts[1:-1]] + [1.0]
        assert np.allclose(outcome_probs_or1(x, beta, g, 0.3), np.diff(F), atol=1e-14)

    def test_extreme_predictor(self):
        g = delta_to_gamma([0.0, 0.0])
        pr = outcome_probs_or1(np.array([1.0]), np.array([400.0]), g, 0.25)
        assert pr[-1] == pytest.approx(1.0, abs=1e-12)

    def test_or2_sigma_one_matches_or1(self):
        g = or2_cutpoints(3.0)
        x = np.array([[1.0, 0.2], [1.0, 0.9]])
        beta = np.array([0.5, 1.5])
        a = outcome_probs_or2(x, beta, 1.0, g, 0.25)
        b = outcome_probs_or1(x, beta, g, 0.25)
        assert np.array_equal(a, b)

    def test_or2_large_sigma_limit(self):
        pr = outcome_probs_or2(np.array([1.0]), np.array([0.0]), 1e6, or2_cutpoints(3.0), 0.3)
        assert pr[0] == pytest.approx(0.3, abs=1e-12)
        assert pr[1] < 1e-5
        assert pr[2] == pytest.approx(0.7, abs=1e-5)

    def test_or2_bad_sigma(self):
        with pytest.raises(DomainError):
            outcome_probs_or2(np.array([1.0]), np.array([0.0]), 0.0, or2_cutpoints(3.0), 0.3)


class TestLikelihood:
    def test_single_observation_ln2(self):
        # the y=1 rows of an intercept-only model at beta=0, gamma=(0,1), p=0.5
        ds = OrdinalDataset(np.array([1, 2, 3]), np.ones((3, 1)))
        per_obs, total = neg_log_lik_or1(ds, [0.0], [0.0], 0.5)
        assert per_obs[0] == pytest.approx(math.log(2), abs=1e-12)
        expected = -math.log(0.5) - math.log(1 - HALF_EXP - 0.5) - math.log(HALF_EXP)
        assert total == pytest.approx(expected, abs=1e-12)

    def test_or2_single_term_by_hand(self):
        ds = OrdinalDataset(np.array([1, 2, 3]), np.column_stack([np.ones(3), [0.1, 0.5, 0.9]]))
        beta, sigma, p = np.array([0.4, 2.0]), 1.7, 0.25
        terms = neg_log_lik_or2(ds, beta, sigma, or2_cutpoints(3.0), p, per_obs=True)
        mu = 0.4 + 2.0 * 0.5
        prob = al_cdf_hand((3 - mu) / sigma, p) - al_cdf_hand((0 - mu) / sigma, p)
        assert terms[1] == pytest.approx(-math.log(prob), abs=1e-12)

    def test_or2_sigma_one_matches_or1(self, small_or2):
        beta = np.array([-3.0, 5.0, 4.0])
        a = neg_log_lik_or2(small_or2, beta, 1.0, or2_cutpoints(3.0), 0.25)
        b = neg_log_lik_or1(small_or2, beta, [math.log(3.0)], 0.25)[1]
        assert a == pytest.approx(b, rel=1e-13)

    def test_permutation_invariance(self, small_or1):
        perm = np.random.default_rng(0).permutation(small_or1.n)
        shuffled = OrdinalDataset(small_or1.y[perm], small_or1.X[perm])
        beta, delta = np.array([-3.5, 4.0, 5.5]), np.array([0.6, 0.7])
        a = neg_log_lik_or1(small_or1, beta, delta, 0.25)
        b = neg_log_lik_or1(shuffled, beta, delta, 0.25)
        assert np.array_equal(a[0][perm], b[0])
        assert a[1] == pytest.approx(b[1], rel=1e-14)

    def test_floor_keeps_finite(self, toy_dataset):
        per_obs, total = neg_log_lik_or1(toy_dataset, [500.0, 0.0], [0.0], 0.5)
        assert np.all(np.isfinite(per_obs))
        assert total > 0

    def test_shape_mismatch(self, toy_dataset):
        with pytest.raises(DomainError):
            neg_log_lik_or1(toy_dataset, [0.0, 0.0, 0.0], [0.0], 0.5)
        with pytest.raises(DomainError):
            neg_log_lik_or1(toy_dataset, [0.0, 0.0], [0.0, 0.0], 0.5)

    @pytest.mark.skipif("compiled" not in _backend.available(), reason="extension not built")
    def test_backends_agree(self, small_or1):
        beta, delta = np.array([-3.5, 4.0, 5.5]), np.array([0.6, 0.7])
        try:
            _backend.set_backend("python")
            a = neg_log_lik_or1(small_or1, beta, delta, 0.25)[0]
            _backend.set_backend("compiled")
            b = neg_log_lik_or1(small_or1, beta, delta, 0.25)[0]
        finally:
            _backend.set_backend("auto")
        assert np.allclose(a, b, rtol=1e-13, atol=0)


class TestDataset:
    def test_recode(self):
        codes, levels = recode_outcomes([9, 2, 5, 2, 9])
        assert codes.tolist() == [3, 1, 2, 1, 3]
        assert levels.tolist() == [2, 5, 9]

    def test_empty_category(self):
        with pytest.raises(DatasetError, match=r"\[2\]"):
            OrdinalDataset(np.array([1, 3, 3]), np.ones((3, 1)))

    def test_too_few(self):
        with pytest.raises(TooFewCategoriesError):
            OrdinalDataset(np.array([1, 2, 2]), np.ones((3, 1)))

    def test_rank_deficient(self):
        X = np.column_stack([np.ones(4), np.ones(4)])
        with pytest.raises(RankDeficientError):
            OrdinalDataset(np.array([1, 2, 3, 3]), X)

    def test_non_integer_codes(self):
        with pytest.raises(DatasetError):
            OrdinalDataset(np.array([1, 2.5, 3]), np.ones((3, 1)))

    def test_length_mismatch(self):
        with pytest.raises(DatasetError):
            OrdinalDataset(np.array([1, 2, 3]), np.ones((4, 1)))

    def test_immutable(self, toy_dataset):
        with pytest.raises(ValueError):
            toy_dataset.X[0, 0] = 3.0
        assert toy_dataset.J == 3 and toy_dataset.k == 2 and toy_dataset.n == 7
        assert toy_dataset.counts().tolist() == [2, 2, 3]


class TestPriors:
    def test_defaults(self):
        pr = PriorOr1.default(3, 4)
        assert pr.D0.shape == (2, 2) and pr.B0.shape == (3, 3)
        assert np.allclose(pr.B0_chol @ pr.B0_chol.T, pr.B0)
        assert PriorOr2.default(2).n0 == 5.0

    def test_not_spd(self):
        with pytest.raises(NotSPDError):
            PriorOr1(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), np.zeros(1), np.eye(1))

    def test_dimension_checked(self):
        with pytest.raises(DomainError):
            PriorOr2(np.zeros(2), np.eye(3))

    def test_or2_hyper_positive(self):
        with pytest.raises(DomainError):
            PriorOr2(np.zeros(1), np.eye(1), n0=0.0)
