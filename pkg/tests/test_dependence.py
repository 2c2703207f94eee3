import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from circclust.dependence import (
    CQAFeatureExtractor,
    arc_indicator_prob,
    circular_acf_features,
    cqa,
    cqa_features,
    cqa_features_grid,
    joint_arc_indicator_prob,
    qa,
    qa_features,
    rho_fl,
    rho_js,
)
from circclust.exceptions import InvalidLagError

import oracles

TWO_PI = 2 * math.pi


def random_series(rng, T):
    # mixture of clustered and spread angles, wrapped across zero
    return np.mod(rng.vonmises(0.0, 1.0, T) + rng.normal(0, 0.3, T), TWO_PI)


class TestArcProbabilities:
    def test_full_circle_limit(self, rng):
        assert arc_indicator_prob(rng.uniform(0, TWO_PI, 50), 0.3, math.pi - 1e-12) == 1.0

    def test_constant_series(self):
        assert arc_indicator_prob([1.3] * 10, 0.5, 0.1) == 1.0

    def test_uniform_grid_counting(self):
        xs = np.arange(100) * TWO_PI / 100
        p = arc_indicator_prob(xs, 0.5, math.pi / 2)
        q = oracles.quantile(xs, 0.5)
        count = sum(oracles.in_arc(x, q, math.pi / 2) for x in xs) / 100
        assert p == pytest.approx(count)
        assert abs(p - 0.5) <= 0.01 + 1e-12

    def test_joint_constant_series(self):
        assert joint_arc_indicator_prob([2.0] * 8, 0.2, 0.7, 0.3, 2) == arc_indicator_prob([2.0] * 8, 0.2, 0.3)

    def test_joint_last_lag_single_term(self):
        xs = [0.1, 0.2, 3.0, 0.15]
        # only pair (theta_1, theta_4): both near the median, inside radius 0.5
        assert joint_arc_indicator_prob(xs, 0.5, 0.5, 0.5, 3) == 1.0

    def test_joint_hand_series(self):
        xs = [0.1, 0.5, 2.0, 0.3, 4.0, 0.2, 0.4, 5.5, 0.6, 1.0]
        q = oracles.quantile(xs, 0.5)
        inside = [oracles.in_arc(x, q, 1.0) for x in xs]
        expected = sum(inside[i] and inside[i + 1] for i in range(9)) / 9
        assert joint_arc_indicator_prob(xs, 0.5, 0.5, 1.0, 1) == pytest.approx(expected)

    def test_palindrome_symmetry(self, rng):
        half = list(rng.uniform(0, TWO_PI, 10))
        xs = half + half[::-1]
        for lag in (1, 3):
            assert joint_arc_indicator_prob(xs, 0.2, 0.8, 0.9, lag) == pytest.approx(
                joint_arc_indicator_prob(xs, 0.8, 0.2, 0.9, lag)
            )

    def test_lag_too_large(self):
        with pytest.raises(InvalidLagError):
            joint_arc_indicator_prob([1.0, 2.0, 3.0], 0.5, 0.5, 0.5, 3)


class TestCQA:
    def test_independent_noise_near_zero(self):
        rng = np.random.default_rng(3)
        xs = np.mod(rng.normal(1.0, 1.0, 10_000), TWO_PI)
        assert abs(cqa(xs, 0.5, 0.5, 1, 0.7)) < 0.05

    def test_constant_series_is_zero(self):
        assert cqa([0.4] * 20, 0.1, 0.9, 1, 0.5) == 0.0

    def test_hand_series(self):
        xs = [0.2, 0.4, 3.0, 3.2, 0.3, 5.9, 0.1, 2.9, 3.1, 0.5, 6.1, 1.0]
        assert cqa(xs, 0.5, 0.5, 1, 1.0) == pytest.approx(oracles.cqa(xs, 0.5, 0.5, 1, 1.0), abs=1e-12)

    def test_matches_oracle_on_short_series(self, rng):
        for _ in range(60):
            T = int(rng.integers(3, 31))
            xs = random_series(rng, T)
            tau, tau2 = rng.uniform(size=2)
            lag = int(rng.integers(1, T))
            r = float(rng.uniform(0, 3.1))
            assert cqa(xs, tau, tau2, lag, r) == pytest.approx(oracles.cqa(list(xs), tau, tau2, lag, r), abs=1e-12)

    def test_features_shape_and_elementwise(self, rng):
        xs = random_series(rng, 200)
        f = cqa_features(xs, lags=(1, 3), levels=(0.1, 0.5, 0.9), r=0.8)
        assert f.values.shape == (2, 3, 3)
        assert np.all(np.abs(f.values) <= 1)
        for k, lag in enumerate(f.lags):
            for i, t1 in enumerate(f.levels):
                for j, t2 in enumerate(f.levels):
                    assert f.values[k, i, j] == pytest.approx(cqa(xs, t1, t2, lag, 0.8), abs=1e-14)

    def test_grid_matches_single_radius(self, rng):
        xs = random_series(rng, 150)
        grid = cqa_features_grid(xs, (1, 2), (0.2, 0.8), [0.3, 1.1])
        for feats in grid:
            np.testing.assert_allclose(feats.values, cqa_features(xs, (1, 2), (0.2, 0.8), feats.radius).values)

    def test_invalid_lag(self):
        with pytest.raises(InvalidLagError):
            cqa_features([0.1, 0.2, 0.3], lags=(3,))

    def test_rotation_invariance(self, rng):
        xs = rng.vonmises(1.0, 1.5, 101) % TWO_PI
        a = cqa_features(xs, (1, 2), (0.1, 0.5, 0.9), 0.7).values
        b = cqa_features(np.mod(xs + 2.0, TWO_PI), (1, 2), (0.1, 0.5, 0.9), 0.7).values
        np.testing.assert_allclose(a, b, atol=1e-12)


class TestCircularAutocorrelation:
    def test_fl_linear_series(self):
        xs = np.mod(0.3 * np.arange(50), TWO_PI)
        for lag in (1, 4):
            assert rho_fl(xs, lag) == pytest.approx(1.0)

    @pytest.mark.parametrize("fn", [rho_fl, rho_js])
    def test_constant_series(self, fn):
        assert fn([2.0] * 12, 1) == 0.0

    def test_fl_hand_series(self):
        xs = [0.1, 1.2, 2.9, 0.4, 5.5, 3.3, 0.8, 6.0]
        assert rho_fl(xs, 1) == pytest.approx(oracles.rho_fl(xs, 1), abs=1e-12)

    def test_js_periodic(self):
        xs = [0.3, 1.9, 4.0] * 6
        assert rho_js(xs, 3) == pytest.approx(1.0)

    def test_js_hand_series(self):
        xs = [0.1, 1.2, 2.9, 0.4, 5.5, 3.3, 0.8, 6.0]
        assert rho_js(xs, 1) == pytest.approx(oracles.rho_js(xs, 1), abs=1e-12)

    def test_match_oracles_on_short_series(self, rng):
        for _ in range(60):
            T = int(rng.integers(4, 31))
            xs = random_series(rng, T)
            lag = int(rng.integers(1, T - 1))
            assert rho_fl(xs, lag) == pytest.approx(oracles.rho_fl(list(xs), lag), abs=1e-12)
            assert rho_js(xs, lag) == pytest.approx(oracles.rho_js(list(xs), lag), abs=1e-12)

    def test_rotation_invariance(self, rng):
        xs = random_series(rng, 80)
        ys = np.mod(xs + 1.234, TWO_PI)
        for lag in (1, 2, 5):
            assert rho_fl(ys, lag) == pytest.approx(rho_fl(xs, lag), abs=1e-12)
            assert rho_js(ys, lag) == pytest.approx(rho_js(xs, lag), abs=1e-12)

    def test_needs_two_pairs(self):
        with pytest.raises(InvalidLagError):
            rho_fl([0.1, 0.2, 0.3], 2)

    def test_features(self, rng):
        xs = random_series(rng, 60)
        f = circular_acf_features(xs, (1, 2, 3), "FL")
        assert f.kind == "FL" and f.values.shape == (3,)
        assert f.values[1] == pytest.approx(rho_fl(xs, 2))
        with pytest.raises(ValueError):
            circular_acf_features(xs, (1,), "XX")

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(5, 300))
    def test_bounded(self, seed, T):
        rng = np.random.default_rng(seed)
        xs = rng.uniform(0, TWO_PI, T)
        lag = int(rng.integers(1, T - 1))
        assert -1 <= rho_fl(xs, lag) <= 1
        assert -1 <= rho_js(xs, lag) <= 1
        assert -1 <= cqa(xs, rng.uniform(), rng.uniform(), lag, rng.uniform(0, 3.1)) <= 1


class TestQA:
    def test_independent_noise_near_zero(self):
        ys = np.random.default_rng(4).standard_normal(10_000)
        assert abs(qa(ys, 0.5, 0.5, 1)) < 0.02

    def test_zero_level(self, rng):
        ys = rng.standard_normal(500)
        assert abs(qa(ys, 0.0, 0.5, 1)) < 0.01

    def test_hand_series(self):
        ys = [0.5, -1.2, 0.3, 2.2, -0.7, 0.0, 1.1, -0.4, 0.9, -2.0]
        assert qa(ys, 0.3, 0.6, 2) == pytest.approx(oracles.qa(ys, 0.3, 0.6, 2), abs=1e-12)

    def test_matches_oracle(self, rng):
        for _ in range(50):
            T = int(rng.integers(2, 31))
            ys = rng.standard_normal(T)
            tau, tau2 = rng.uniform(size=2)
            lag = int(rng.integers(1, T))
            assert qa(ys, tau, tau2, lag) == pytest.approx(oracles.qa(list(ys), tau, tau2, lag), abs=1e-12)

    def test_features(self, rng):
        ys = rng.standard_normal(300)
        f = qa_features(ys, (1, 2), (0.1, 0.5, 0.9))
        assert f.values.shape == (2, 3, 3)
        assert np.all(np.abs(f.values) <= 0.25)
        assert f.values[1, 0, 2] == pytest.approx(qa(ys, 0.1, 0.9, 2))


class TestExtractor:
    def test_params_and_clone(self):
        est = CQAFeatureExtractor(lags=(1, 2), radius=1.1)
        assert est.get_params()["radius"] == 1.1
        assert clone(est).get_params() == est.get_params()

    def test_transform(self, rng):
        data = [random_series(rng, T) for T in (100, 150, 120)]
        X = CQAFeatureExtractor(lags=(1, 2)).fit(data).transform(data)
        assert X.shape == (3, 18)
        np.testing.assert_allclose(X[1], cqa_features(data[1], (1, 2), (0.1, 0.5, 0.9), 0.7).values.ravel())

    def test_not_fitted(self, rng):
        with pytest.raises(NotFittedError):
            CQAFeatureExtractor().transform([random_series(rng, 20)])
