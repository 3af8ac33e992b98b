import math

import numpy as np
import pytest

from blda2d import (
    DegenerateDataError,
    SingularCovarianceError,
    bhattacharyya_error,
    bound_report,
    chord_coefficient,
    class_statistics,
    direction_sweep,
    projected_model,
    verify_bound,
)

from conftest import random_dataset


def scalar_fixture():
    """Two 1x1-matrix classes: means +-1, pooled projected covariance 1."""
    images = np.array([[[1.5]], [[0.5]], [[-1.5]], [[-0.5]]])
    labels = np.array([1, 1, 2, 2])
    return images, labels


class TestProjectedModel:
    def test_e1_second_row_direction(self, e1):
        images, labels = e1
        model = projected_model(images, labels, [0.0, 1.0])
        np.testing.assert_array_equal(model.class_means, [[0.0, 1.0], [0.0, 1.0]])
        np.testing.assert_array_equal(model.covariance, [[0.0, 0.0], [0.0, 4.0]])
        assert float(np.trace(model.covariance)) == 4.0

    def test_e1_first_row_direction_has_zero_covariance(self, e1):
        images, labels = e1
        model = projected_model(images, labels, [1.0, 0.0])
        np.testing.assert_array_equal(model.covariance, np.zeros((2, 2)))

    def test_zero_spread_data(self):
        images = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])
        model = projected_model(images, [1, 2], [1.0])
        np.testing.assert_array_equal(model.covariance, np.zeros((2, 2)))

    def test_trace_matches_projected_within_sum(self):
        rng = np.random.default_rng(50)
        images, labels = random_dataset(rng)
        w = rng.normal(0.0, 1.0, images.shape[1])
        w /= np.linalg.norm(w)
        model = projected_model(images, labels, w)
        stats = class_statistics(images, labels)
        total = 0.0
        for index in range(images.shape[0]):
            mean = stats.class_means[int(np.searchsorted(stats.classes, labels[index]))]
            total += float(np.sum((w @ (images[index] - mean)) ** 2))
        trace = float(np.trace(model.covariance))
        assert abs(trace - total) <= 1e-9 * max(abs(total), 1e-300)

    def test_non_unit_direction_rejected(self, e1):
        images, labels = e1
        with pytest.raises(ValueError, match="unit norm"):
            projected_model(images, labels, [2.0, 0.0])


class TestBhattacharyyaError:
    def test_identical_class_means_give_half(self):
        images = np.array([[[0.5]], [[-0.5]], [[0.5]], [[-0.5]]])
        labels = np.array([1, 1, 2, 2])
        model = projected_model(images, labels, [1.0])
        assert bhattacharyya_error(model) == pytest.approx(0.5, abs=1e-12)

    def test_scalar_closed_form(self):
        images, labels = scalar_fixture()
        model = projected_model(images, labels, [1.0])
        expected = 0.5 * math.exp(-0.5)
        assert bhattacharyya_error(model) == pytest.approx(expected, abs=1e-12)

    def test_singular_covariance_rejected(self, e1):
        images, labels = e1
        model = projected_model(images, labels, [1.0, 0.0])
        with pytest.raises(SingularCovarianceError):
            bhattacharyya_error(model)

    def test_error_within_prior_bound(self):
        rng = np.random.default_rng(51)
        for _ in range(10):
            images, labels = random_dataset(rng, d1=4, d2=3, per_class=10)
            w = rng.normal(0.0, 1.0, 4)
            w /= np.linalg.norm(w)
            model = projected_model(images, labels, w)
            stats = class_statistics(images, labels)
            prior_sum = 0.0
            for i in range(stats.n_classes):
                for j in range(i + 1, stats.n_classes):
                    prior_sum += math.sqrt(stats.priors[i] * stats.priors[j])
            error = bhattacharyya_error(model)
            assert 0.0 < error <= prior_sum


class TestChordCoefficient:
    def test_limit_at_zero(self):
        assert chord_coefficient(0.0) == 1.0
        assert chord_coefficient(1e-8) == pytest.approx(1.0, abs=1e-6)

    def test_in_unit_interval(self):
        for cap in (1e-6, 0.1, 1.0, 10.0, 100.0):
            value = chord_coefficient(cap)
            assert 0.0 < value <= 1.0

    def test_chord_dominates_exponential(self):
        cap = 2.5
        a = chord_coefficient(cap)
        for z in np.linspace(0.0, cap, 50):
            assert math.exp(-z) <= 1.0 - a * z + 1e-12

    def test_negative_cap_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            chord_coefficient(-1.0)


class TestBoundReport:
    def test_identical_means_case(self):
        images = np.array([[[0.5]], [[-0.5]], [[0.5]], [[-0.5]]])
        labels = np.array([1, 1, 2, 2])
        report = bound_report(images, labels, [1.0], 1.0)
        # the between term vanishes and the adaptive weight is zero,
        # leaving exactly the prior sum on the bound side
        assert report.bound == pytest.approx(0.5, abs=1e-12)
        assert report.error == pytest.approx(0.5, abs=1e-12)
        assert report.margin == pytest.approx(0.0, abs=1e-12)

    def test_scalar_fixture_margin_non_negative(self):
        images, labels = scalar_fixture()
        model = projected_model(images, labels, [1.0])
        # cap at the one pair exponent: (1/8) * 4 = 0.5
        report = bound_report(images, labels, [1.0], 0.5)
        assert report.exponent_cap == 0.5
        assert 0.0 < report.chord_coefficient <= 1.0
        assert report.margin >= -1e-9
        assert report.error == pytest.approx(bhattacharyya_error(model), abs=1e-15)

    def test_propagates_singular_covariance(self, e1):
        images, labels = e1
        with pytest.raises(SingularCovarianceError):
            bound_report(images, labels, [1.0, 0.0], 1.0)


class TestVerifyBound:
    def test_well_conditioned_dataset_succeeds(self):
        rng = np.random.default_rng(52)
        images, labels = random_dataset(rng, d1=5, d2=4, n_classes=3, per_class=15)
        assert verify_bound(images, labels, 100, seed=9) == 1.0

    def test_zero_spread_dataset_degenerate(self):
        images = np.array([[[1.0, 0.0]], [[0.0, 1.0]], [[1.0, 0.0]], [[0.0, 1.0]]])
        labels = np.array([1, 2, 1, 2])
        with pytest.raises(DegenerateDataError):
            verify_bound(images, labels, 5, seed=0)

    def test_zero_trials_vacuous(self, e1):
        images, labels = e1
        assert verify_bound(images, labels, 0) == 1.0

    def test_sweep_is_seed_deterministic(self):
        rng = np.random.default_rng(53)
        images, labels = random_dataset(rng, d1=4, d2=3, per_class=10)
        first = direction_sweep(images, labels, 10, seed=4)
        second = direction_sweep(images, labels, 10, seed=4)
        for a, b in zip(first, second):
            assert a.report.margin == b.report.margin
            assert a.report.exponent_cap == b.report.exponent_cap

    def test_margins_hold_across_datasets(self):
        rng = np.random.default_rng(54)
        for _ in range(5):
            images, labels = random_dataset(
                rng,
                d1=int(rng.integers(2, 6)),
                d2=int(rng.integers(2, 5)),
                n_classes=int(rng.integers(2, 4)),
                per_class=12,
            )
            checks = direction_sweep(images, labels, 20, seed=6)
            for check in checks:
                assert not check.degenerate
                assert check.chain_ok
                assert check.report.margin >= -1e-9

    def test_negative_trials_rejected(self, e1):
        images, labels = e1
        with pytest.raises(ValueError, match="non-negative"):
            verify_bound(images, labels, -1)
