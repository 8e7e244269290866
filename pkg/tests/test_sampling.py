import math

import numpy as np
import pytest

from ShiftLab.base.pointio import read_points, write_points
from ShiftLab.base.sampling import (
    ConceptLabeledSampler,
    DiscreteSampler,
    EstimateSpec,
    LabeledBatch,
    MixtureSampler,
    SphereSampler,
    estimate_probability,
    rejection_sample,
    rejection_sample_many,
)
from ShiftLab.errors import DimensionMismatchError, SamplerExhaustedError, SerializationError


class TestSamplers:

    def test_sphere_points_are_unit(self, rng):
        points = SphereSampler(5).draw(rng, 1000)
        assert points.shape == (1000, 5)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)

    def test_discrete_rejects_bad_table(self):
        with pytest.raises(ValueError):
            DiscreteSampler([0.5, 0.4])
        with pytest.raises(ValueError):
            DiscreteSampler([1.5, -0.5])

    def test_discrete_frequencies(self, rng):
        sampler = DiscreteSampler([0.1, 0.2, 0.7])
        points = sampler.draw(rng, 100000)
        assert points.shape == (100000, 1)
        counts = np.bincount(points[:, 0].astype(int), minlength=3) / 100000
        sigma = np.sqrt(sampler.probabilities * (1 - sampler.probabilities) / 100000)
        assert np.all(np.abs(counts - sampler.probabilities) <= 4 * sigma)

    def test_mixture_needs_matching_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            MixtureSampler([SphereSampler(2), SphereSampler(3)])

    def test_mixture_weights(self, rng):
        mixture = MixtureSampler([DiscreteSampler([1.0, 0.0]), DiscreteSampler([0.0, 1.0])],
                                 [0.25, 0.75])
        points = mixture.draw(rng, 40000)
        assert abs(points.mean() - 0.75) < 0.01

    def test_label_flips(self, rng):
        sampler = ConceptLabeledSampler(SphereSampler(2), lambda x: np.ones(len(x), dtype=int),
                                        flip_rate=0.2)
        batch = sampler.draw(rng, 100000)
        assert abs(np.mean(batch.labels == -1) - 0.2) < 0.01

    def test_flip_rate_range(self):
        with pytest.raises(ValueError):
            ConceptLabeledSampler(SphereSampler(2), lambda x: x[:, 0], flip_rate=0.5)


class TestLabeledBatch:

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            LabeledBatch(np.zeros((3, 2)), np.ones(2, dtype=int))

    def test_slicing_keeps_pairs(self):
        batch = LabeledBatch(np.arange(6.0).reshape(3, 2), np.array([1, -1, 1]))
        head = batch[:2]
        assert len(head) == 2
        np.testing.assert_array_equal(head.labels, [1, -1])
        assert batch.dimension == 2


class TestEstimates:

    def test_sample_count(self):
        spec = EstimateSpec(0.1, 0.05)
        assert spec.sample_count == math.ceil(math.log(2 / 0.05) / (2 * 0.1 ** 2))

    @pytest.mark.parametrize('gamma, delta', [(0.0, 0.1), (1.0, 0.1), (0.1, 0.0), (0.1, 1.0)])
    def test_invalid_spec(self, gamma, delta):
        with pytest.raises(ValueError):
            EstimateSpec(gamma, delta)

    def test_bernoulli_estimate(self, rng):
        spec = EstimateSpec(0.02, 1e-3)
        estimate = estimate_probability(lambda r, size: r.random(size) < 0.3, spec, rng,
                                        chunk_size=1000)
        assert abs(estimate - 0.3) <= 0.02


class TestRejectionSampling:

    def test_conditional_draws(self, rng):
        base = DiscreteSampler([0.9, 0.1])
        points = rejection_sample_many(base, lambda x, r: x[:, 0] == 1, 500, 10000, rng)
        assert points.shape == (500, 1)
        assert np.all(points == 1)

    def test_zero_size(self, rng):
        points = rejection_sample_many(SphereSampler(3), lambda x, r: np.ones(len(x), bool),
                                       0, 10, rng)
        assert points.shape == (0, 3)

    def test_exhausted(self, rng):
        with pytest.raises(SamplerExhaustedError):
            rejection_sample_many(SphereSampler(2), lambda x, r: np.zeros(len(x), bool),
                                  3, 100, rng)

    def test_labeled_single_draw(self, rng):
        base = ConceptLabeledSampler(DiscreteSampler([0.5, 0.5]),
                                     lambda x: np.where(x[:, 0] > 0, 1, -1))
        point, label = rejection_sample(base, lambda x, r: x.points[:, 0] == 0, 1000, rng)
        assert point[0] == 0.0
        assert label == -1

    def test_randomized_predicate_halves_acceptance(self, rng):
        base = DiscreteSampler([1.0])
        calls = []

        def keep(candidates, r):
            calls.append(len(candidates))
            return r.random(len(candidates)) < 0.5
        rejection_sample_many(base, keep, 1000, 200, rng)
        assert 1500 <= sum(calls) <= 2 ** 16 + 4000


class TestPointFiles:

    def test_labeled_file(self, tmp_path):
        path = str(tmp_path / 'points.csv')
        write_points(path, [[1.0, 0.0], [0.0, -1.0]], labels=[1, -1])
        batch = read_points(path, labeled=True)
        np.testing.assert_array_equal(batch.points, [[1.0, 0.0], [0.0, -1.0]])
        np.testing.assert_array_equal(batch.labels, [1, -1])

    def test_bad_labels(self, tmp_path):
        path = str(tmp_path / 'points.csv')
        write_points(path, [[1.0, 0.0]], labels=[3])
        with pytest.raises(SerializationError):
            read_points(path, labeled=True)
