import json

import numpy as np
import pytest

from ShiftLab.base.oracles import HalfspaceOracle
from ShiftLab.errors import DegenerateQueryError, DimensionMismatchError, SerializationError
from ShiftLab.halfspaces.pq_halfspace import (
    HalfspacePqClassifier,
    LiftedOracle,
    LiftedPqClassifier,
    evaluate_selective,
    homogenize,
    learn_general_halfspace,
    learn_halfspace,
    lifted_query,
    load_classifier,
)
from ShiftLab.harness.scenarios import boundary_points

EPS = 0.1
SAMPLE_COUNT = 100000


def _sphere(rng, size, n):
    points = rng.standard_normal((size, n))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _labels(points, w, theta=0.0):
    return np.where(points @ w - theta >= 0.0, 1, -1)


class TestLift:

    def test_homogenize_puts_constant_first(self):
        np.testing.assert_array_equal(homogenize(np.array([2.0, 3.0])), [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(homogenize(np.zeros((2, 1))), [[1.0, 0.0], [1.0, 0.0]])

    def test_lifted_answers_match_target(self, rng):
        w, theta = np.array([0.6, 0.8]), 0.3
        oracle = LiftedOracle(HalfspaceOracle(w, theta))
        queries = rng.standard_normal((500, 3))
        lifted_w = np.concatenate([[-theta], w])
        np.testing.assert_array_equal(oracle.query_many(queries), _labels(queries, lifted_w))
        assert lifted_query(HalfspaceOracle(w, theta), queries[0]) == oracle.query(queries[0])

    def test_zero_lift_coordinate(self):
        oracle = LiftedOracle(HalfspaceOracle([1.0, 0.0]))
        with pytest.raises(DegenerateQueryError):
            oracle.query_many(np.array([[0.0, 1.0, 0.0]]))
        with pytest.raises(DegenerateQueryError):
            lifted_query(HalfspaceOracle([1.0, 0.0]), np.array([0.0, 1.0, 0.0]))

    def test_lift_coordinate_comes_first(self, rng):
        w, theta = np.array([0.6, -0.8]), 0.3
        target = HalfspaceOracle(w, theta)
        for x in rng.standard_normal((50, 2)):
            assert lifted_query(target, homogenize(x)) == target.query(x)
            # scaling by c = -2 flips the answer of f(x / c)
            p = np.concatenate([[-2.0], x])
            assert lifted_query(target, p) == -target.query(x / -2.0)
            assert lifted_query(target, p) == (1 if p @ np.concatenate([[-theta], w]) >= 0 else -1)


class TestLearnHalfspace:

    @pytest.mark.parametrize('n', [2, 3, 5])
    def test_zero_selective_error(self, rng, n):
        w = _sphere(rng, 1, n)[0]
        oracle = HalfspaceOracle(w)
        train = _sphere(rng, 500, n)
        classifier = learn_halfspace(train, EPS, 0.1, oracle, rng, sample_count=SAMPLE_COUNT)
        trace = classifier.trace
        assert trace.exit_reason == 'mass'
        assert trace.residual_fraction < EPS / 2
        assert trace.query_count == oracle.query_count <= 1e7
        assert trace.rounds == len(trace.stage_dimensions)

        selected, _ = classifier.evaluate_many(train)
        assert np.mean(~selected) < EPS / 2

        fresh = _sphere(rng, 5000, n)
        selected, labels = classifier.evaluate_many(fresh)
        assert np.mean(~selected) <= 0.3
        np.testing.assert_array_equal(labels[selected], _labels(fresh, w)[selected])

        hard = boundary_points(rng, w, 5000, 1e-3)
        selected, labels = classifier.evaluate_many(hard)
        np.testing.assert_array_equal(labels[selected], _labels(hard, w)[selected])

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            learn_halfspace(_sphere(rng, 10, 3), EPS, 0.1, HalfspaceOracle([1.0, 0.0]), rng)

    def test_unselected_default(self):
        classifier = HalfspacePqClassifier(2)
        assert evaluate_selective(classifier, np.array([1.0, 0.0])) == (0, 1)
        with pytest.raises(DimensionMismatchError):
            evaluate_selective(classifier, np.array([1.0, 0.0, 0.0]))


class TestLearnGeneralHalfspace:

    def test_threshold_target(self, rng):
        w, theta = np.array([0.6, -0.8]), 0.3
        oracle = HalfspaceOracle(w, theta)
        train = rng.standard_normal((500, 2))
        classifier = learn_general_halfspace(train, EPS, 0.1, oracle, rng,
                                             sample_count=SAMPLE_COUNT)
        assert isinstance(classifier, LiftedPqClassifier)
        assert classifier.dimension == 2
        assert classifier.trace.exit_reason == 'mass'

        fresh = rng.standard_normal((5000, 2))
        offsets = rng.uniform(-1e-3, 1e-3, 5000)
        along = rng.uniform(-3.0, 3.0, 5000)
        near = np.outer(theta + offsets, w) + np.outer(along, [w[1], -w[0]])
        for points in (fresh, near):
            selected, labels = classifier.evaluate_many(points)
            np.testing.assert_array_equal(labels[selected],
                                          _labels(points, w, theta)[selected])

    def test_document(self, rng):
        w = np.array([0.0, 1.0])
        classifier = learn_general_halfspace(rng.standard_normal((200, 2)), 0.2, 0.1,
                                             HalfspaceOracle(w, -0.2), rng, sample_count=20000)
        rebuilt = load_classifier(json.dumps(classifier.to_dict))
        assert isinstance(rebuilt, LiftedPqClassifier)
        points = rng.standard_normal((300, 2))
        for expected, actual in zip(classifier.evaluate_many(points),
                                    rebuilt.evaluate_many(points)):
            np.testing.assert_array_equal(expected, actual)
        with pytest.raises(SerializationError):
            HalfspacePqClassifier.from_dict(classifier.to_dict)
