#!/usr/bin/python
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ShiftLab.base.factory import Registrable
from ShiftLab.base.selective import Hypothesis, sign
from ShiftLab.errors import DimensionMismatchError


class MembershipOracle(object):
    """
    Label oracle for arbitrary query points.

    ``query_count`` grows by exactly one per queried point, batched or not.
    Subclasses implement :meth:`_answer`.
    """

    def __init__(self, dimension):
        self._dimension = int(dimension)
        self._query_count = 0

    def __repr__(self):
        return '<{}(n={}, queries={}) object at {}>'.format(
            self.__class__.__name__, self._dimension, self._query_count,
            hex(id(self)))

    @property
    def dimension(self):
        return self._dimension

    @property
    def query_count(self):
        return self._query_count

    def _answer(self, points):
        raise NotImplementedError

    def query_many(self, points):
        """
        Args:
            points (np.ndarray): ``(size, n)`` query points.

        Returns:
            np.ndarray: ``(size,)`` labels in {+1, -1}.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self._dimension:
            raise DimensionMismatchError(
                'oracle expects dimension {}, got {}'.format(
                    self._dimension, points.shape[1]))
        labels = self._answer(points)
        self._query_count += len(points)
        return labels

    def query(self, point):
        return int(self.query_many(np.asarray(point, dtype=float)[None, :])[0])


class HalfspaceOracle(MembershipOracle):
    """
    Answers ``sign(w . x - theta)`` with ``sign(0) = +1``.

    Args:
        w (np.ndarray): normal vector.
        theta (float): threshold, 0 for homogeneous targets.
    """

    def __init__(self, w, theta=0.0):
        w = np.asarray(w, dtype=float)
        super(HalfspaceOracle, self).__init__(len(w))
        self.w = w
        self.theta = float(theta)

    def _answer(self, points):
        return sign(points @ self.w - self.theta)


class FunctionOracle(MembershipOracle):
    """
    Oracle answering with a vectorized concept callable.
    """

    def __init__(self, concept, dimension):
        super(FunctionOracle, self).__init__(dimension)
        self._concept = concept

    def _answer(self, points):
        return np.asarray(self._concept(points), dtype=int)


@dataclass(frozen=True)
class Accept:
    """
    TDS learner outcome carrying the learned hypothesis.
    """
    hypothesis: Hypothesis
    accepted = True


@dataclass(frozen=True)
class Reject:
    """
    TDS learner outcome when the test sample looks shifted.
    """
    accepted = False


class TdsLearner(Registrable):
    """
    Black-box testable learner.

    ``run`` takes labeled train samples and unlabeled test samples and
    returns :class:`Accept` or :class:`Reject`. It reads at most
    ``sample_complexity(eps)`` points from each input.
    """

    __identifier__ = 'ShiftLab.learners'

    #: reported multiplicative accuracy constant (agnostic runs only).
    accuracy_constant = 1.0

    #: True when ``run`` never consumes its random stream.
    deterministic = False

    def sample_complexity(self, eps):
        raise NotImplementedError

    def run(self, train, test, eps, delta, rng):
        """
        Args:
            train (LabeledBatch): labeled train examples.
            test (np.ndarray): ``(size, n)`` unlabeled test points.
            eps (float): accuracy parameter.
            delta (float): failure probability.
            rng (np.random.Generator): random stream.

        Returns:
            Accept or Reject: outcome.
        """
        raise NotImplementedError

    @property
    def params(self):
        return {}

    @property
    def to_dict(self):
        return {'type_': self.type_, 'params': self.params}
