#!/usr/bin/python
"""
Reference TDS learners on the finite domain ``{0, ..., k-1}``.

Points are ``(size, 1)`` float arrays holding bucket indices, the layout
produced by :class:`ShiftLab.base.sampling.DiscreteSampler`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ShiftLab.base.oracles import Accept, Reject, TdsLearner
from ShiftLab.base.sampling import ConceptLabeledSampler, DiscreteSampler, Sampler
from ShiftLab.base.selective import Hypothesis
from ShiftLab.base.types import TSDScenario
from ShiftLab.constants import ToleranceEnum
from ShiftLab.errors import SerializationError


def buckets(points):
    """
    Bucket indices of discrete points.
    """
    return np.asarray(points, dtype=float).reshape(len(points), -1)[:, 0].astype(int)


class ThresholdHypothesis(Hypothesis):
    """
    ``h(j) = sign`` for ``j >= theta`` and ``-sign`` below.

    ``theta = 0`` and ``theta = k`` give the two constant hypotheses.
    """

    NODE_NAME = 'threshold'

    def __init__(self, theta, sign=1):
        self.theta = int(theta)
        self.sign = 1 if sign >= 0 else -1

    def __repr__(self):
        return '<{}(theta={}, sign={:+d})>'.format(
            self.__class__.__name__, self.theta, self.sign)

    def __eq__(self, other):
        return (isinstance(other, ThresholdHypothesis)
                and (self.theta, self.sign) == (other.theta, other.sign))

    def __hash__(self):
        return hash((self.theta, self.sign))

    def predict(self, points):
        return np.where(buckets(points) >= self.theta, self.sign, -self.sign)

    @property
    def params(self):
        return {'theta': self.theta, 'sign': self.sign}


def threshold_class(k):
    """
    Every threshold hypothesis over ``k`` buckets.
    """
    return [ThresholdHypothesis(theta, sign) for sign in (1, -1) for theta in range(k + 1)]


def erm_threshold(batch, k):
    """
    Threshold with the fewest training mistakes; ties go to the smallest
    ``theta`` with ``sign = +1`` first.

    Args:
        batch (LabeledBatch): labeled discrete points.
        k (int): domain size.

    Returns:
        ThresholdHypothesis: empirical risk minimizer.
    """
    index = buckets(batch.points)
    positives = np.bincount(index[batch.labels > 0], minlength=k)
    negatives = np.bincount(index[batch.labels < 0], minlength=k)
    below_pos = np.concatenate([[0], np.cumsum(positives)])
    below_neg = np.concatenate([[0], np.cumsum(negatives)])
    # mistakes of (theta, +1): positives below theta, negatives at or above
    plus = below_pos + (below_neg[-1] - below_neg)
    minus = below_neg + (below_pos[-1] - below_pos)
    errors = np.concatenate([plus, minus])
    best = int(np.argmin(errors))
    if best <= k:
        return ThresholdHypothesis(best, 1)
    return ThresholdHypothesis(best - k - 1, -1)


class HistogramTds(TdsLearner):
    """
    Accepts when the empirical train and test histograms are within total
    variation ``tolerance`` (``eps / 4`` by default), then returns the ERM
    threshold.

    Args:
        k (int): domain size.
        m (int): samples per side, defaults to the DKW style bound.
        delta (float): failure probability the default ``m`` is sized for.
        tolerance (float): total variation threshold override.
    """

    NODE_NAME = 'histogram'
    deterministic = True

    def __init__(self, k, m=None, delta=0.01, tolerance=None):
        if k < 2:
            raise ValueError('histogram learner needs k >= 2')
        self.k = int(k)
        self.m = m
        self.delta = float(delta)
        self.tolerance = tolerance

    def __repr__(self):
        return '<{}(k={}, m={})>'.format(self.__class__.__name__, self.k, self.m)

    def sample_complexity(self, eps):
        if self.m:
            return int(self.m)
        return math.ceil(32.0 * (self.k * math.log(2.0) + math.log(4.0 / self.delta)) / eps ** 2)

    def total_variation(self, train_points, test_points):
        train_hist = np.bincount(buckets(train_points), minlength=self.k) / len(train_points)
        test_hist = np.bincount(buckets(test_points), minlength=self.k) / len(test_points)
        return 0.5 * float(np.abs(train_hist - test_hist).sum())

    def run(self, train, test, eps, delta, rng):
        m = self.sample_complexity(eps)
        train, test = train[:m], np.asarray(test)[:m]
        tolerance = eps / 4.0 if self.tolerance is None else self.tolerance
        if self.total_variation(train.points, test) > tolerance:
            return Reject()
        return Accept(erm_threshold(train, self.k))

    @property
    def params(self):
        return {'k': self.k, 'm': self.m, 'delta': self.delta, 'tolerance': self.tolerance}


class SupportTds(TdsLearner):
    """
    Rejects when a test point falls outside the train support, otherwise
    accepts with the ERM threshold.

    Args:
        k (int): domain size.
        m (int): samples per side.
    """

    NODE_NAME = 'support'
    deterministic = True

    def __init__(self, k, m=4):
        self.k = int(k)
        self.m = int(m)

    def __repr__(self):
        return '<{}(k={}, m={})>'.format(self.__class__.__name__, self.k, self.m)

    def sample_complexity(self, eps):
        return self.m

    def run(self, train, test, eps, delta, rng):
        train, test = train[:self.m], np.asarray(test)[:self.m]
        support = np.zeros(self.k, dtype=bool)
        support[buckets(train.points)] = True
        if not support[buckets(test)].all():
            return Reject()
        return Accept(erm_threshold(train, self.k))

    @property
    def params(self):
        return {'k': self.k, 'm': self.m}


LEARNER_CLASSES = (HistogramTds, SupportTds)


# ================================= DOMAINS ====================================


@dataclass
class DiscreteDomain:
    """
    Finite domain with explicit train and test laws and a concept table.

    Attributes:
        train (np.ndarray): train probabilities.
        test (np.ndarray): test probabilities.
        concept (np.ndarray): labels in {+1, -1} per bucket.
        flip_rate (float): independent label flip rate on both laws.
    """
    train: np.ndarray
    test: np.ndarray
    concept: np.ndarray
    flip_rate: float = 0.0

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=float)
        self.test = np.asarray(self.test, dtype=float)
        self.concept = np.asarray(self.concept, dtype=int)
        if not len(self.train) == len(self.test) == len(self.concept):
            raise ValueError('train, test and concept tables differ in size')
        for name in ('train', 'test'):
            table = getattr(self, name)
            if (table < 0).any() or abs(table.sum() - 1.0) > ToleranceEnum.PROBABILITY_SUM.value:
                raise ValueError('{} table is not a probability vector'.format(name))
        if not set(np.unique(self.concept)) <= {-1, 1}:
            raise ValueError('concept labels must be +1 or -1')
        if not 0.0 <= self.flip_rate < 0.5:
            raise ValueError('flip_rate must lie in [0, 1/2)')

    @property
    def k(self):
        return len(self.concept)

    @property
    def points(self):
        return np.arange(self.k, dtype=float).reshape(self.k, 1)

    def concept_fn(self, points):
        return self.concept[buckets(points)]

    @property
    def train_sampler(self):
        return DiscreteSampler(self.train)

    @property
    def test_sampler(self):
        return DiscreteSampler(self.test)

    @property
    def to_dict(self) -> TSDScenario:
        return {
            'k': self.k,
            'train': self.train.tolist(),
            'test': self.test.tolist(),
            'concept': self.concept.tolist(),
            'lambda': self.flip_rate,
        }

    @classmethod
    def from_dict(cls, data):
        """
        Args:
            data (dict): ``{k, train, test, concept, lambda?}``.

        Returns:
            DiscreteDomain: domain.
        """
        try:
            domain = cls(data['train'], data['test'], data['concept'],
                         float(data.get('lambda', data.get('flip_rate', 0.0))))
        except KeyError as error:
            raise SerializationError('scenario is missing {}'.format(error)) from error
        if 'k' in data and int(data['k']) != domain.k:
            raise SerializationError('scenario declares k={} but has {} buckets'.format(
                data['k'], domain.k))
        return domain

    @classmethod
    def load(cls, file_path):
        with open(file_path) as data_file:
            return cls.from_dict(json.load(data_file))


@dataclass
class ShiftScenario:
    """
    Train law, test law and the concept labelling both.

    Attributes:
        name (str): generator name.
        train (Sampler): train point law.
        test (Sampler): test point law.
        concept (callable): ``(size, n)`` points to labels.
        flip_rate (float): label noise, agnostic experiments only.
        domain (DiscreteDomain): finite domain, when there is one.
        target (np.ndarray): halfspace normal of continuous scenarios.
        theta (float): halfspace threshold of continuous scenarios.
        params (dict): generator parameters, echoed in reports.
    """
    name: str
    train: Sampler
    test: Sampler
    concept: Callable
    flip_rate: float = 0.0
    domain: Optional[DiscreteDomain] = None
    target: Optional[np.ndarray] = None
    theta: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return self.train.dimension

    @property
    def labeled_train(self):
        return ConceptLabeledSampler(self.train, self.concept, self.flip_rate)

    @property
    def labeled_test(self):
        return ConceptLabeledSampler(self.test, self.concept, self.flip_rate)

    @classmethod
    def from_domain(cls, domain, name='discrete-k', params=None):
        return cls(name, domain.train_sampler, domain.test_sampler, domain.concept_fn,
                   domain.flip_rate, domain=domain, params=dict(params or domain.to_dict))
