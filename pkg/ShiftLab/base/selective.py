#!/usr/bin/python
from __future__ import annotations

import json

import numpy as np

from ShiftLab.base.factory import Registrable
from ShiftLab.base.sampling import LabeledBatch, draw_points
from ShiftLab.errors import SerializationError


def sign(values):
    """
    Sign with ``sign(0) = +1``, returned as an int array.
    """
    return np.where(np.asarray(values) >= 0.0, 1, -1)


class Hypothesis(Registrable):
    """
    Deterministic classifier ``X -> {+1, -1}``.

    Subclasses implement :meth:`predict` and :meth:`params` so the
    hypothesis can be written into a program document and rebuilt by a
    :class:`ShiftLab.base.factory.ClassFactory`.
    """

    __identifier__ = 'ShiftLab.hypotheses'

    def __call__(self, points):
        return self.predict(points)

    def predict(self, points):
        raise NotImplementedError

    @property
    def params(self):
        return {}

    @classmethod
    def from_params(cls, params, factory=None):
        return cls(**params)

    @property
    def to_dict(self):
        """
        serialize the hypothesis.

        Returns:
            dict: ``{'type_': ..., 'params': {...}}``
        """
        return {'type_': self.type_, 'params': self.params}


class ConstantHypothesis(Hypothesis):
    """
    ``h(x) = label`` everywhere; the default leaf hypothesis.
    """

    NODE_NAME = 'constant'

    def __init__(self, label=1):
        self.label = 1 if label >= 0 else -1

    def __repr__(self):
        return '<{}({:+d})>'.format(self.__class__.__name__, self.label)

    def predict(self, points):
        return np.full(len(points), self.label, dtype=int)

    @property
    def params(self):
        return {'label': self.label}


class MajorityHypothesis(Hypothesis):
    """
    Pointwise majority over a list of hypotheses, ties go to +1.
    """

    NODE_NAME = 'majority'

    def __init__(self, hypotheses):
        if not hypotheses:
            raise ValueError('majority of an empty hypothesis list')
        self.hypotheses = list(hypotheses)

    def __repr__(self):
        return '<{}(size={})>'.format(self.__class__.__name__, len(self.hypotheses))

    def predict(self, points):
        votes = np.zeros(len(points), dtype=int)
        for hypothesis in self.hypotheses:
            votes += hypothesis.predict(points)
        return sign(votes)

    @property
    def params(self):
        return {'hypotheses': [h.to_dict for h in self.hypotheses]}

    @classmethod
    def from_params(cls, params, factory=None):
        return cls([hypothesis_from_dict(d, factory) for d in params['hypotheses']])


def hypothesis_from_dict(data, factory):
    """
    Rebuild a hypothesis from its ``to_dict`` document.

    Args:
        data (dict): serialized hypothesis.
        factory (ClassFactory): registry holding the hypothesis classes.

    Returns:
        Hypothesis: rebuilt hypothesis.
    """
    _Class = factory.resolve(data['type_'])
    if _Class is None:
        raise SerializationError('unknown hypothesis "{}"'.format(data['type_']))
    return _Class.from_params(data.get('params', {}), factory)


class SelectiveClassifier(object):
    """
    A hypothesis ``h`` paired with a selector ``g``. Subclasses implement
    :meth:`evaluate_many`; randomized classifiers draw their coins from the
    generator they are handed so evaluations are reproducible per seed.
    """

    def evaluate_many(self, points, rng=None):
        """
        Args:
            points (np.ndarray): ``(size, n)`` points.
            rng (np.random.Generator): coins for randomized classifiers.

        Returns:
            tuple[np.ndarray, np.ndarray]: ``(selected, labels)``, a bool
            mask and int labels in {+1, -1}.
        """
        raise NotImplementedError

    def evaluate(self, x, rng=None):
        selected, labels = self.evaluate_many(np.atleast_2d(x), rng)
        return int(selected[0]), int(labels[0])

    def h(self, x, rng=None):
        return self.evaluate(x, rng)[1]

    def g(self, x, rng=None):
        return self.evaluate(x, rng)[0]

    @property
    def to_dict(self):
        raise NotImplementedError

    @property
    def serial(self):
        """
        Serialize the classifier to a json string.

        Returns:
            str: serialized JSON document.
        """
        return json.dumps(self.to_dict)


class FunctionSelectiveClassifier(SelectiveClassifier):
    """
    Selective classifier built from two vectorized callables.

    Args:
        h (callable): ``(size, n)`` points to labels in {+1, -1}.
        g (callable): ``(size, n)`` points to selections in {0, 1}.
    """

    def __init__(self, h, g):
        self._h = h
        self._g = g

    def evaluate_many(self, points, rng=None):
        points = np.atleast_2d(points)
        selected = np.asarray(self._g(points)).astype(bool)
        labels = np.asarray(self._h(points), dtype=int)
        return selected, labels


def empirical_selective_error(classifier, batch, rng=None):
    """
    Frequency of ``{label != h(x) and g(x) = 1}`` over a fixed batch.

    Args:
        classifier (SelectiveClassifier): classifier under test.
        batch (LabeledBatch): labeled points.
        rng (np.random.Generator): coins for randomized classifiers.

    Returns:
        float: rate in [0, 1].
    """
    if not len(batch):
        return 0.0
    selected, labels = classifier.evaluate_many(batch.points, rng)
    return float(np.mean(selected & (labels != batch.labels)))


def empirical_rejection_rate(classifier, points, rng=None):
    """
    Frequency of ``{g(x) = 0}`` over a fixed set of points.
    """
    if isinstance(points, LabeledBatch):
        points = points.points
    if not len(points):
        return 0.0
    selected, _ = classifier.evaluate_many(points, rng)
    return float(np.mean(~selected))


def selective_error(classifier, test, n_eval, rng):
    """
    Monte-Carlo selective error of ``classifier`` on ``n_eval`` fresh
    draws of the labeled test law.
    """
    if n_eval < 1:
        raise ValueError('n_eval must be at least 1')
    return empirical_selective_error(classifier, test.draw(rng, n_eval), rng)


def rejection_rate(classifier, train, n_eval, rng):
    """
    Monte-Carlo rejection rate of ``classifier`` on ``n_eval`` fresh draws
    of the train law.
    """
    if n_eval < 1:
        raise ValueError('n_eval must be at least 1')
    return empirical_rejection_rate(classifier, draw_points(train, rng, n_eval), rng)
