#!/usr/bin/python
"""
Single sample distinguishers extracted from a rejecting TDS learner.

A learner that rejects train/test samples noticeably more often than
train/train samples separates the two laws with ``m`` samples. Replacing
the ``m`` test points one at a time (a hybrid sweep) yields a position
where swapping a single point already moves the acceptance probability
by ``Omega(1/m)``; freezing everything but that point gives a one sample
distinguisher. Output 1 means "accepted", which leans towards train.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ShiftLab.base.bounds import hoeffding_sample_count
from ShiftLab.base.factory import Registrable
from ShiftLab.base.sampling import LabeledBatch, draw_points
from ShiftLab.constants import DistinguisherEnum, FailReasonEnum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistinguisherParams:
    """
    Knobs of :func:`get_weak_distinguisher`.

    The ``*_override`` fields replace the corresponding count formula for
    desk scale runs.
    """
    c: float = DistinguisherEnum.C.value
    c_prime: float = DistinguisherEnum.C_PRIME.value
    gap_threshold: float = DistinguisherEnum.GAP_THRESHOLD.value
    advantage_factor: float = DistinguisherEnum.ADVANTAGE_FACTOR.value
    evaluation_budget: int = DistinguisherEnum.EVALUATION_BUDGET.value
    learner_delta: float = DistinguisherEnum.LEARNER_DELTA.value
    confirm_margin: float = DistinguisherEnum.CONFIRM_MARGIN.value
    repetitions_override: Optional[int] = None
    candidates_override: Optional[int] = None
    attempts_override: Optional[int] = None
    evaluations_override: Optional[int] = None

    def __post_init__(self):
        if self.c < self.c_prime or self.c_prime < 1:
            raise ValueError('constants must satisfy c >= c_prime >= 1')
        if not 0.0 < self.confirm_margin < 1.0:
            raise ValueError('confirm_margin must lie in (0, 1)')

    def repetitions(self, delta):
        """Phase one repetitions ``r = ceil(C ln(1/delta))``."""
        return self.repetitions_override or math.ceil(self.c * math.log(1.0 / delta))

    def candidates(self, delta):
        """Phase one candidate train sets ``ceil(C' ln(1/delta))``."""
        return self.candidates_override or math.ceil(self.c_prime * math.log(1.0 / delta))

    def attempts(self, m, delta):
        """Phase two attempts per hybrid position ``ceil(C' m ln(1/delta))``."""
        return self.attempts_override or math.ceil(self.c_prime * m * math.log(1.0 / delta))

    def evaluations(self, m, delta):
        """Phase two samples per law ``l = ceil(C m^2 ln(m/delta))``."""
        return self.evaluations_override or math.ceil(self.c * m ** 2 * math.log(m / delta))

    def threshold(self, m):
        """Phase two success threshold ``1 / (5000 m)``."""
        return 1.0 / (self.advantage_factor * m)

    def confirmations(self, delta, tests):
        """
        Fresh draws confirming one of ``tests`` winners: every acceptance
        rate is then known to ``confirm_margin / 2`` except with probability
        ``delta / tests``.
        """
        return hoeffding_sample_count(self.confirm_margin / 2.0, delta / tests)


@dataclass(frozen=True)
class Fail:
    """
    Outcome of a search that found no distinguisher.

    Attributes:
        reason (str): one of :class:`ShiftLab.constants.FailReasonEnum`.
    """
    reason: str


@dataclass(frozen=True)
class AdvantageReport:
    """
    Difference of acceptance frequencies of a one sample algorithm.

    Attributes:
        advantage (float): first law minus second law, in [-1, 1].
        first_rate (float): acceptance frequency on the first law.
        second_rate (float): acceptance frequency on the second law.
        sample_count (int): draws per law.
    """
    advantage: float
    first_rate: float
    second_rate: float
    sample_count: int

    @property
    def direction(self):
        return 1 if self.advantage >= 0.0 else -1


def _accepted(outcome):
    return 1 if outcome.accepted else 0


class Distinguisher(Registrable):
    """
    One sample {0, 1} algorithm.
    """

    __identifier__ = 'ShiftLab.distinguishers'

    def evaluate_many(self, points, rng):
        raise NotImplementedError

    def evaluate(self, x, rng):
        return int(self.evaluate_many(np.atleast_2d(x), rng)[0])

    def one_probability(self, x):
        """
        Exact ``Pr[evaluate(x) = 1]`` where it can be computed.
        """
        raise NotImplementedError

    @property
    def to_dict(self):
        return {'type_': self.type_, 'params': self.params}

    @property
    def params(self):
        return {}

    @classmethod
    def from_dict(cls, data, learner=None):
        return cls(**data.get('params', {}))


class ConstantDistinguisher(Distinguisher):
    """
    Always outputs ``bit``.
    """

    NODE_NAME = 'constant'

    def __init__(self, bit=1):
        self.bit = int(bit)

    def evaluate_many(self, points, rng):
        return np.full(len(points), self.bit, dtype=int)

    def one_probability(self, x):
        return float(self.bit)

    @property
    def params(self):
        return {'bit': self.bit}


class TableDistinguisher(Distinguisher):
    """
    Randomized distinguisher on a finite domain: outputs 1 at bucket ``j``
    with probability ``table[j]``.
    """

    NODE_NAME = 'table'

    def __init__(self, table):
        self.table = np.asarray(table, dtype=float)

    def evaluate_many(self, points, rng):
        buckets = np.asarray(points, dtype=float)[:, 0].astype(int)
        return (rng.random(len(buckets)) < self.table[buckets]).astype(int)

    def one_probability(self, x):
        return float(self.table[int(np.asarray(x).ravel()[0])])

    @property
    def params(self):
        return {'table': self.table.tolist()}


class WeakDistinguisher(Distinguisher):
    """
    Runs the learner on a frozen train set and the test context
    ``[b_1 .. b_(i-1), x, a_1 .. a_(m-i)]`` with the input ``x`` at
    position ``i``; outputs 1 when the learner accepts.

    Args:
        learner (TdsLearner): wrapped learner.
        frozen_train (LabeledBatch): frozen train set.
        prefix (np.ndarray): ``i - 1`` test points.
        suffix (np.ndarray): ``m - i`` train points.
        eps (float): accuracy handed to the learner.
        learner_delta (float): failure probability handed to the learner.
    """

    NODE_NAME = 'weak'

    def __init__(self, learner, frozen_train, prefix, suffix, eps, learner_delta):
        self.learner = learner
        self.frozen_train = frozen_train
        self.prefix = np.asarray(prefix, dtype=float).reshape(-1, frozen_train.dimension)
        self.suffix = np.asarray(suffix, dtype=float).reshape(-1, frozen_train.dimension)
        self.eps = float(eps)
        self.learner_delta = float(learner_delta)
        self.estimate = None
        self._cache = {}

    def __repr__(self):
        return '<{}(position={}, m={}) object at {}>'.format(
            self.__class__.__name__, self.position, self.m, hex(id(self)))

    @property
    def position(self):
        return len(self.prefix) + 1

    @property
    def m(self):
        return len(self.prefix) + len(self.suffix) + 1

    def context(self, x):
        return np.vstack([self.prefix, np.atleast_2d(x), self.suffix])

    def _run(self, x, rng):
        outcome = self.learner.run(
            self.frozen_train, self.context(x), self.eps, self.learner_delta, rng)
        return _accepted(outcome)

    def one_probability(self, x):
        if not self.learner.deterministic:
            raise NotImplementedError('exact probabilities need a deterministic learner')
        x = np.asarray(x, dtype=float).ravel()
        key = x.tobytes()
        if key not in self._cache:
            self._cache[key] = float(self._run(x, None))
        return self._cache[key]

    def evaluate_many(self, points, rng):
        points = np.atleast_2d(points)
        if self.learner.deterministic:
            unique, inverse = np.unique(points, axis=0, return_inverse=True)
            values = np.array([self.one_probability(u) for u in unique], dtype=int)
            return values[np.asarray(inverse).ravel()]
        return np.array([self._run(x, rng) for x in points], dtype=int)

    @property
    def params(self):
        return {
            'frozen_points': self.frozen_train.points.tolist(),
            'frozen_labels': self.frozen_train.labels.tolist(),
            'prefix': self.prefix.tolist(),
            'suffix': self.suffix.tolist(),
            'eps': self.eps,
            'learner_delta': self.learner_delta,
            'estimate': self.estimate,
        }

    @classmethod
    def from_dict(cls, data, learner=None):
        params = data['params']
        frozen = LabeledBatch(np.array(params['frozen_points'], dtype=float),
                              np.array(params['frozen_labels'], dtype=int))
        wd = cls(learner, frozen, params['prefix'], params['suffix'],
                 params['eps'], params['learner_delta'])
        wd.estimate = params.get('estimate')
        return wd


def _evaluate(alg, points, rng):
    if hasattr(alg, 'evaluate_many'):
        return np.asarray(alg.evaluate_many(points, rng))
    return np.asarray(alg(points, rng))


def measure_advantage(alg, first, second, n_eval, rng):
    """
    Estimate the one sample advantage of ``alg`` between two laws.

    Args:
        alg (Distinguisher or callable): ``(points, rng) -> {0, 1}``.
        first (Sampler): law the advantage is oriented towards.
        second (Sampler): other law.
        n_eval (int): draws per law.
        rng (np.random.Generator): random stream.

    Returns:
        AdvantageReport: report.
    """
    if n_eval < 1:
        raise ValueError('n_eval must be at least 1')
    first_rate = float(np.mean(_evaluate(alg, draw_points(first, rng, n_eval), rng)))
    second_rate = float(np.mean(_evaluate(alg, draw_points(second, rng, n_eval), rng)))
    return AdvantageReport(first_rate - second_rate, first_rate, second_rate, n_eval)


def _train_set_gap(learner, sample, train, test, runs, eps, learner_delta, rng):
    m = len(sample)
    gap = 0
    for _ in range(runs):
        same = draw_points(train, rng, m)
        shifted = draw_points(test, rng, m)
        gap += _accepted(learner.run(sample, same, eps, learner_delta, rng))
        gap -= _accepted(learner.run(sample, shifted, eps, learner_delta, rng))
    return gap / runs


def get_weak_distinguisher(learner, train, test, delta, rng, eps=0.1, params=None):
    """
    Extract a one sample distinguisher from a rejecting learner.

    Phase one looks for a frozen train set ``T`` whose acceptance gap
    ``Pr[accept | train sample] - Pr[accept | test sample]`` is estimated
    at ``>= 0.004`` over ``r`` paired runs. Phase two sweeps the hybrid
    positions, freezing random contexts and keeping the first whose
    estimated advantage over ``l`` fresh points per law reaches
    ``1 / (5000 m)``.

    A winner of either phase is only kept once a fresh estimate, sized by
    :meth:`DistinguisherParams.confirmations`, still clears the threshold
    by ``confirm_margin``; on identical laws every confirmation fails
    except with probability ``delta``.

    Args:
        learner (TdsLearner): learner, rejecting on the two laws.
        train (LabeledSampler): train law.
        test (Sampler): test law.
        delta (float): failure probability in (0, 1/3).
        rng (np.random.Generator): random stream.
        eps (float): accuracy handed to the learner.
        params (DistinguisherParams): knobs.

    Returns:
        WeakDistinguisher or Fail: the distinguisher, with its confirmed
        advantage in ``estimate``.
    """
    params = params or DistinguisherParams()
    m = learner.sample_complexity(eps)
    learner_delta = params.learner_delta
    margin = params.confirm_margin

    # search for a train set witnessing an acceptance gap
    repetitions = params.repetitions(delta)
    candidates = params.candidates(delta)
    confirm_runs = params.confirmations(delta / 2.0, 2 * candidates)
    frozen = None
    for candidate in range(candidates):
        sample = train.draw(rng, m)
        gap = _train_set_gap(learner, sample, train, test, repetitions, eps, learner_delta, rng)
        if gap < params.gap_threshold:
            continue
        confirmed = _train_set_gap(
            learner, sample, train, test, confirm_runs, eps, learner_delta, rng)
        if confirmed - margin >= params.gap_threshold:
            logger.debug('candidate %d shows acceptance gap %.4f, confirmed %.4f',
                         candidate, gap, confirmed)
            frozen = sample
            break
        logger.debug('candidate %d gap %.4f not confirmed (%.4f)', candidate, gap, confirmed)
    if frozen is None:
        return Fail(FailReasonEnum.NO_GAP.value)

    # hybrid sweep for a single sample distinguisher
    evaluations = params.evaluations(m, delta)
    attempts = params.attempts(m, delta)
    confirm_evaluations = params.confirmations(delta / 2.0, 2 * m * attempts)
    threshold = params.threshold(m)
    used = 0
    for position in range(1, m + 1):
        for _ in range(attempts):
            if used + 2 * evaluations > params.evaluation_budget:
                logger.debug('evaluation budget of %d spent', params.evaluation_budget)
                return Fail(FailReasonEnum.BUDGET.value)
            suffix = draw_points(train, rng, m - position)
            prefix = draw_points(test, rng, position - 1)
            wd = WeakDistinguisher(learner, frozen, prefix, suffix, eps, learner_delta)
            report = measure_advantage(wd, train, test, evaluations, rng)
            used += 2 * evaluations
            if report.advantage < threshold:
                continue
            if used + 2 * confirm_evaluations > params.evaluation_budget:
                logger.debug('evaluation budget of %d spent', params.evaluation_budget)
                return Fail(FailReasonEnum.BUDGET.value)
            confirmed = measure_advantage(wd, train, test, confirm_evaluations, rng)
            used += 2 * confirm_evaluations
            if confirmed.advantage - margin >= threshold:
                wd.estimate = confirmed.advantage
                logger.debug('distinguisher at position %d with estimate %.4f',
                             position, confirmed.advantage)
                return wd
    return Fail(FailReasonEnum.NO_DISTINGUISHER.value)
