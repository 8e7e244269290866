#!/usr/bin/python
from __future__ import annotations

import logging
import math

import numpy as np

from ShiftLab.base.selective import SelectiveClassifier, sign

logger = logging.getLogger(__name__)

#: variance of every coordinate of the query law; makes E|z| = 1.
QUERY_VARIANCE = math.pi / 2.0

_CHUNK = 1 << 16


def margin_sample_count(d, gamma, delta):
    """
    Query count ``ceil((2000 d / gamma^2) ln(d / delta))``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError('gamma must lie in (0, 1)')
    if not 0.0 < delta < 1.0:
        raise ValueError('delta must lie in (0, 1)')
    return max(1, math.ceil(2000.0 * d / gamma ** 2 * math.log(d / delta)))


class MarginClassifier(SelectiveClassifier):
    """
    ``h(x) = sign(w_hat . x)`` with selector ``g(x) = 1{|w_hat . x| >= 2 gamma / 3}``.

    Args:
        w_hat (np.ndarray): estimated normal vector.
        gamma (float): margin parameter.
    """

    def __init__(self, w_hat, gamma):
        self.w_hat = np.asarray(w_hat, dtype=float)
        self.gamma = float(gamma)

    def __repr__(self):
        return '<{}(d={}, gamma={:g}) object at {}>'.format(
            self.__class__.__name__, len(self.w_hat), self.gamma, hex(id(self)))

    @property
    def dimension(self):
        return len(self.w_hat)

    @property
    def threshold(self):
        return 2.0 * self.gamma / 3.0

    def evaluate_many(self, points, rng=None):
        scores = np.atleast_2d(points) @ self.w_hat
        return np.abs(scores) >= self.threshold, sign(scores)

    @property
    def to_dict(self):
        return {'w_hat': self.w_hat.tolist(), 'gamma': self.gamma}

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data['w_hat'], dtype=float), data['gamma'])


def learn_high_margin_halfspace(oracle, d, gamma, delta, rng, sample_count=None):
    """
    Estimate a homogeneous halfspace from Gaussian membership queries.

    ``w_hat = (1/l) sum f(x_i) x_i`` for ``x_i ~ N(0, (pi/2) I_d)``; for a
    unit target ``w`` the expectation of ``f(x) x`` is exactly ``w``.
    Partial sums are accumulated per chunk and combined with
    :func:`math.fsum` so the result depends only on the drawn points.

    Args:
        oracle (MembershipOracle): labels consistent with some unit ``w``.
        d (int): dimension.
        gamma (float): margin parameter in (0, 1).
        delta (float): failure probability in (0, 1/3).
        rng (np.random.Generator): query stream.
        sample_count (int): overrides ``margin_sample_count(d, gamma, delta)``.

    Returns:
        MarginClassifier: with ``||w_hat - w|| <= gamma/3`` with probability
        at least ``1 - delta``.
    """
    count = sample_count or margin_sample_count(d, gamma, delta)
    scale = math.sqrt(QUERY_VARIANCE)
    partials = []
    remaining = count
    while remaining:
        size = min(remaining, _CHUNK)
        queries = scale * rng.standard_normal((size, d))
        labels = oracle.query_many(queries)
        partials.append(labels @ queries)
        remaining -= size
    partials = np.asarray(partials)
    w_hat = np.array([math.fsum(partials[:, j]) for j in range(d)]) / count
    logger.debug('margin estimate from %d queries, |w_hat|=%.4f',
                 count, np.linalg.norm(w_hat))
    return MarginClassifier(w_hat, gamma)
