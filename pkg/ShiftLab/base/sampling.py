#!/usr/bin/python
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ShiftLab.base.bounds import hoeffding_sample_count
from ShiftLab.constants import ToleranceEnum
from ShiftLab.errors import DimensionMismatchError, SamplerExhaustedError

logger = logging.getLogger(__name__)

_MAX_CHUNK = 1 << 16


@dataclass(frozen=True)
class LabeledBatch:
    """
    Array form of a list of labeled examples.

    Attributes:
        points (np.ndarray): ``(size, n)`` points.
        labels (np.ndarray): ``(size,)`` labels in {+1, -1}.
    """
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.points) != len(self.labels):
            raise DimensionMismatchError(
                '{} points but {} labels'.format(len(self.points), len(self.labels)))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, index):
        return LabeledBatch(self.points[index], self.labels[index])

    @property
    def dimension(self):
        return self.points.shape[1]

    @classmethod
    def concatenate(cls, batches):
        return cls(np.concatenate([b.points for b in batches]),
                   np.concatenate([b.labels for b in batches]))


def _concatenate(parts):
    if isinstance(parts[0], LabeledBatch):
        return LabeledBatch.concatenate(parts)
    return np.concatenate(parts)


class Sampler(object):
    """
    Base class of every unlabeled point source.

    ``draw(rng, size)`` returns a ``(size, n)`` float array; draws are a
    deterministic function of the generator state.
    """

    def __init__(self, dimension):
        self._dimension = int(dimension)

    def __repr__(self):
        return '<{}(n={}) object at {}>'.format(
            self.__class__.__name__, self._dimension, hex(id(self)))

    @property
    def dimension(self):
        return self._dimension

    def draw(self, rng, size):
        raise NotImplementedError


class FunctionSampler(Sampler):
    """
    Sampler wrapping a ``fn(rng, size) -> (size, n)`` callable.
    """

    def __init__(self, fn, dimension):
        super(FunctionSampler, self).__init__(dimension)
        self._fn = fn

    def draw(self, rng, size):
        return np.asarray(self._fn(rng, size), dtype=float).reshape(size, self.dimension)


class SphereSampler(Sampler):
    """
    Uniform law on the unit sphere of R^n.
    """

    def draw(self, rng, size):
        points = rng.standard_normal((size, self.dimension))
        return points / np.linalg.norm(points, axis=1, keepdims=True)


class DiscreteSampler(Sampler):
    """
    Law on the finite domain ``{0, ..., k-1}``. Points are returned as a
    ``(size, 1)`` float array holding the bucket index.

    Args:
        probabilities (list[float]): probability table, sums to 1.
    """

    def __init__(self, probabilities):
        super(DiscreteSampler, self).__init__(1)
        probabilities = np.asarray(probabilities, dtype=float)
        if probabilities.ndim != 1 or (probabilities < 0).any():
            raise ValueError('probabilities must be a non-negative vector')
        if abs(probabilities.sum() - 1.0) > ToleranceEnum.PROBABILITY_SUM.value:
            raise ValueError(
                'probabilities sum to {!r}, not 1'.format(probabilities.sum()))
        self._probabilities = probabilities

    @property
    def probabilities(self):
        return self._probabilities

    @property
    def k(self):
        return len(self._probabilities)

    def draw(self, rng, size):
        buckets = rng.choice(self.k, size=size, p=self._probabilities)
        return buckets.astype(float).reshape(size, 1)


class MixtureSampler(Sampler):
    """
    Mixture of samplers of the same dimension.

    Args:
        components (list[Sampler]): mixed laws.
        weights (list[float]): mixture weights, defaults to uniform.
    """

    def __init__(self, components, weights=None):
        dims = {c.dimension for c in components}
        if len(dims) != 1:
            raise DimensionMismatchError('mixture components differ in dimension')
        super(MixtureSampler, self).__init__(dims.pop())
        self._components = list(components)
        if weights is None:
            weights = np.full(len(components), 1.0 / len(components))
        self._weights = np.asarray(weights, dtype=float)

    def draw(self, rng, size):
        picks = rng.choice(len(self._components), size=size, p=self._weights)
        points = np.empty((size, self.dimension))
        for index, component in enumerate(self._components):
            mask = picks == index
            count = int(mask.sum())
            if count:
                points[mask] = component.draw(rng, count)
        return points


class LabeledSampler(object):
    """
    Base class of labeled example sources. ``draw(rng, size)`` returns a
    :class:`LabeledBatch`.
    """

    def __init__(self, dimension):
        self._dimension = int(dimension)

    @property
    def dimension(self):
        return self._dimension

    @property
    def points_sampler(self):
        """
        Returns:
            Sampler: the marginal law of the points.
        """
        return FunctionSampler(lambda rng, size: self.draw(rng, size).points,
                               self._dimension)

    def draw(self, rng, size):
        raise NotImplementedError


class ConceptLabeledSampler(LabeledSampler):
    """
    Points from ``sampler`` labelled by ``concept``, each label flipped
    independently with probability ``flip_rate`` (agnostic scenarios).

    Args:
        sampler (Sampler): point law.
        concept (callable): ``(size, n)`` points to ``(size,)`` labels.
        flip_rate (float): label noise rate in [0, 1/2).
    """

    def __init__(self, sampler, concept, flip_rate=0.0):
        super(ConceptLabeledSampler, self).__init__(sampler.dimension)
        if not 0.0 <= flip_rate < 0.5:
            raise ValueError('flip_rate must lie in [0, 1/2)')
        self._sampler = sampler
        self._concept = concept
        self._flip_rate = float(flip_rate)

    @property
    def sampler(self):
        return self._sampler

    @property
    def concept(self):
        return self._concept

    @property
    def flip_rate(self):
        return self._flip_rate

    @property
    def points_sampler(self):
        return self._sampler

    def draw(self, rng, size):
        points = self._sampler.draw(rng, size)
        labels = np.asarray(self._concept(points), dtype=int)
        if self._flip_rate > 0.0:
            flips = rng.random(size) < self._flip_rate
            labels = np.where(flips, -labels, labels)
        return LabeledBatch(points, labels)


def draw_points(source, rng, size):
    """
    Draw unlabeled points from a :class:`Sampler` or the marginal of a
    :class:`LabeledSampler`.
    """
    drawn = source.draw(rng, size)
    if isinstance(drawn, LabeledBatch):
        return drawn.points
    return drawn


@dataclass(frozen=True)
class EstimateSpec:
    """
    Accuracy contract of a Monte-Carlo probability estimate.

    Attributes:
        gamma (float): additive accuracy.
        delta (float): failure probability.
    """
    gamma: float
    delta: float

    def __post_init__(self):
        # validates both parameters.
        hoeffding_sample_count(self.gamma, self.delta)

    @property
    def sample_count(self):
        return hoeffding_sample_count(self.gamma, self.delta)


def estimate_probability(event, spec, rng, chunk_size=_MAX_CHUNK):
    """
    Empirical mean of a {0, 1} event over ``spec.sample_count`` draws.

    Args:
        event (callable): ``event(rng, size)`` returning ``size`` values in
            {0, 1}.
        spec (EstimateSpec): accuracy contract.
        rng (np.random.Generator): random stream.
        chunk_size (int): draws requested per call of ``event``.

    Returns:
        float: estimate in [0, 1].
    """
    total = spec.sample_count
    hits = 0
    remaining = total
    while remaining:
        size = min(remaining, chunk_size)
        values = np.asarray(event(rng, size))
        hits += int(np.count_nonzero(values))
        remaining -= size
    return hits / total


def rejection_sample_many(base, keep, size, cap, rng):
    """
    Draw ``size`` points from ``base`` conditioned on ``keep``.

    Candidates are proposed in chunks; the predicate receives each chunk
    with the shared random stream so randomized predicates see fresh coins
    per candidate.

    Args:
        base (Sampler or LabeledSampler): proposal law.
        keep (callable): ``keep(candidates, rng)`` returning a bool mask.
        size (int): number of accepted draws wanted.
        cap (int): maximum number of consecutive rejections.
        rng (np.random.Generator): random stream.

    Returns:
        np.ndarray or LabeledBatch: accepted draws in proposal order.

    Raises:
        SamplerExhaustedError: after ``cap`` consecutive rejections.
    """
    if cap < 1:
        raise ValueError('cap must be at least 1')
    if size == 0:
        return base.draw(rng, 0)
    parts = []
    collected = 0
    run = 0
    chunk = max(16, 2 * size)
    while collected < size:
        chunk = min(chunk, _MAX_CHUNK)
        candidates = base.draw(rng, chunk)
        mask = np.asarray(keep(candidates, rng), dtype=bool)
        hits = np.flatnonzero(mask)
        if not len(hits):
            run += chunk
            if run >= cap:
                raise SamplerExhaustedError(
                    '{} consecutive rejections'.format(run))
            chunk *= 2
            continue
        hits = hits[:size - collected]
        gaps = np.diff(hits) - 1
        longest = max(run + hits[0], int(gaps.max()) if len(gaps) else 0)
        if longest >= cap:
            raise SamplerExhaustedError(
                '{} consecutive rejections'.format(longest))
        parts.append(candidates[hits])
        collected += len(hits)
        run = chunk - 1 - hits[-1]
        if run >= cap and collected < size:
            raise SamplerExhaustedError('{} consecutive rejections'.format(run))
        chunk = max(16, 2 * (size - collected) * chunk // max(1, len(hits)))
    logger.debug('rejection sampling collected %d draws', size)
    return _concatenate(parts)


def rejection_sample(base, keep, cap, rng):
    """
    Single conditional draw, see :func:`rejection_sample_many`.

    Returns:
        np.ndarray or tuple: the first accepted point, or a
            ``(point, label)`` pair for labeled proposals.
    """
    drawn = rejection_sample_many(base, keep, 1, cap, rng)
    if isinstance(drawn, LabeledBatch):
        return drawn.points[0], int(drawn.labels[0])
    return drawn[0]
