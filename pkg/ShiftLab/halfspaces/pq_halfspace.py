#!/usr/bin/python
"""
Membership query PQ learner for halfspaces.

Homogeneous targets are learned stage by stage: each stage puts the
remaining train points (or a subspace holding many of them) in radial
isotropic position, learns the transformed target with
:func:`learn_high_margin_halfspace` and removes the points it selects.
General targets ``sign(w . x - theta)`` are lifted to ``(1, x)`` first.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ShiftLab.base.oracles import MembershipOracle
from ShiftLab.base.selective import SelectiveClassifier
from ShiftLab.base.types import TSDStage, TSerializedHalfspaceClassifier
from ShiftLab.constants import ToleranceEnum
from ShiftLab.errors import DegenerateQueryError, DimensionMismatchError, SerializationError
from ShiftLab.halfspaces.forster import ForsterStage, forster_decompose, normalize_rows, unit_points
from ShiftLab.halfspaces.margin import MarginClassifier, learn_high_margin_halfspace

logger = logging.getLogger(__name__)


# ================================ LIFT ========================================


def homogenize(points):
    """
    Lift ``x`` to ``(1, x)``.

    Args:
        points (array_like): a point or ``(size, n)`` points.

    Returns:
        np.ndarray: lifted point(s) with the constant coordinate first.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        return np.concatenate([[1.0], points])
    return np.column_stack([np.ones(len(points)), points])


class LiftedOracle(MembershipOracle):
    """
    Answers queries ``p = (c, x)`` in R^(n+1) for the lifted target
    ``sign((-theta, w) . p)`` using a membership oracle of the original
    target: ``f(x / c) sign(c)``.

    Args:
        base (MembershipOracle): oracle over R^n.
    """

    def __init__(self, base):
        super(LiftedOracle, self).__init__(base.dimension + 1)
        self.base = base

    def _answer(self, points):
        scale = points[:, 0]
        degenerate = np.flatnonzero(scale == 0.0)
        if len(degenerate):
            raise DegenerateQueryError(
                'query {} has a zero lift coordinate'.format(points[degenerate[0]].tolist()))
        return self.base.query_many(points[:, 1:] / scale[:, None]) * np.where(scale > 0.0, 1, -1)


def lifted_query(oracle, point):
    """
    Answer a single lifted query ``p = (c, x)``, see :class:`LiftedOracle`.

    The lift coordinate ``c`` comes first, matching :func:`homogenize`, so
    ``lifted_query(f, homogenize(x)) == f(x)``.

    Args:
        oracle (MembershipOracle): oracle of the original target over R^n.
        point (array_like): lifted query ``(c, x_1 .. x_n)``.

    Returns:
        int: ``f(x / c) sign(c)``.

    Raises:
        DegenerateQueryError: the lift coordinate is exactly zero.
    """
    point = np.asarray(point, dtype=float)
    if point[0] == 0.0:
        raise DegenerateQueryError('query has a zero lift coordinate')
    return int(oracle.query(point[1:] / point[0])) * (1 if point[0] > 0.0 else -1)


class TransformedOracle(MembershipOracle):
    """
    Oracle of the transformed target in stage coordinates: a query ``y``
    is answered by querying ``basis A^-1 y`` in the original space.
    """

    def __init__(self, base, stage):
        super(TransformedOracle, self).__init__(stage.dimension)
        self.base = base
        self.stage = stage

    def _answer(self, points):
        return self.base.query_many(self.stage.pullback(points))


# ================================ CLASSIFIERS =================================


class StageClassifier(object):
    """
    One decision list entry: a Forster stage and the margin classifier
    learned in its coordinates.
    """

    def __init__(self, stage, classifier):
        self.stage = stage
        self.classifier = classifier

    def __repr__(self):
        return '<{}(d={}) object at {}>'.format(
            self.__class__.__name__, self.stage.dimension, hex(id(self)))

    def accepts(self, points):
        """
        Returns:
            tuple[np.ndarray, np.ndarray]: acceptance mask and labels.
        """
        points = np.atleast_2d(points)
        images, valid = self.stage.transform(points)
        selected, labels = self.classifier.evaluate_many(images)
        return selected & valid & self.stage.contains(points), labels

    @property
    def to_dict(self) -> TSDStage:
        data = self.stage.to_dict
        data.update(self.classifier.to_dict)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(ForsterStage.from_dict(data), MarginClassifier.from_dict(data))


@dataclass
class LearnTrace:
    """
    Bookkeeping of a :func:`learn_halfspace` run.

    Attributes:
        rounds (int): stages built.
        exit_reason (str): ``mass``, ``round_cap`` or ``empty``.
        residual_fraction (float): share of train points left unselected.
        query_count (int): membership queries issued.
        stage_dimensions (list[int]): dimension of every stage.
    """
    rounds: int = 0
    exit_reason: str = ''
    residual_fraction: float = 1.0
    query_count: int = 0
    stage_dimensions: list = field(default_factory=list)


class HalfspacePqClassifier(SelectiveClassifier):
    """
    Decision list of :class:`StageClassifier`. The first accepting stage
    labels a point; points no stage accepts get ``(0, +1)``.

    Args:
        dimension (int): input dimension.
        stages (list[StageClassifier]): ordered stages.
    """

    def __init__(self, dimension, stages=None):
        self.dimension = int(dimension)
        self.stages = list(stages or [])
        self.trace = None

    def __repr__(self):
        return '<{}(n={}, stages={}) object at {}>'.format(
            self.__class__.__name__, self.dimension, len(self.stages), hex(id(self)))

    def evaluate_many(self, points, rng=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise DimensionMismatchError(
                'classifier expects dimension {}, got {}'.format(
                    self.dimension, points.shape[1]))
        selected = np.zeros(len(points), dtype=bool)
        labels = np.ones(len(points), dtype=int)
        for stage in self.stages:
            pending = np.flatnonzero(~selected)
            if not len(pending):
                break
            accepted, stage_labels = stage.accepts(points[pending])
            hits = pending[accepted]
            selected[hits] = True
            labels[hits] = stage_labels[accepted]
        return selected, labels

    @property
    def to_dict(self) -> TSerializedHalfspaceClassifier:
        """
        serialize the decision list.

        Returns:
            dict: ``{'dimension': n, 'lifted': False, 'stages': [...]}``
        """
        return {
            'dimension': self.dimension,
            'lifted': False,
            'stages': [s.to_dict for s in self.stages],
        }

    @classmethod
    def from_dict(cls, data):
        if data.get('lifted'):
            raise SerializationError('document describes a lifted classifier')
        return cls(data['dimension'], [StageClassifier.from_dict(s) for s in data['stages']])


class LiftedPqClassifier(SelectiveClassifier):
    """
    Classifier over R^n evaluating a homogeneous decision list on the
    normalized lifts ``(1, x) / ||(1, x)||``.
    """

    def __init__(self, inner):
        self.inner = inner
        self.dimension = inner.dimension - 1

    @property
    def trace(self):
        return self.inner.trace

    def evaluate_many(self, points, rng=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise DimensionMismatchError(
                'classifier expects dimension {}, got {}'.format(
                    self.dimension, points.shape[1]))
        lifted, _ = normalize_rows(homogenize(points))
        return self.inner.evaluate_many(lifted)

    @property
    def to_dict(self):
        data = self.inner.to_dict
        data['dimension'] = self.dimension
        data['lifted'] = True
        return data

    @classmethod
    def from_dict(cls, data):
        if not data.get('lifted'):
            raise SerializationError('document describes a homogeneous classifier')
        inner = dict(data, dimension=data['dimension'] + 1, lifted=False)
        return cls(HalfspacePqClassifier.from_dict(inner))


def load_classifier(data):
    """
    Rebuild a halfspace classifier from its document or JSON string.
    """
    if isinstance(data, str):
        data = json.loads(data)
    if data.get('lifted'):
        return LiftedPqClassifier.from_dict(data)
    return HalfspacePqClassifier.from_dict(data)


def evaluate_selective(classifier, x):
    """
    Evaluate a decision list on a single unit point.

    Returns:
        tuple[int, int]: ``(selected, label)``; the label of an unselected
        point is the default +1 and carries no information.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (classifier.dimension,):
        raise DimensionMismatchError(
            'classifier expects dimension {}, got shape {}'.format(
                classifier.dimension, x.shape))
    if abs(np.linalg.norm(x) - 1.0) > ToleranceEnum.UNIT_NORM.value:
        logger.debug('evaluating a non unit point, norm %.6g', np.linalg.norm(x))
    return classifier.evaluate(x)


# ================================ LEARNING ====================================


def learn_halfspace(points, eps, delta, oracle, rng, sample_count=None, max_iters=None):
    """
    PQ learn a homogeneous halfspace from unit train points and
    membership queries.

    Every round runs :func:`forster_decompose` on the remaining points
    ``R_i``, learns the target in stage coordinates with margin parameter
    ``1 / (2 sqrt(n))`` and drops the points the new stage selects. The
    loop stops once ``|R_i| / |S| < eps / 2`` or after
    ``ceil(4 n ln(2 / eps))`` rounds; each Forster and margin call runs at
    failure budget ``delta / (24 n ln(2 / eps))``.

    Args:
        points (array_like): ``(size, n)`` unit train points.
        eps (float): rejection target.
        delta (float): failure probability.
        oracle (MembershipOracle): homogeneous target over R^n.
        rng (np.random.Generator): random stream.
        sample_count (int): margin learner query count override.
        max_iters (int): Forster iteration budget override.

    Returns:
        HalfspacePqClassifier: decision list; ``trace`` holds a
        :class:`LearnTrace`.
    """
    points = unit_points(points)
    size, n = points.shape
    if oracle.dimension != n:
        raise DimensionMismatchError(
            'oracle dimension {} differs from point dimension {}'.format(oracle.dimension, n))
    log_term = math.log(2.0 / eps)
    gamma = 1.0 / (2.0 * math.sqrt(n))
    round_cap = math.ceil(4 * n * log_term)
    round_delta = delta / (24 * n * log_term)
    queries_before = oracle.query_count

    classifier = HalfspacePqClassifier(n)
    trace = LearnTrace()
    residual = points
    while len(classifier.stages) < round_cap:
        if len(residual) / size < eps / 2.0:
            trace.exit_reason = 'mass'
            break
        stage = forster_decompose(residual, round_delta, rng, max_iters=max_iters)
        if not stage.contains(residual).any():
            logger.warning('forster stage of dimension %d holds no remaining point',
                           stage.dimension)
            trace.exit_reason = 'empty'
            break
        margin_classifier = learn_high_margin_halfspace(
            TransformedOracle(oracle, stage), stage.dimension, gamma, round_delta, rng,
            sample_count=sample_count)
        entry = StageClassifier(stage, margin_classifier)
        accepted, _ = entry.accepts(residual)
        classifier.stages.append(entry)
        trace.stage_dimensions.append(stage.dimension)
        residual = residual[~accepted]
        logger.info('round %d: stage dimension %d selected %d points, %d left',
                    len(classifier.stages), stage.dimension, int(accepted.sum()), len(residual))
    else:
        trace.exit_reason = 'mass' if len(residual) / size < eps / 2.0 else 'round_cap'

    trace.rounds = len(classifier.stages)
    trace.residual_fraction = len(residual) / size
    trace.query_count = oracle.query_count - queries_before
    classifier.trace = trace
    return classifier


def learn_general_halfspace(points, eps, delta, oracle, rng, sample_count=None, max_iters=None):
    """
    PQ learn ``sign(w . x - theta)`` by learning the homogeneous lifted
    target on the normalized lifts of the train points.

    Args:
        points (array_like): ``(size, n)`` train points.
        oracle (MembershipOracle): general halfspace over R^n.

    Returns:
        LiftedPqClassifier: classifier over R^n.
    """
    lifted, _ = normalize_rows(homogenize(np.atleast_2d(points)))
    inner = learn_halfspace(lifted, eps, delta, LiftedOracle(oracle), rng,
                            sample_count=sample_count, max_iters=max_iters)
    return LiftedPqClassifier(inner)
