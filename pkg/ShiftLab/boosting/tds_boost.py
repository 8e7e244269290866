#!/usr/bin/python
"""
Booster turning a TDS learner into a PQ learner.

The program is grown level by level. Every node estimates how often the
train law (``b = 1``) and the test law (``b = 0``) reach it; rarely visited
nodes become leaves labelled with the other law, nodes where the learner
accepts become predicting leaves, and the remaining nodes split their
traffic with a weak distinguisher extracted from the rejecting learner.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ShiftLab.base.sampling import (
    EstimateSpec,
    LabeledBatch,
    LabeledSampler,
    MixtureSampler,
    Sampler,
    draw_points,
    estimate_probability,
    rejection_sample_many,
)
from ShiftLab.base.selective import MajorityHypothesis
from ShiftLab.boosting.program import (
    AcceptedLeafNode,
    AgnosticLeafNode,
    BoostedSelectiveClassifier,
    BranchingProgram,
    InternalNode,
    LevelLeafNode,
    RareLeafNode,
)
from ShiftLab.boosting.weak_distinguisher import Fail, get_weak_distinguisher
from ShiftLab.constants import BoostEnum, BoostModeEnum
from ShiftLab.errors import AllRunsRejectedError, SamplerExhaustedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoostParams:
    """
    Construction parameters of the branching program.

    Attributes:
        levels (int): number of levels ``T``.
        delta_prime (float): failure probability of every estimate.
        repetitions (int): learner runs behind a majority hypothesis.
        p_min (float): visit mass under which a node is rare.
        gamma1 (float): accuracy of the visit mass estimates.
        gamma2 (float): accuracy of the routing bias estimates.
        a_min (float): acceptance rate making a node a predicting leaf.
        accept_gamma (float): accuracy of the acceptance estimates.
        eta (float): agnostic threshold, None in realizable mode.
        cap_factor (float): consecutive rejections allowed per conditional
            draw, in units of ``1 / p_min``.
    """
    levels: int
    delta_prime: float
    repetitions: int
    p_min: float
    gamma1: float
    gamma2: float
    a_min: float = BoostEnum.A_MIN.value
    accept_gamma: float = BoostEnum.ACCEPT_GAMMA.value
    eta: Optional[float] = None
    cap_factor: float = BoostEnum.CAP_FACTOR.value

    def __post_init__(self):
        if self.levels < 1 or self.repetitions < 1:
            raise ValueError('levels and repetitions must be at least 1')
        for name in ('delta_prime', 'p_min', 'gamma1', 'gamma2', 'a_min', 'accept_gamma'):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError('{} must lie in (0, 1), got {}'.format(name, value))
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ValueError('eta must lie in (0, 1], got {}'.format(self.eta))

    @property
    def agnostic(self):
        return self.eta is not None

    @property
    def mode(self):
        return BoostModeEnum.AGNOSTIC.value if self.agnostic else BoostModeEnum.REALIZABLE.value

    @property
    def exhaustion_cap(self):
        return math.ceil(self.cap_factor / self.p_min)

    @classmethod
    def from_learner(cls, m, eps, delta, c=BoostEnum.C.value, t_max=BoostEnum.T_MAX.value,
                     eta=None):
        """
        Parameters for a learner reading ``m`` samples per side.

        ``T = C m^2 ln(1/eps)`` is clamped to ``t_max``; the remaining
        quantities follow from ``T``. In agnostic mode the visit masses are
        estimated ``eta`` times finer.

        Args:
            m (int): learner sample complexity.
            eps (float): target error.
            delta (float): failure probability.
            c (float): the "sufficiently large" constant.
            t_max (int): level cap.
            eta (float): agnostic threshold.

        Returns:
            BoostParams: parameters.
        """
        levels = max(1, min(math.ceil(c * m ** 2 * math.log(1.0 / eps)), int(t_max)))
        gamma1 = eps / (4.0 * levels * (levels + 1))
        if eta is not None:
            gamma1 *= eta
        return cls(
            levels=levels,
            delta_prime=delta / (c * levels ** 10),
            repetitions=max(1, math.ceil(c * math.log(levels / (eps * delta)))),
            p_min=3.0 * eps / (4.0 * levels * (levels + 1)),
            gamma1=gamma1,
            gamma2=1.0 / (c * m),
            eta=eta,
        )

    def with_overrides(self, **overrides):
        """
        Replace fields by name. An overridden ``gamma1`` is a realizable
        accuracy and is made ``eta`` times finer in agnostic mode, like the
        derived one.

        Returns:
            BoostParams: updated parameters.
        """
        if 'gamma1' in overrides and self.agnostic:
            overrides['gamma1'] = overrides['gamma1'] * self.eta
        return dataclasses.replace(self, **overrides)

    @property
    def to_dict(self):
        return dataclasses.asdict(self)


# ============================ CONDITIONAL LAWS ================================


class _Conditioned(object):
    """
    Rejection sampling through the partially built program: a draw is kept
    when its routing, with fresh coins, reaches ``pos``.
    """

    def _setup(self, base, program, pos, cap):
        self.base = base
        self.program = program
        self.pos = (int(pos[0]), int(pos[1]))
        self.cap = int(cap)
        self.exhausted = False

    def _keep(self, candidates, rng):
        if isinstance(candidates, LabeledBatch):
            candidates = candidates.points
        i, t = self.pos
        index, level = self.program.route_many(candidates, rng, until_level=t)
        return (index == i) & (level == t)

    def draw(self, rng, size):
        try:
            return rejection_sample_many(self.base, self._keep, size, self.cap, rng)
        except SamplerExhaustedError:
            self.exhausted = True
            raise


class ConditionalSampler(_Conditioned, Sampler):
    """
    Unlabeled law conditioned on reaching a node.

    Args:
        base (Sampler): unconditioned law.
        program (BranchingProgram): program built up to the node's level.
        pos (tuple[int, int]): node position.
        cap (int): consecutive rejections allowed.
    """

    def __init__(self, base, program, pos, cap):
        Sampler.__init__(self, base.dimension)
        self._setup(base, program, pos, cap)


class ConditionalLabeledSampler(_Conditioned, LabeledSampler):
    """
    Labeled counterpart of :class:`ConditionalSampler`.
    """

    def __init__(self, base, program, pos, cap):
        LabeledSampler.__init__(self, base.dimension)
        self._setup(base, program, pos, cap)


# ================================ BUILDING ====================================


def majority_vote_tds(learner, train, test, eps, delta, repetitions, rng):
    """
    Run the learner ``repetitions`` times on fresh samples and take the
    pointwise majority of the accepting runs' hypotheses.

    Args:
        learner (TdsLearner): learner.
        train (LabeledSampler): train law.
        test (Sampler): test law.
        eps (float): accuracy parameter.
        delta (float): learner failure probability.
        repetitions (int): number of runs.
        rng (np.random.Generator): random stream.

    Returns:
        MajorityHypothesis: majority hypothesis, ties predicting +1.

    Raises:
        AllRunsRejectedError: when no run accepts.
    """
    if repetitions < 1:
        raise ValueError('repetitions must be at least 1')
    m = learner.sample_complexity(eps)
    hypotheses = []
    for _ in range(repetitions):
        outcome = learner.run(train.draw(rng, m), draw_points(test, rng, m), eps, delta, rng)
        if outcome.accepted:
            hypotheses.append(outcome.hypothesis)
    if not hypotheses:
        raise AllRunsRejectedError('all {} runs rejected'.format(repetitions))
    logger.debug('%d of %d runs accepted', len(hypotheses), repetitions)
    return MajorityHypothesis(hypotheses)


def _acceptance_event(learner, train, test, eps, delta):
    m = learner.sample_complexity(eps)

    def event(rng, size):
        trains = train.draw(rng, size * m)
        tests = draw_points(test, rng, size * m)
        return np.array([
            learner.run(trains[k * m:(k + 1) * m], tests[k * m:(k + 1) * m],
                        eps, delta, rng).accepted
            for k in range(size)
        ], dtype=int)
    return event


def _level_positions(program, t):
    if t == 1:
        return [1]
    positions = set()
    for node in program.level_nodes(t - 1):
        if not node.is_leaf:
            positions.update(i for i, _ in node.children)
    return sorted(positions)


def _visit_masses(program, source, t, positions, size, rng):
    points = draw_points(source, rng, size)
    index, level = program.route_many(points, rng, until_level=t)
    return {i: float(np.count_nonzero((index == i) & (level == t))) / size for i in positions}


def _build_node(program, pos, learner, train, test, eps, delta, params,
                distinguisher_params, p_train, p_test, rng):
    estimates = {'p_train': p_train, 'p_test': p_test}
    if p_train < params.p_min:
        return RareLeafNode(pos, 0, estimates)
    if p_test < params.p_min:
        return RareLeafNode(pos, 1, estimates)
    if params.agnostic and p_train <= params.eta * p_test:
        return AgnosticLeafNode(pos, estimates)

    cap = params.exhaustion_cap
    train_cond = ConditionalLabeledSampler(train, program, pos, cap)
    test_cond = ConditionalSampler(test, program, pos, cap)
    try:
        accept = estimate_probability(
            _acceptance_event(learner, train_cond, test_cond, eps, delta),
            EstimateSpec(params.accept_gamma, params.delta_prime), rng)
        estimates['accept'] = accept
        if accept >= params.a_min:
            try:
                hypothesis = majority_vote_tds(
                    learner, train_cond, test_cond, eps, delta, params.repetitions, rng)
                return AcceptedLeafNode(pos, hypothesis, estimates)
            except AllRunsRejectedError:
                logger.warning('node %d:%d estimated acceptance %.3f but every run rejected',
                               pos[0], pos[1], accept)

        outcome = get_weak_distinguisher(
            learner, train_cond, test_cond, params.delta_prime, rng,
            eps=eps, params=distinguisher_params)
        if isinstance(outcome, Fail):
            logger.warning('no distinguisher at node %d:%d (%s), abstaining',
                           pos[0], pos[1], outcome.reason)
            estimates['fail'] = outcome.reason
            return RareLeafNode(pos, 0, estimates)

        mixture = MixtureSampler([train_cond.points_sampler, test_cond])
        q_hat = estimate_probability(
            lambda r, size: outcome.evaluate_many(mixture.draw(r, size), r),
            EstimateSpec(params.gamma2, params.delta_prime), rng)
        estimates['advantage'] = outcome.estimate
        return InternalNode(pos, outcome, q_hat, estimates)
    except SamplerExhaustedError:
        logger.info('conditional law at node %d:%d exhausted', pos[0], pos[1])
        estimates['exhausted'] = 'train' if train_cond.exhausted else 'test'
        return RareLeafNode(pos, 0 if train_cond.exhausted else 1, estimates)


def build_program(learner, train, test, eps, delta, params, rng, distinguisher_params=None):
    """
    Grow the branching program level by level.

    Args:
        learner (TdsLearner): learner.
        train (LabeledSampler): train law, labelled by the target (or noisy
            labels in agnostic mode).
        test (Sampler): test law.
        eps (float): target error.
        delta (float): failure probability handed to the learner.
        params (BoostParams): construction parameters.
        rng (np.random.Generator): random stream.
        distinguisher_params (DistinguisherParams): weak distinguisher knobs.

    Returns:
        BranchingProgram: program with leaves at every reachable position.
    """
    levels = params.levels
    program = BranchingProgram(levels, params.mode, params.eta, learner, params.to_dict)
    mass_count = EstimateSpec(params.gamma1, params.delta_prime).sample_count

    for t in range(1, levels + 1):
        positions = _level_positions(program, t)
        if not positions:
            break
        p_train = _visit_masses(program, train, t, positions, mass_count, rng)
        p_test = _visit_masses(program, test, t, positions, mass_count, rng)
        for i in positions:
            estimates = {'p_train': p_train[i], 'p_test': p_test[i]}
            if t == levels:
                label = 1 if i >= levels / 2.0 else 0
                program.add_node(LevelLeafNode((i, t), label, estimates))
                continue
            program.add_node(_build_node(
                program, (i, t), learner, train, test, eps, delta, params,
                distinguisher_params, p_train[i], p_test[i], rng))
        logger.info('level %d/%d built: %s', t, levels,
                    ', '.join('{}={}'.format(n.id, n.NODE_NAME) for n in program.level_nodes(t)))
    return program


def boost(learner, train, test, eps, delta, rng, mode=BoostModeEnum.REALIZABLE.value,
          eta=None, params=None, distinguisher_params=None):
    """
    PQ learner from a TDS learner.

    Args:
        learner (TdsLearner): learner.
        train (LabeledSampler): train law.
        test (Sampler): test law.
        eps (float): target error.
        delta (float): failure probability.
        rng (np.random.Generator): random stream.
        mode (str): ``realizable`` or ``agnostic``.
        eta (float): agnostic threshold, required in agnostic mode.
        params (BoostParams): overrides :meth:`BoostParams.from_learner`.
        distinguisher_params (DistinguisherParams): weak distinguisher knobs.

    Returns:
        BoostedSelectiveClassifier: randomized selective classifier.
    """
    agnostic = BoostModeEnum(mode) is BoostModeEnum.AGNOSTIC
    if agnostic and eta is None and (params is None or params.eta is None):
        raise ValueError('agnostic mode needs eta')
    if params is None:
        params = BoostParams.from_learner(
            learner.sample_complexity(eps), eps, delta, eta=eta if agnostic else None)
    elif agnostic and params.eta is None:
        params = dataclasses.replace(params, eta=eta, gamma1=params.gamma1 * eta)
    elif not agnostic and params.eta is not None:
        params = dataclasses.replace(params, eta=None)
    program = build_program(learner, train, test, eps, delta, params, rng, distinguisher_params)
    problems = program.validate()
    if problems:
        raise RuntimeError('malformed program: {}'.format('; '.join(problems)))
    return BoostedSelectiveClassifier(program)
