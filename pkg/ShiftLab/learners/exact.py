#!/usr/bin/python
"""
Exact enumeration on finite domains.

Randomized programs are evaluated by pushing, for every domain point, the
probability of each routing path through the program; learners are
evaluated by enumerating every sample of the (small) sample size.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ShiftLab.boosting.balance import balance_probability
from ShiftLab.boosting.program import BoostedSelectiveClassifier
from ShiftLab.learners.discrete import threshold_class


@dataclass(frozen=True)
class ExactMetrics:
    """
    Attributes:
        selective_error (float): test mass selected and misclassified.
        rejection_rate (float): train mass not selected.
        leaf_masses (dict): ``{node id: (train mass, test mass)}``, empty
            for classifiers without a program.
    """
    selective_error: float
    rejection_rate: float
    leaf_masses: dict


def exact_node_masses(program, domain):
    """
    Probability that each domain point reaches each node.

    Args:
        program (BranchingProgram): program whose distinguishers provide
            ``one_probability``.
        domain (DiscreteDomain): finite domain.

    Returns:
        dict: ``{(i, t): np.ndarray}`` of per bucket reach probabilities.
    """
    points = domain.points
    reach = {(1, 1): np.ones(domain.k)}
    for node in program.all_nodes():
        mass = reach.setdefault(node.pos, np.zeros(domain.k))
        if node.is_leaf:
            continue
        ones = np.array([
            balance_probability(node.q_hat, node.distinguisher.one_probability(x))
            for x in points
        ])
        left, right = node.children
        reach[left] = reach.get(left, np.zeros(domain.k)) + mass * (1.0 - ones)
        reach[right] = reach.get(right, np.zeros(domain.k)) + mass * ones
    return reach


def _error_probability(labels, domain):
    wrong = (labels != domain.concept).astype(float)
    return wrong * (1.0 - domain.flip_rate) + (1.0 - wrong) * domain.flip_rate


def exact_metrics(domain, classifier):
    """
    Exact selective error on the test law and rejection rate on the train
    law.

    Args:
        domain (DiscreteDomain): finite domain, label flips included.
        classifier (SelectiveClassifier): deterministic classifier or a
            :class:`BoostedSelectiveClassifier`.

    Returns:
        ExactMetrics: metrics.
    """
    points = domain.points
    if not isinstance(classifier, BoostedSelectiveClassifier):
        selected, labels = classifier.evaluate_many(points, None)
        selected = selected.astype(float)
        error = float(np.dot(domain.test, selected * _error_probability(labels, domain)))
        rejection = float(np.dot(domain.train, 1.0 - selected))
        return ExactMetrics(error, rejection, {})

    reach = exact_node_masses(classifier.program, domain)
    error = []
    rejection = []
    leaf_masses = {}
    for leaf in classifier.program.leaves():
        mass = reach.get(leaf.pos, np.zeros(domain.k))
        leaf_masses[leaf.id] = (float(np.dot(domain.train, mass)),
                                float(np.dot(domain.test, mass)))
        if leaf.label == 1:
            wrong = _error_probability(leaf.hypothesis.predict(points), domain)
            error.append(float(np.dot(domain.test, mass * wrong)))
        else:
            rejection.append(leaf_masses[leaf.id][0])
    return ExactMetrics(math.fsum(error), math.fsum(rejection), leaf_masses)


def exact_advantage(distinguisher, domain):
    """
    ``Pr_train[D(x) = 1] - Pr_test[D(x) = 1]``.
    """
    ones = np.array([distinguisher.one_probability(x) for x in domain.points])
    return float(np.dot(domain.train - domain.test, ones))


def _acceptance(learner, domain, frozen_train, laws, eps, delta):
    """
    Exact acceptance probability when test position ``j`` is drawn from
    ``laws[j]``.
    """
    total = []
    for sample in itertools.product(range(domain.k), repeat=len(laws)):
        weight = math.prod(law[j] for law, j in zip(laws, sample))
        if weight == 0.0:
            continue
        test = np.array(sample, dtype=float).reshape(-1, 1)
        if learner.run(frozen_train, test, eps, delta, None).accepted:
            total.append(weight)
    return math.fsum(total)


def hybrid_advantages(learner, domain, frozen_train, m, eps, delta):
    """
    Per position advantages of the hybrid sweep. At position ``i`` the
    first ``i - 1`` test points follow the test law, the last ``m - i``
    the train law, and the advantage compares a train against a test
    point at position ``i``.

    Args:
        learner (TdsLearner): deterministic learner.
        domain (DiscreteDomain): finite domain.
        frozen_train (LabeledBatch): frozen train set.
        m (int): sample size.
        eps (float): accuracy handed to the learner.
        delta (float): failure probability handed to the learner.

    Returns:
        list[float]: ``m`` advantages.
    """
    advantages = []
    for position in range(1, m + 1):
        prefix = [domain.test] * (position - 1)
        suffix = [domain.train] * (m - position)
        with_train = _acceptance(learner, domain, frozen_train,
                                 prefix + [domain.train] + suffix, eps, delta)
        with_test = _acceptance(learner, domain, frozen_train,
                                prefix + [domain.test] + suffix, eps, delta)
        advantages.append(with_train - with_test)
    return advantages


def acceptance_gap(learner, domain, frozen_train, m, eps, delta):
    """
    Acceptance on an all train test sample minus acceptance on an all
    test one.
    """
    return (_acceptance(learner, domain, frozen_train, [domain.train] * m, eps, delta)
            - _acceptance(learner, domain, frozen_train, [domain.test] * m, eps, delta))


def agnostic_benchmark(domain):
    """
    Smallest summed train and test error over the threshold class.

    Returns:
        float: benchmark ``lambda``.
    """
    best = math.inf
    for hypothesis in threshold_class(domain.k):
        wrong = _error_probability(hypothesis.predict(domain.points), domain)
        best = min(best, float(np.dot(domain.train, wrong) + np.dot(domain.test, wrong)))
    return best
