#!/usr/bin/python
# -*- coding: utf-8 -*-
"""
**ShiftLab** is a toolkit for learning under distribution shift: PQ
(selective) learners built from testable learners, membership query
halfspace learners with Forster transforms, and a reproducible experiment
harness.

example code:

.. code-block:: python
    :linenos:

    import dataclasses

    import numpy as np

    from ShiftLab import BoostParams, DiscreteDomain, ShiftScenario, SupportTds, boost
    from ShiftLab.learners import exact_metrics

    rng = np.random.default_rng(7)
    domain = DiscreteDomain(train=[0.5, 0.5, 0.0, 0.0],
                            test=[0.0, 0.0, 0.5, 0.5],
                            concept=[1, 1, 1, 1])
    scenario = ShiftScenario.from_domain(domain)
    learner = SupportTds(k=4, m=4)
    params = BoostParams.from_learner(4, eps=0.1, delta=0.1, t_max=6)
    params = dataclasses.replace(params, gamma1=0.01, accept_gamma=0.05)

    classifier = boost(learner, scenario.labeled_train, scenario.test,
                       eps=0.1, delta=0.1, rng=rng, params=params)
    print(exact_metrics(domain, classifier))
"""
from .pkg_info import __version__ as VERSION
from .pkg_info import __license__ as LICENSE

# core
from .base.oracles import Accept, HalfspaceOracle, MembershipOracle, Reject, TdsLearner
from .base.sampling import EstimateSpec, LabeledBatch, estimate_probability, rejection_sample
from .base.selective import SelectiveClassifier, rejection_rate, selective_error

# halfspaces
from .halfspaces.forster import forster_decompose, forster_transform, is_radially_isotropic
from .halfspaces.margin import learn_high_margin_halfspace
from .halfspaces.pq_halfspace import learn_general_halfspace, learn_halfspace

# boosting
from .boosting.balance import balance
from .boosting.program import BoostedSelectiveClassifier, BranchingProgram
from .boosting.tds_boost import BoostParams, boost, build_program, majority_vote_tds
from .boosting.weak_distinguisher import Fail, get_weak_distinguisher

# toy learners & harness
from .learners.discrete import DiscreteDomain, HistogramTds, ShiftScenario, SupportTds
from .harness.config import ExperimentConfig
from .harness.runner import run_experiment
from .harness.scenarios import generate_scenario


__version__ = VERSION
__all__ = [
    'Accept',
    'BoostParams',
    'BoostedSelectiveClassifier',
    'BranchingProgram',
    'DiscreteDomain',
    'EstimateSpec',
    'ExperimentConfig',
    'Fail',
    'HalfspaceOracle',
    'HistogramTds',
    'LICENSE',
    'LabeledBatch',
    'MembershipOracle',
    'Reject',
    'SelectiveClassifier',
    'ShiftScenario',
    'SupportTds',
    'TdsLearner',
    'VERSION',
    'balance',
    'boost',
    'build_program',
    'estimate_probability',
    'forster_decompose',
    'forster_transform',
    'generate_scenario',
    'get_weak_distinguisher',
    'is_radially_isotropic',
    'learn_general_halfspace',
    'learn_halfspace',
    'learn_high_margin_halfspace',
    'majority_vote_tds',
    'rejection_rate',
    'rejection_sample',
    'run_experiment',
    'selective_error',
]
