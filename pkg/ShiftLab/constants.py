#!/usr/bin/python
# -*- coding: utf-8 -*-
from enum import Enum

from .pkg_info import __version__ as _v

__doc__ = """
| The :py:mod:`ShiftLab.constants` namespace contains variables and enums
 used throughout the ShiftLab library.
"""

# ================================== PRIVATE ===================================

#: schema version written into every JSON aggregate report.
REPORT_SCHEMA_VERSION = 1

#: fixed column order of the per-trial CSV report.
CSV_COLUMNS = ('trial', 'metric', 'value')

# =================================== GLOBAL ===================================


class VersionEnum(Enum):
    """
    Current framework version.
    :py:mod:`ShiftLab.constants.VersionEnum`
    """
    #: current version string.
    VERSION = _v
    #: version major int.
    MAJOR = int(_v.split('.')[0])
    #: version minor int.
    MINOR = int(_v.split('.')[1])
    #: version patch int.
    PATCH = int(_v.split('.')[2])


class ToleranceEnum(Enum):
    """
    Floating point tolerances:
    :py:mod:`ShiftLab.constants.ToleranceEnum`
    """
    #: allowed deviation of ``||x||`` from 1 for unit inputs.
    UNIT_NORM = 1e-9
    #: distance bound for ``x in V`` subspace membership.
    MEMBERSHIP = 1e-9
    #: norms below this are treated as zero vectors.
    ZERO_NORM = 1e-12
    #: probability tables must sum to 1 within this.
    PROBABILITY_SUM = 1e-12
    #: smallest second moment eigenvalue before a subspace search.
    MIN_EIGENVALUE = 1e-8
    #: slack applied to eigenvalue band comparisons.
    EIGEN_SLACK = 1e-12


# ================================== FORSTER ===================================


class ForsterEnum(Enum):
    """
    Forster transform defaults:
    :py:mod:`ShiftLab.constants.ForsterEnum`
    """
    #: isotropy accuracy used by the subspace chain decomposition.
    EPS = 0.5
    #: iteration budget per dimension (``max_iters = ITERS_PER_DIM * n``).
    ITERS_PER_DIM = 1000

# ================================ DISTINGUISHER ===============================


class DistinguisherEnum(Enum):
    """
    Weak distinguisher search defaults:
    :py:mod:`ShiftLab.constants.DistinguisherEnum`
    """
    #: repetition constant ``C``.
    C = 8
    #: search constant ``C'``.
    C_PRIME = 4
    #: phase one acceptance gap threshold.
    GAP_THRESHOLD = 0.004
    #: phase two threshold is ``1 / (ADVANTAGE_FACTOR * m)``.
    ADVANTAGE_FACTOR = 5000
    #: total phase two evaluations allowed per search.
    EVALUATION_BUDGET = 10 ** 6
    #: failure parameter handed to the wrapped TDS learner.
    LEARNER_DELTA = 0.01
    #: fresh sample confirmations must clear their threshold by this margin.
    CONFIRM_MARGIN = 0.1


class FailReasonEnum(Enum):
    """
    Reason codes carried by :class:`ShiftLab.boosting.weak_distinguisher.Fail`:
    :py:mod:`ShiftLab.constants.FailReasonEnum`
    """
    #: no candidate training set showed an acceptance gap.
    NO_GAP = 'no_gap'
    #: every hybrid position was searched without success.
    NO_DISTINGUISHER = 'no_distinguisher'
    #: the evaluation budget ran out.
    BUDGET = 'budget'

# =================================== BOOST ====================================


class BoostEnum(Enum):
    """
    Branching program booster defaults:
    :py:mod:`ShiftLab.constants.BoostEnum`
    """
    #: the "sufficiently large constant" ``C``.
    C = 4
    #: levels are clamped to this for desk scale.
    T_MAX = 64
    #: acceptance estimate threshold for accepted leaves.
    A_MIN = 0.95
    #: additive accuracy of the acceptance estimate.
    ACCEPT_GAMMA = 0.01
    #: rejection sampling cap is ``CAP_FACTOR / p_min``.
    CAP_FACTOR = 50


class NodeKindEnum(Enum):
    """
    Branching program node kinds:
    :py:mod:`ShiftLab.constants.NodeKindEnum`
    """
    #: routing node holding a weak distinguisher and its balance estimate.
    INTERNAL = 'internal'
    #: leaf rarely visited by one of the two distributions.
    LEAF_RARE = 'leaf_rare'
    #: leaf where the TDS learner accepts with high probability.
    LEAF_ACCEPTED = 'leaf_accepted'
    #: leaf on the last level.
    LEAF_LEVEL = 'leaf_level'
    #: agnostic mode leaf with too little train mass.
    LEAF_AGNOSTIC = 'leaf_agnostic'


class BoostModeEnum(Enum):
    """
    Label model of the booster:
    :py:mod:`ShiftLab.constants.BoostModeEnum`
    """
    #: train and test labelled by the same concept.
    REALIZABLE = 'realizable'
    #: labels may disagree with every concept.
    AGNOSTIC = 'agnostic'


class PortTypeEnum(Enum):
    """
    Program connection types:
    :py:mod:`ShiftLab.constants.PortTypeEnum`
    """
    #: Connection type for input ports.
    IN = 'in'
    #: Connection type for output ports.
    OUT = 'out'

# =================================== HARNESS ==================================


class ModeEnum(Enum):
    """
    Experiment pipelines:
    :py:mod:`ShiftLab.constants.ModeEnum`
    """
    PQ_HALFSPACE = 'pq-halfspace'
    TDSBOOST = 'tdsboost'
    FORSTER_CHECK = 'forster-check'
    WEAKDIST = 'weakdist'


class ScenarioEnum(Enum):
    """
    Named shift scenario generators:
    :py:mod:`ShiftLab.constants.ScenarioEnum`
    """
    SPHERE_UNIFORM = 'sphere-uniform'
    GAUSSIAN_NORMALIZED = 'gaussian-normalized'
    SUBSPACE_CONCENTRATED = 'subspace-concentrated'
    BOUNDARY_CONCENTRATED = 'boundary-concentrated'
    DISCRETE_K = 'discrete-k'


class TrialStatusEnum(Enum):
    """
    Outcome of a single experiment trial:
    :py:mod:`ShiftLab.constants.TrialStatusEnum`
    """
    OK = 'ok'
    ERROR = 'error'
    BUDGET = 'budget'
