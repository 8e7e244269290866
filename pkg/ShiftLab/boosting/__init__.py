#!/usr/bin/python
# -*- coding: utf-8 -*-
from .balance import balance, balance_many, balance_probability, keep_probability
from .program import (
    AcceptedLeafNode,
    AgnosticLeafNode,
    BoostedSelectiveClassifier,
    BranchingProgram,
    InternalNode,
    LevelLeafNode,
    RareLeafNode,
    default_factory,
)
from .tds_boost import (
    BoostParams,
    ConditionalLabeledSampler,
    ConditionalSampler,
    boost,
    build_program,
    majority_vote_tds,
)
from .weak_distinguisher import (
    AdvantageReport,
    ConstantDistinguisher,
    DistinguisherParams,
    Fail,
    TableDistinguisher,
    WeakDistinguisher,
    get_weak_distinguisher,
    measure_advantage,
)
