#!/usr/bin/python
# -*- coding: utf-8 -*-
from .forster import (
    ForsterStage,
    IsotropyReport,
    Subspace,
    Transform,
    anticoncentration_fraction,
    forster_decompose,
    forster_transform,
    is_radially_isotropic,
    isotropy_report,
    second_moment,
)
from .margin import MarginClassifier, learn_high_margin_halfspace, margin_sample_count
from .pq_halfspace import (
    HalfspacePqClassifier,
    LearnTrace,
    LiftedOracle,
    LiftedPqClassifier,
    StageClassifier,
    TransformedOracle,
    evaluate_selective,
    homogenize,
    learn_general_halfspace,
    learn_halfspace,
    lifted_query,
    load_classifier,
)
