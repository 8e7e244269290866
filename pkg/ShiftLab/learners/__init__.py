#!/usr/bin/python
# -*- coding: utf-8 -*-
from .discrete import (
    DiscreteDomain,
    HistogramTds,
    ShiftScenario,
    SupportTds,
    ThresholdHypothesis,
    erm_threshold,
    threshold_class,
)
from .exact import (
    ExactMetrics,
    acceptance_gap,
    agnostic_benchmark,
    exact_advantage,
    exact_metrics,
    exact_node_masses,
    hybrid_advantages,
)
