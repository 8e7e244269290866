#!/usr/bin/python
# -*- coding: utf-8 -*-
from .config import ExperimentConfig
from .runner import PIPELINES, Report, run_experiment, splitmix64, trial_seeds
from .scenarios import SCENARIO_FACTORY, ScenarioFactory, generate_scenario
