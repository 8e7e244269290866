#!/usr/bin/python
"""
Experiment runner.

Trial ``j`` of a run draws from ``numpy.random.default_rng(seed_j)`` where
``seed_j`` is the ``j``-th output of splitmix64 started at the master seed,
so a trial's results do not depend on the worker count or on the other
trials.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import signal
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ShiftLab.base.oracles import HalfspaceOracle
from ShiftLab.base.pointio import read_points
from ShiftLab.base.sampling import LabeledBatch, draw_points
from ShiftLab.base.selective import (
    empirical_rejection_rate,
    empirical_selective_error,
    rejection_rate,
    selective_error,
    sign,
)
from ShiftLab.base.types import TSDReport
from ShiftLab.boosting.tds_boost import BoostParams, boost
from ShiftLab.boosting.weak_distinguisher import DistinguisherParams, Fail, get_weak_distinguisher
from ShiftLab.constants import (
    CSV_COLUMNS,
    REPORT_SCHEMA_VERSION,
    BoostEnum,
    BoostModeEnum,
    ForsterEnum,
    ModeEnum,
    TrialStatusEnum,
    VersionEnum,
)
from ShiftLab.errors import ConfigInvalidError, WallTimeExceededError
from ShiftLab.halfspaces.forster import (
    Transform,
    anticoncentration_fraction,
    forster_transform,
    isotropy_report,
)
from ShiftLab.halfspaces.pq_halfspace import learn_general_halfspace, learn_halfspace
from ShiftLab.harness.scenarios import boundary_points, generate_scenario
from ShiftLab.learners.discrete import HistogramTds, SupportTds
from ShiftLab.learners.exact import agnostic_benchmark, exact_advantage, exact_metrics

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(state):
    """
    One splitmix64 step.

    Args:
        state (int): 64 bit state.

    Returns:
        tuple[int, int]: next state and output.
    """
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def trial_seeds(master, count):
    """
    The first ``count`` splitmix64 outputs from ``master``.
    """
    seeds = []
    state = int(master) & _MASK64
    for _ in range(count):
        state, value = splitmix64(state)
        seeds.append(value)
    return seeds


# ================================= LEARNERS ===================================

LEARNERS = {
    SupportTds.NODE_NAME: SupportTds,
    HistogramTds.NODE_NAME: HistogramTds,
}


def make_learner(options, scenario):
    """
    Args:
        options (dict): ``{'type': 'support' | 'histogram', **params}``.
        scenario (ShiftScenario): discrete scenario.

    Returns:
        TdsLearner: learner over the scenario's domain.
    """
    if scenario.domain is None:
        raise ConfigInvalidError('toy learners need a discrete scenario')
    options = dict(options)
    name = options.pop('type', SupportTds.NODE_NAME)
    if name not in LEARNERS:
        raise ConfigInvalidError('unknown learner "{}"'.format(name))
    options.setdefault('k', scenario.domain.k)
    try:
        return LEARNERS[name](**options)
    except TypeError as error:
        raise ConfigInvalidError(str(error)) from error


def _distinguisher_params(config):
    try:
        return DistinguisherParams(**config.distinguisher)
    except (TypeError, ValueError) as error:
        raise ConfigInvalidError(str(error)) from error


# ================================ PIPELINES ===================================


def pq_halfspace_pipeline(config, scenario, rng):
    options = config.halfspace
    points = draw_points(scenario.train, rng, int(options.get('train_size', 200)))
    oracle = HalfspaceOracle(scenario.target, scenario.theta)
    learn = learn_general_halfspace if scenario.theta else learn_halfspace
    classifier = learn(points, config.eps, config.delta, oracle, rng,
                       sample_count=options.get('sample_count'),
                       max_iters=options.get('max_iters'))
    trace = classifier.trace

    adversarial = boundary_points(rng, scenario.target, config.n_eval,
                                  float(options.get('adversarial_margin', 1e-3)))
    adversarial_batch = LabeledBatch(adversarial, sign(adversarial @ oracle.w - oracle.theta))
    metrics = {
        'rejection_rate': rejection_rate(classifier, scenario.train, config.n_eval, rng),
        'train_rejection_rate': empirical_rejection_rate(classifier, points),
        'selective_error': selective_error(classifier, scenario.labeled_test, config.n_eval, rng),
        'adversarial_error': empirical_selective_error(classifier, adversarial_batch),
        'query_count': trace.query_count,
        'rounds': trace.rounds,
        'residual_fraction': trace.residual_fraction,
    }
    return metrics, 'exit={}'.format(trace.exit_reason)


def tdsboost_pipeline(config, scenario, rng):
    learner = make_learner(config.learner, scenario)
    overrides = dict(config.boost)
    c = overrides.pop('c', BoostEnum.C.value)
    t_max = overrides.pop('t_max', BoostEnum.T_MAX.value)
    agnostic = config.eta is not None
    try:
        params = BoostParams.from_learner(
            learner.sample_complexity(config.eps), config.eps, config.delta,
            c=c, t_max=t_max, eta=config.eta)
        params = params.with_overrides(**overrides)
    except (TypeError, ValueError) as error:
        raise ConfigInvalidError(str(error)) from error
    mode = BoostModeEnum.AGNOSTIC.value if agnostic else BoostModeEnum.REALIZABLE.value
    classifier = boost(learner, scenario.labeled_train, scenario.test, config.eps, config.delta,
                       rng, mode=mode, eta=config.eta, params=params,
                       distinguisher_params=_distinguisher_params(config))
    program = classifier.program
    metrics = {
        'rejection_rate': rejection_rate(classifier, scenario.train, config.n_eval, rng),
        'selective_error': selective_error(classifier, scenario.labeled_test, config.n_eval, rng),
        'levels': program.levels,
        'leaves': len(program.leaves()),
        'internal_nodes': len(program.all_nodes()) - len(program.leaves()),
    }
    if scenario.domain is not None and learner.deterministic:
        exact = exact_metrics(scenario.domain, classifier)
        metrics['exact_rejection_rate'] = exact.rejection_rate
        metrics['exact_selective_error'] = exact.selective_error
        if agnostic:
            metrics['benchmark'] = agnostic_benchmark(scenario.domain)
            metrics['accuracy_constant'] = learner.accuracy_constant
    return metrics, 'root={}'.format(program.root.NODE_NAME)


def forster_check_pipeline(config, scenario, rng):
    options = config.forster
    eps = float(options.get('eps', ForsterEnum.EPS.value))
    if 'points' in options:
        points = read_points(options['points'], labeled=options.get('labeled', False))
        if isinstance(points, LabeledBatch):
            points = points.points
    elif scenario is not None:
        points = draw_points(scenario.train, rng, int(options.get('size', 100)))
    else:
        raise ConfigInvalidError('forster-check needs "points" or a scenario')
    return check_points(points, eps, options.get('max_iters'), rng=rng,
                        directions=int(options.get('directions', 100)))


def check_points(points, eps, max_iters=None, rng=None, directions=100):
    """
    Isotropy verdict of a point set, transforming it first when needed.

    With ``rng`` an isotropic result also reports the smallest share of
    points with ``|w . x| >= 1 / (2 sqrt(n))`` over ``directions`` random
    unit ``w``, next to the ``1 / (4n)`` floor.

    Returns:
        tuple[dict, str]: metrics and verdict.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    report = isotropy_report(points, eps)
    metrics = {'initial_eps': report.achieved_eps, 'transformed': 0}
    if not report.isotropic:
        outcome = forster_transform(points, eps, max_iters=max_iters)
        if not isinstance(outcome, Transform):
            metrics['subspace_dimension'] = outcome.dimension
            metrics['isotropic'] = 0
            return metrics, 'subspace, dim={}'.format(outcome.dimension)
        points = outcome.apply(points)
        report = isotropy_report(points, eps)
        metrics['transformed'] = 1
    metrics['achieved_eps'] = report.achieved_eps
    metrics['isotropic'] = int(report.isotropic)
    metrics['min_eigenvalue'] = float(report.eigenvalues[0])
    metrics['max_eigenvalue'] = float(report.eigenvalues[-1])
    if rng is not None and report.isotropic:
        n = points.shape[1]
        w = rng.standard_normal((directions, n))
        metrics['min_anticoncentration'] = min(anticoncentration_fraction(points, v) for v in w)
        metrics['anticoncentration_floor'] = 1.0 / (4 * n)
    return metrics, report.verdict


def weakdist_pipeline(config, scenario, rng):
    learner = make_learner(config.learner, scenario)
    params = _distinguisher_params(config)
    outcome = get_weak_distinguisher(learner, scenario.labeled_train, scenario.test,
                                     config.delta, rng, eps=config.eps, params=params)
    m = learner.sample_complexity(config.eps)
    metrics = {'m': m, 'threshold': params.threshold(m)}
    if isinstance(outcome, Fail):
        metrics['success'] = 0
        return metrics, 'fail={}'.format(outcome.reason)
    metrics['success'] = 1
    metrics['position'] = outcome.position
    metrics['estimate'] = outcome.estimate
    if scenario.domain is not None and learner.deterministic:
        metrics['exact_advantage'] = exact_advantage(outcome, scenario.domain)
    return metrics, 'position={}'.format(outcome.position)


PIPELINES = {
    ModeEnum.PQ_HALFSPACE.value: pq_halfspace_pipeline,
    ModeEnum.TDSBOOST.value: tdsboost_pipeline,
    ModeEnum.FORSTER_CHECK.value: forster_check_pipeline,
    ModeEnum.WEAKDIST.value: weakdist_pipeline,
}


# ================================== TRIALS ====================================


class _WallClock(object):
    """
    Raises :class:`WallTimeExceededError` in the main thread once
    ``seconds`` elapse; inert elsewhere or without a budget.
    """

    def __init__(self, seconds):
        self.seconds = seconds
        self._armed = (seconds is not None and hasattr(signal, 'SIGALRM')
                       and threading.current_thread() is threading.main_thread())

    def _expire(self, signum, frame):
        raise WallTimeExceededError('trial exceeded {:g}s'.format(self.seconds))

    def __enter__(self):
        if self._armed:
            self._previous = signal.signal(signal.SIGALRM, self._expire)
            signal.setitimer(signal.ITIMER_REAL, self.seconds)
        return self

    def __exit__(self, *exc):
        if self._armed:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, self._previous)
        return False


def run_trial(config, trial, seed):
    """
    Run one trial. Errors other than an invalid config are recorded, not
    raised; only an expired wall clock marks the trial ``budget``.

    Returns:
        dict: ``{trial, seed, status, metrics, verdict, error, elapsed}``.
    """
    rng = np.random.default_rng(seed)
    record = {'trial': trial, 'seed': seed, 'status': TrialStatusEnum.OK.value,
              'metrics': {}, 'verdict': None, 'error': None}
    start = time.perf_counter()
    try:
        with _WallClock(config.wall_time):
            scenario = None
            if config.scenario.get('name'):
                params = {k: v for k, v in config.scenario.items() if k != 'name'}
                scenario = generate_scenario(config.scenario['name'], params, rng)
            metrics, verdict = PIPELINES[config.mode](config, scenario, rng)
        record['metrics'] = {k: float(v) for k, v in metrics.items()}
        record['verdict'] = verdict
    except WallTimeExceededError as error:
        record['status'] = TrialStatusEnum.BUDGET.value
        record['error'] = str(error)
        logger.warning('trial %d: %s', trial, error)
    except ConfigInvalidError:
        raise
    except Exception as error:
        record['status'] = TrialStatusEnum.ERROR.value
        record['error'] = '{}: {}'.format(error.__class__.__name__, error)
        logger.warning('trial %d failed: %s', trial, record['error'])
    record['elapsed'] = time.perf_counter() - start
    return record


def _run_trial_args(args):
    return run_trial(*args)


# ================================== REPORT ====================================


@dataclass
class Report(object):
    """
    Outcome of :func:`run_experiment`.

    ``to_dict`` and the CSV rows are a deterministic function of the config
    and seed; wall clock times live in ``timing`` only.
    """
    config: dict
    trials: list
    timing: dict = field(default_factory=dict)

    @property
    def statuses(self):
        counts = {s.value: 0 for s in TrialStatusEnum}
        for record in self.trials:
            counts[record['status']] += 1
        return counts

    @property
    def aggregate(self):
        """
        Mean and standard deviation of every metric over the ok trials.
        """
        values = {}
        for record in self.trials:
            if record['status'] != TrialStatusEnum.OK.value:
                continue
            for name, value in record['metrics'].items():
                values.setdefault(name, []).append(value)
        aggregate = {}
        for name in sorted(values):
            data = np.asarray(values[name], dtype=float)
            aggregate[name] = {
                'mean': float(data.mean()),
                'std': float(data.std(ddof=1)) if len(data) > 1 else 0.0,
                'count': len(data),
            }
        return aggregate

    @property
    def to_dict(self) -> TSDReport:
        return {
            'schema_version': REPORT_SCHEMA_VERSION,
            'version': VersionEnum.VERSION.value,
            'config': self.config,
            'aggregate': self.aggregate,
            'statuses': self.statuses,
            'trials': [{k: v for k, v in r.items() if k != 'elapsed'} for r in self.trials],
        }

    @property
    def serial(self):
        return json.dumps(self.to_dict, indent=2, sort_keys=True)

    def rows(self):
        """
        CSV rows ``(trial, metric, value)``.
        """
        for record in self.trials:
            yield record['trial'], 'status', record['status']
            for name in sorted(record['metrics']):
                yield record['trial'], name, '{!r}'.format(record['metrics'][name])

    def write(self, out_dir, stem):
        """
        Write ``<stem>.csv``, ``<stem>.json`` and ``<stem>.timing.json``.

        Returns:
            dict: written paths by kind.
        """
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            'csv': os.path.join(out_dir, stem + '.csv'),
            'json': os.path.join(out_dir, stem + '.json'),
            'timing': os.path.join(out_dir, stem + '.timing.json'),
        }
        with open(paths['csv'], 'w', newline='') as csv_file:
            writer = csv.writer(csv_file, lineterminator='\n')
            writer.writerow(CSV_COLUMNS)
            writer.writerows(self.rows())
        with open(paths['json'], 'w') as json_file:
            json_file.write(self.serial + '\n')
        with open(paths['timing'], 'w') as json_file:
            json.dump(self.timing, json_file, indent=2)
        return paths


def run_experiment(config, write=True):
    """
    Run every trial of an experiment.

    Args:
        config (ExperimentConfig): validated config.
        write (bool): write the report files into ``config.out``.

    Returns:
        Report: report.
    """
    seeds = trial_seeds(config.seed, config.trials)
    jobs = [(config, trial, seed) for trial, seed in enumerate(seeds)]
    logger.info('running %d %s trial(s) on %d worker(s)', config.trials, config.mode,
                config.workers)
    start = time.perf_counter()
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            trials = list(executor.map(_run_trial_args, jobs))
    else:
        trials = [run_trial(*job) for job in jobs]
    timing = {
        'total': time.perf_counter() - start,
        'trials': [record['elapsed'] for record in trials],
    }
    report = Report(config.to_dict, trials, timing)
    if write:
        paths = report.write(config.out, config.mode)
        logger.info('wrote %s', ', '.join(paths.values()))
    return report
