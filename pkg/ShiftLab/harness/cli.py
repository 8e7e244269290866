#!/usr/bin/python
"""
``shiftlab`` command line.

.. code-block:: console

    $ shiftlab tdsboost --config configs/tdsboost_disjoint.json --trials 30
    $ shiftlab forster check configs/data/cross.csv --eps 0.5
"""
from __future__ import annotations

import argparse
import logging
import sys

from ShiftLab.base.pointio import read_points
from ShiftLab.base.sampling import LabeledBatch
from ShiftLab.constants import ForsterEnum, ModeEnum, VersionEnum
from ShiftLab.errors import ConfigInvalidError, ShiftLabError
from ShiftLab.harness.config import ExperimentConfig
from ShiftLab.harness.runner import check_points, run_experiment

logger = logging.getLogger(__name__)


def _add_logging_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('-v', '--verbose', action='store_true', help='debug logging.')
    group.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only.')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='shiftlab', description='Distribution shift learning experiments.')
    parser.add_argument('--version', action='version', version=VersionEnum.VERSION.value)
    commands = parser.add_subparsers(dest='command', required=True)

    for mode in ModeEnum:
        sub = commands.add_parser(mode.value, help='run the {} pipeline.'.format(mode.value))
        sub.add_argument('--config', required=True, help='experiment config JSON.')
        sub.add_argument('--seed', type=int, default=None, help='master seed override.')
        sub.add_argument('--trials', type=int, default=None, help='trial count override.')
        sub.add_argument('--out', default=None, help='output directory override.')
        sub.add_argument('--workers', type=int, default=None, help='trial processes.')
        sub.add_argument('--wall-time', type=float, default=None, dest='wall_time',
                         help='per trial budget in seconds.')
        _add_logging_flags(sub)

    forster = commands.add_parser('forster', help='Forster transform utilities.')
    forster_commands = forster.add_subparsers(dest='forster_command', required=True)
    check = forster_commands.add_parser('check', help='isotropy verdict of a point file.')
    check.add_argument('file', help='CSV point file.')
    check.add_argument('--eps', type=float, default=ForsterEnum.EPS.value)
    check.add_argument('--labeled', action='store_true',
                       help='the last column holds labels.')
    _add_logging_flags(check)
    return parser


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _forster_check(args):
    points = read_points(args.file, labeled=args.labeled)
    if isinstance(points, LabeledBatch):
        points = points.points
    metrics, verdict = check_points(points, args.eps)
    for name in sorted(metrics):
        print('{}: {:g}'.format(name, metrics[name]))
    print(verdict)
    return 0


def _run(args):
    config = ExperimentConfig.load(
        args.config, mode=args.command, seed=args.seed, trials=args.trials, out=args.out,
        workers=args.workers, wall_time=args.wall_time)
    report = run_experiment(config)
    for name, values in report.aggregate.items():
        print('{:<24} mean={:.6g} std={:.6g} n={}'.format(
            name, values['mean'], values['std'], values['count']))
    print('statuses: {}'.format(
        ', '.join('{}={}'.format(k, v) for k, v in report.statuses.items())))
    return 0


def main(argv=None):
    """
    Entry point of the ``shiftlab`` script.

    Returns:
        int: exit status, 2 for invalid configs and inputs.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        if args.command == 'forster':
            return _forster_check(args)
        return _run(args)
    except ConfigInvalidError as error:
        logger.error('invalid config: %s', error)
        return 2
    except ShiftLabError as error:
        logger.error('%s: %s', error.__class__.__name__, error)
        return 2


if __name__ == '__main__':
    sys.exit(main())
