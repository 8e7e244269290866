#!/usr/bin/python
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

from ShiftLab.constants import ModeEnum
from ShiftLab.errors import ConfigInvalidError

#: knobs accepted in the per pipeline sections of a config file.
SECTION_KEYS = {
    'learner': {'type', 'k', 'm', 'delta', 'tolerance'},
    'boost': {'levels', 'delta_prime', 'repetitions', 'p_min', 'gamma1', 'gamma2',
              'a_min', 'accept_gamma', 'cap_factor', 'c', 't_max'},
    'distinguisher': {'c', 'c_prime', 'gap_threshold', 'advantage_factor',
                      'evaluation_budget', 'learner_delta', 'repetitions_override',
                      'candidates_override', 'attempts_override', 'evaluations_override',
                      'confirm_margin'},
    'halfspace': {'train_size', 'sample_count', 'max_iters', 'adversarial_margin'},
    'forster': {'points', 'labeled', 'size', 'eps', 'max_iters', 'directions'},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated experiment description.

    Attributes:
        mode (str): pipeline, see :class:`ShiftLab.constants.ModeEnum`.
        scenario (dict): ``{'name': ..., **generator params}``.
        seed (int): 64 bit master seed.
        trials (int): independent trials.
        eps (float): accuracy target.
        delta (float): failure probability.
        eta (float): agnostic threshold of the booster.
        n_eval (int): fresh draws behind every Monte-Carlo metric.
        out (str): output directory.
        workers (int): trial processes.
        wall_time (float): per trial budget in seconds.
    """
    mode: str
    scenario: dict = field(default_factory=dict)
    seed: int = 0
    trials: int = 1
    eps: float = 0.1
    delta: float = 0.1
    eta: Optional[float] = None
    n_eval: int = 10000
    out: str = 'results'
    workers: int = 1
    wall_time: Optional[float] = None
    learner: dict = field(default_factory=dict)
    boost: dict = field(default_factory=dict)
    distinguisher: dict = field(default_factory=dict)
    halfspace: dict = field(default_factory=dict)
    forster: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigInvalidError: on the first invalid value.
        """
        modes = [m.value for m in ModeEnum]
        if self.mode not in modes:
            raise ConfigInvalidError('mode "{}" is not one of {}'.format(self.mode, modes))
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigInvalidError('seed must be a 64 bit unsigned integer')
        if self.trials < 1:
            raise ConfigInvalidError('trials must be at least 1')
        if self.workers < 1:
            raise ConfigInvalidError('workers must be at least 1')
        if self.n_eval < 1:
            raise ConfigInvalidError('n_eval must be at least 1')
        if not 0.0 < self.eps < 1.0:
            raise ConfigInvalidError('eps must lie in (0, 1)')
        if not 0.0 < self.delta < 1.0:
            raise ConfigInvalidError('delta must lie in (0, 1)')
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ConfigInvalidError('eta must lie in (0, 1]')
        if self.wall_time is not None and self.wall_time <= 0:
            raise ConfigInvalidError('wall_time must be positive')
        if self.mode != ModeEnum.FORSTER_CHECK.value and not self.scenario.get('name'):
            raise ConfigInvalidError('mode "{}" needs a scenario name'.format(self.mode))
        for section, allowed in SECTION_KEYS.items():
            unknown = set(getattr(self, section)) - allowed
            if unknown:
                raise ConfigInvalidError('unknown {} keys: {}'.format(
                    section, ', '.join(sorted(unknown))))

    @property
    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data, **overrides):
        """
        Build a config, command line overrides taking precedence.

        Args:
            data (dict): config document.
            overrides: non None values replace document values.

        Returns:
            ExperimentConfig: validated config.
        """
        data = dict(data)
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalidError('unknown config keys: {}'.format(', '.join(sorted(unknown))))
        if 'mode' not in data:
            raise ConfigInvalidError('config needs a mode')
        try:
            return cls(**data)
        except TypeError as error:
            raise ConfigInvalidError(str(error)) from error

    @classmethod
    def load(cls, file_path, **overrides):
        try:
            with open(file_path) as data_file:
                data = json.load(data_file)
        except Exception as e:
            raise ConfigInvalidError('cannot read config "{}": {}'.format(file_path, e)) from e
        if not isinstance(data, dict):
            raise ConfigInvalidError('config "{}" is not a JSON object'.format(file_path))
        return cls.from_dict(data, **overrides)
