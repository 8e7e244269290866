#!/usr/bin/python
"""
Named shift scenario generators.

Every generator is registered in :data:`SCENARIO_FACTORY` under its
``NODE_NAME`` alias, eg. ``"boundary-concentrated"``.
"""
from __future__ import annotations

import logging

import numpy as np

from ShiftLab.base.factory import ClassFactory, Registrable
from ShiftLab.base.oracles import HalfspaceOracle
from ShiftLab.base.sampling import FunctionSampler, MixtureSampler, SphereSampler
from ShiftLab.base.selective import sign
from ShiftLab.constants import ScenarioEnum
from ShiftLab.errors import ConfigInvalidError, RegistrationError, UnknownScenarioError
from ShiftLab.learners.discrete import DiscreteDomain, ShiftScenario

logger = logging.getLogger(__name__)


def random_unit(rng, n):
    w = rng.standard_normal(n)
    return w / np.linalg.norm(w)


def orthogonal_unit(rng, w, size):
    """
    Uniform unit vectors orthogonal to the unit vector ``w``.
    """
    u = rng.standard_normal((size, len(w)))
    u -= np.outer(u @ w, w)
    return u / np.linalg.norm(u, axis=1, keepdims=True)


class ScenarioGenerator(Registrable):
    """
    Base class of the scenario generators.

    Args:
        params (dict): generator parameters, ``n`` the dimension.
    """

    __identifier__ = 'ShiftLab.scenarios'

    #: parameters the generator understands.
    PARAMS = ('n', 'target', 'theta', 'lambda')

    def __init__(self, **params):
        unknown = set(params) - set(self.PARAMS)
        if unknown:
            raise ConfigInvalidError('scenario "{}" does not take {}'.format(
                self.NODE_NAME, ', '.join(sorted(unknown))))
        self.params = params

    def _target(self, rng, n):
        if 'target' in self.params:
            w = np.asarray(self.params['target'], dtype=float)
            if len(w) != n:
                raise ConfigInvalidError('target has {} coordinates, n is {}'.format(len(w), n))
            return w / np.linalg.norm(w)
        return random_unit(rng, n)

    def laws(self, rng, n, target):
        """
        Returns:
            tuple[Sampler, Sampler]: train and test point laws.
        """
        raise NotImplementedError

    def generate(self, rng):
        n = int(self.params.get('n', 3))
        target = self._target(rng, n)
        theta = float(self.params.get('theta', 0.0))
        train, test = self.laws(rng, n, target)
        oracle = HalfspaceOracle(target, theta)
        return ShiftScenario(
            self.NODE_NAME, train, test, lambda x: sign(x @ oracle.w - oracle.theta),
            float(self.params.get('lambda', 0.0)), target=target, theta=theta,
            params=dict(self.params))


class SphereUniform(ScenarioGenerator):
    """
    Train and test both uniform on the sphere.
    """

    NODE_NAME = ScenarioEnum.SPHERE_UNIFORM.value

    def laws(self, rng, n, target):
        return SphereSampler(n), SphereSampler(n)


class GaussianNormalized(ScenarioGenerator):
    """
    Train: normalized anisotropic Gaussian with per axis ``scales``;
    test: uniform on the sphere.
    """

    NODE_NAME = ScenarioEnum.GAUSSIAN_NORMALIZED.value
    PARAMS = ScenarioGenerator.PARAMS + ('scales',)

    def laws(self, rng, n, target):
        scales = np.asarray(self.params.get('scales', np.geomspace(1.0, 0.1, n)), dtype=float)

        def draw(r, size):
            x = r.standard_normal((size, n)) * scales
            return x / np.linalg.norm(x, axis=1, keepdims=True)
        return FunctionSampler(draw, n), SphereSampler(n)


class SubspaceConcentrated(ScenarioGenerator):
    """
    Train puts ``mass`` on the unit sphere of a random ``d`` dimensional
    subspace and the rest uniformly; test is uniform.
    """

    NODE_NAME = ScenarioEnum.SUBSPACE_CONCENTRATED.value
    PARAMS = ScenarioGenerator.PARAMS + ('d', 'mass')

    def laws(self, rng, n, target):
        d = int(self.params.get('d', max(1, n - 1)))
        mass = float(self.params.get('mass', 0.9))
        if not 1 <= d < n or not 0.0 <= mass <= 1.0:
            raise ConfigInvalidError('subspace scenario needs 1 <= d < n and mass in [0, 1]')
        basis, _ = np.linalg.qr(rng.standard_normal((n, d)))

        def draw(r, size):
            y = r.standard_normal((size, d))
            return (y / np.linalg.norm(y, axis=1, keepdims=True)) @ basis.T
        train = MixtureSampler([FunctionSampler(draw, n), SphereSampler(n)], [mass, 1.0 - mass])
        return train, SphereSampler(n)


class BoundaryConcentrated(ScenarioGenerator):
    """
    Train uniform on the sphere; test points
    ``(u + s w) / sqrt(1 + s^2)`` with ``u`` a unit vector orthogonal to the
    target and ``|s| <= margin``, so every test point lies within
    ``margin`` of the target hyperplane.
    """

    NODE_NAME = ScenarioEnum.BOUNDARY_CONCENTRATED.value
    PARAMS = ScenarioGenerator.PARAMS + ('margin',)

    def laws(self, rng, n, target):
        margin = float(self.params.get('margin', 0.01))
        if margin < 0.0:
            raise ConfigInvalidError('margin must be non-negative')
        return SphereSampler(n), FunctionSampler(
            lambda r, size: boundary_points(r, target, size, margin), n)


def boundary_points(rng, w, size, margin):
    """
    Unit points with ``|w . x| <= margin`` for a unit ``w``.
    """
    u = orthogonal_unit(rng, w, size)
    s = rng.uniform(-margin, margin, size)
    return (u + np.outer(s, w)) / np.sqrt(1.0 + s ** 2)[:, None]


class DiscreteK(ScenarioGenerator):
    """
    Finite domain given inline (``k``, ``train``, ``test``, ``concept``,
    ``lambda``) or by a scenario ``file``.
    """

    NODE_NAME = ScenarioEnum.DISCRETE_K.value
    PARAMS = ('k', 'train', 'test', 'concept', 'lambda', 'file')

    def generate(self, rng):
        if 'file' in self.params:
            domain = DiscreteDomain.load(self.params['file'])
        else:
            try:
                domain = DiscreteDomain.from_dict(self.params)
            except ValueError as error:
                raise ConfigInvalidError(str(error)) from error
        return ShiftScenario.from_domain(domain, self.NODE_NAME, domain.to_dict)


GENERATOR_CLASSES = (SphereUniform, GaussianNormalized, SubspaceConcentrated,
                     BoundaryConcentrated, DiscreteK)


class ScenarioFactory(ClassFactory):
    """
    :class:`ClassFactory` resolving generators by scenario name.
    """

    def __init__(self):
        super(ScenarioFactory, self).__init__()
        for cls in GENERATOR_CLASSES:
            self.register(cls, alias=cls.NODE_NAME)

    def generate(self, name, params, rng):
        """
        Args:
            name (str): scenario name.
            params (dict): generator parameters.
            rng (np.random.Generator): random stream.

        Returns:
            ShiftScenario: scenario.
        """
        try:
            generator = self.create_instance(name, **params)
        except RegistrationError as error:
            raise UnknownScenarioError('unknown scenario "{}"'.format(name)) from error
        logger.debug('generating scenario %s', name)
        return generator.generate(rng)


SCENARIO_FACTORY = ScenarioFactory()


def generate_scenario(name, params, rng):
    """
    Generate a named scenario, see :class:`ScenarioFactory`.
    """
    return SCENARIO_FACTORY.generate(name, params or {}, rng)
