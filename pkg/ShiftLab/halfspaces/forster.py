#!/usr/bin/python
"""
Radial isotropy and the Forster transform.

A unit point set ``S`` in R^n is in ``eps``-approximate radial isotropic
position when every eigenvalue of ``(1/|S|) sum x x^T`` lies in
``[(1 - eps)/n, (1 + eps)/n]``. :func:`forster_transform` either finds a
matrix ``A`` putting ``{Ax / ||Ax||}`` in that position or a subspace ``W``
holding more than ``dim(W)/n`` of the points. Both outcomes are verified
before they are returned.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ShiftLab.constants import ForsterEnum, ToleranceEnum
from ShiftLab.errors import BudgetExceededError, NonUnitInputError

logger = logging.getLogger(__name__)

_MAX_CONDITION = 1e12
_REFINE_RADII = (1e-1, 1e-2, 1e-4, 1e-7)


def unit_points(points):
    """
    Validate a unit point set.

    Args:
        points (array_like): ``(size, n)`` points.

    Returns:
        np.ndarray: float copy of the points.

    Raises:
        NonUnitInputError: a norm deviates from 1 beyond tolerance.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not len(points):
        raise ValueError('empty point set')
    norms = np.linalg.norm(points, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > ToleranceEnum.UNIT_NORM.value)
    if len(bad):
        raise NonUnitInputError(
            'point {} has norm {!r}'.format(int(bad[0]), float(norms[bad[0]])))
    return points


def normalize_rows(points):
    """
    Scale every row to unit norm; rows below the zero tolerance stay zero.

    Returns:
        tuple[np.ndarray, np.ndarray]: normalized rows and the mask of
        rows that could be normalized.
    """
    norms = np.linalg.norm(points, axis=1)
    valid = norms >= ToleranceEnum.ZERO_NORM.value
    scaled = np.zeros_like(points)
    scaled[valid] = points[valid] / norms[valid, None]
    return scaled, valid


def second_moment(points):
    """
    Empirical second moment ``(1/|S|) sum x x^T`` of unit points.
    """
    points = unit_points(points)
    return points.T @ points / len(points)


def _in_band(eigenvalues, n, eps):
    slack = ToleranceEnum.EIGEN_SLACK.value
    low = (1.0 - eps) / n - slack
    high = (1.0 + eps) / n + slack
    return bool(np.all((eigenvalues >= low) & (eigenvalues <= high)))


def is_radially_isotropic(points, eps):
    """
    Args:
        points (array_like): unit points.
        eps (float): accuracy.

    Returns:
        bool: True when every second moment eigenvalue lies within
        ``(1 +- eps) / n``.
    """
    moment = second_moment(points)
    eigenvalues = linalg.eigh(moment, eigvals_only=True)
    return _in_band(eigenvalues, moment.shape[0], eps)


@dataclass(frozen=True)
class IsotropyReport:
    """
    Eigenvalues of a point set's second moment against the isotropy band.
    """
    eigenvalues: np.ndarray
    eps: float
    achieved_eps: float
    isotropic: bool

    @property
    def verdict(self):
        prefix = 'isotropic' if self.isotropic else 'not isotropic'
        return '{}, eps={:g}'.format(prefix, round(self.achieved_eps, 12))


def isotropy_report(points, eps):
    """
    Build the report printed by ``shiftlab forster check``.

    ``achieved_eps`` is the smallest accuracy the set satisfies,
    ``max |n * lambda - 1|``.
    """
    moment = second_moment(points)
    n = moment.shape[0]
    eigenvalues = linalg.eigh(moment, eigvals_only=True)
    achieved = float(np.max(np.abs(n * eigenvalues - 1.0)))
    return IsotropyReport(eigenvalues, eps, achieved, _in_band(eigenvalues, n, eps))


def anticoncentration_fraction(points, w):
    """
    Exact fraction of ``points`` with ``|w . x| >= 1 / (2 sqrt(n))`` for
    the unit direction of ``w``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(w, dtype=float)
    w = w / np.linalg.norm(w)
    threshold = 1.0 / (2.0 * math.sqrt(points.shape[1]))
    return float(np.mean(np.abs(points @ w) >= threshold))


def inverse_sqrtm(matrix):
    """
    ``M^(-1/2)`` of a symmetric positive definite matrix through its
    eigendecomposition.
    """
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    if eigenvalues[0] <= 0.0:
        raise np.linalg.LinAlgError('matrix is not positive definite')
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T


@dataclass(frozen=True)
class Transform:
    """
    Forster outcome: ``{Ax / ||Ax||}`` is radially isotropic.
    """
    matrix: np.ndarray

    def apply(self, points):
        """
        Normalized images ``Ax / ||Ax||``.
        """
        images, _ = normalize_rows(np.atleast_2d(points) @ self.matrix.T)
        return images


@dataclass(frozen=True)
class Subspace:
    """
    Forster outcome: the span of ``basis`` holds more than ``d/n`` of the
    points, ``d`` being the number of columns.
    """
    basis: np.ndarray

    @property
    def dimension(self):
        return self.basis.shape[1]


def subspace_membership(points, basis):
    """
    Mask of points within the membership tolerance of ``span(basis)``.

    Args:
        points (np.ndarray): ``(size, n)`` points.
        basis (np.ndarray): ``(n, d)`` orthonormal basis.

    Returns:
        np.ndarray: bool mask.
    """
    points = np.atleast_2d(points)
    residual = points - (points @ basis) @ basis.T
    return np.linalg.norm(residual, axis=1) <= ToleranceEnum.MEMBERSHIP.value


def satisfies_counting_condition(points, basis):
    """
    True when more than ``d/n`` of the points lie in ``span(basis)``.
    """
    size, n = points.shape
    inside = int(subspace_membership(points, basis).sum())
    return inside * n > basis.shape[1] * size


def _refine(points, basis):
    """
    Snap an approximate basis onto the points lying close to it.
    """
    d = basis.shape[1]
    for radius in _REFINE_RADII:
        residual = points - (points @ basis) @ basis.T
        near = points[np.linalg.norm(residual, axis=1) <= radius]
        if len(near) < d:
            return None
        left, _, _ = linalg.svd(near.T, full_matrices=False)
        basis = left[:, :d]
    return basis


def _find_subspace(points, sources):
    """
    Search the top eigenspaces of each candidate source for a subspace
    meeting the counting condition, smallest dimension first.

    Args:
        points (np.ndarray): unit points.
        sources (list[tuple[np.ndarray, np.ndarray]]): ``(eigenvectors,
            pullback)`` pairs; eigenvectors ascend with their eigenvalues
            and ``pullback`` maps them back to the original coordinates.

    Returns:
        Subspace: certified witness or None.
    """
    n = points.shape[1]
    for d in range(1, n):
        for eigenvectors, pullback in sources:
            approx = pullback @ eigenvectors[:, n - d:]
            approx = linalg.orth(approx)
            if approx.shape[1] != d:
                continue
            basis = _refine(points, approx)
            if basis is None:
                continue
            if satisfies_counting_condition(points, basis):
                return Subspace(basis)
    return None


def forster_transform(points, eps=ForsterEnum.EPS.value, max_iters=None, initial=None):
    """
    Put a unit point set in ``eps``-approximate radial isotropic position,
    or find a subspace witnessing that no such transform exists.

    Iterative scaling: with ``u_x = Ax / ||Ax||`` and
    ``M = (n/|S|) sum u_x u_x^T`` repeat ``A <- M^(-1/2) A`` until the
    images are certified isotropic. A subspace search runs once ``M``
    degenerates, ``A`` becomes ill conditioned or the iteration budget is
    spent.

    Args:
        points (array_like): ``(size, n)`` unit points.
        eps (float): isotropy accuracy in (0, 1).
        max_iters (int): iteration budget, defaults to ``1000 * n``.
        initial (np.ndarray): starting matrix, defaults to the identity.

    Returns:
        Transform or Subspace: certified outcome.

    Raises:
        BudgetExceededError: neither certificate was reached.
    """
    points = unit_points(points)
    size, n = points.shape
    if not 0.0 < eps < 1.0:
        raise ValueError('eps must lie in (0, 1), got {}'.format(eps))
    if max_iters is None:
        max_iters = ForsterEnum.ITERS_PER_DIM.value * n

    matrix = np.eye(n) if initial is None else np.array(initial, dtype=float)
    sources = [(linalg.eigh(points.T @ points / size)[1], np.eye(n))]
    last = None

    for iteration in range(max_iters):
        images, valid = normalize_rows(points @ matrix.T)
        if not valid.all():
            break
        moment = images.T @ images / size
        eigenvalues, eigenvectors = linalg.eigh(moment)
        if _in_band(eigenvalues, n, eps) and is_radially_isotropic(images, eps):
            logger.debug('isotropic after %d iterations', iteration)
            return Transform(matrix)
        last = (eigenvectors, linalg.inv(matrix))
        if eigenvalues[0] < ToleranceEnum.MIN_EIGENVALUE.value:
            logger.debug('degenerate second moment at iteration %d', iteration)
            break
        matrix = (eigenvectors / np.sqrt(n * eigenvalues)) @ eigenvectors.T @ matrix
        matrix /= np.linalg.norm(matrix, 2)
        if np.linalg.cond(matrix) > _MAX_CONDITION:
            logger.debug('ill conditioned iterate at iteration %d', iteration)
            break
    else:
        logger.debug('no certificate within %d iterations', max_iters)

    if last is not None:
        sources.append(last)
    subspace = _find_subspace(points, sources)
    if subspace is None:
        raise BudgetExceededError(
            'no isotropy or subspace certificate for {} points in R^{}'
            .format(size, n))
    logger.debug('subspace witness of dimension %d', subspace.dimension)
    return subspace


@dataclass
class ForsterStage:
    """
    Subspace ``V`` with orthonormal ``basis`` (``n x d``) and a matrix
    ``A`` (``d x d``) acting in ``V`` coordinates ``z = basis^T x``.

    Attributes:
        basis (np.ndarray): orthonormal basis of V.
        matrix (np.ndarray): invertible matrix on V.
    """
    basis: np.ndarray
    matrix: np.ndarray
    _inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        self.matrix = np.asarray(self.matrix, dtype=float)
        self._inverse = linalg.inv(self.matrix)

    @property
    def dimension(self):
        return self.basis.shape[1]

    def contains(self, points):
        """
        Returns:
            np.ndarray: mask of points in V.
        """
        return subspace_membership(points, self.basis)

    def transform(self, points):
        """
        Map points to ``A P_V x / ||A P_V x||`` in V coordinates.

        Returns:
            tuple[np.ndarray, np.ndarray]: ``(size, d)`` images and the mask
            of points whose image could be normalized.
        """
        points = np.atleast_2d(points)
        return normalize_rows((points @ self.basis) @ self.matrix.T)

    def pullback(self, images):
        """
        Map V coordinates back to R^n through ``basis A^-1``.
        """
        return (np.atleast_2d(images) @ self._inverse.T) @ self.basis.T

    def transformed_direction(self, w):
        """
        Normal ``A^-T basis^T w`` whose halfspace labels the transformed
        points exactly like ``w`` labels points of V.
        """
        return self._inverse.T @ (self.basis.T @ np.asarray(w, dtype=float))

    @property
    def to_dict(self):
        return {'basis': self.basis.tolist(), 'matrix': self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data['basis'], dtype=float),
                   np.array(data['matrix'], dtype=float))


def _random_initial(rng, d):
    gaussian = rng.standard_normal((d, d))
    initial = gaussian @ gaussian.T + d * np.eye(d)
    return initial / np.linalg.norm(initial, 2)


def forster_decompose(points, delta, rng, eps=ForsterEnum.EPS.value, max_iters=None):
    """
    Walk down a chain of witness subspaces until the remaining points admit
    a Forster transform.

    Starting from ``V = R^n`` and ``S' = S``: run :func:`forster_transform`
    on ``S'`` in V coordinates; a transform ends the walk, a subspace ``W``
    replaces ``V`` and ``S'`` by ``S' ∩ W``. Each step is retried up to
    ``ceil(ln(n / delta))`` times from random starting matrices when it
    exhausts its budget.

    Args:
        points (array_like): ``(size, n)`` unit points.
        delta (float): failure budget of the whole walk.
        rng (np.random.Generator): stream for the restarts.
        eps (float): isotropy accuracy.
        max_iters (int): iteration budget per call.

    Returns:
        ForsterStage: stage with ``|S ∩ V| > (d/n)|S|`` whose transformed
        points are ``eps``-isotropic inside V.
    """
    points = unit_points(points)
    n = points.shape[1]
    attempts = max(1, math.ceil(math.log(n / delta)))
    basis = np.eye(n)
    current = points

    for _ in range(n):
        d = basis.shape[1]
        outcome = None
        for attempt in range(attempts):
            initial = None if attempt == 0 else _random_initial(rng, d)
            try:
                outcome = forster_transform(current, eps, max_iters, initial)
                break
            except BudgetExceededError as e:
                logger.debug('attempt %d in dimension %d failed: %s', attempt, d, e)
        if outcome is None:
            raise BudgetExceededError(
                'forster decomposition failed in dimension {} after {} attempts'
                .format(d, attempts))
        if isinstance(outcome, Transform):
            logger.debug('forster stage of dimension %d over %d points', d, len(current))
            return ForsterStage(basis, outcome.matrix)
        inside = subspace_membership(current, outcome.basis)
        current, _ = normalize_rows(current[inside] @ outcome.basis)
        basis = basis @ outcome.basis
    raise BudgetExceededError('subspace chain did not terminate')
