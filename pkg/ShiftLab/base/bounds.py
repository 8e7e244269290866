#!/usr/bin/python
"""
Sample size utilities.

Every count here uses natural logarithms and rounds up.
"""
import math

import numpy as np

from ShiftLab.constants import ToleranceEnum
from ShiftLab.errors import DegenerateQueryError


def hoeffding_sample_count(gamma, delta):
    """
    Two-sided Hoeffding count for a ``(gamma, delta)``-estimate of a
    Bernoulli mean.

    Args:
        gamma (float): additive accuracy in (0, 1).
        delta (float): failure probability in (0, 1).

    Returns:
        int: ``ceil(ln(2 / delta) / (2 * gamma ** 2))``, at least 1.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError('gamma must lie in (0, 1), got {}'.format(gamma))
    if not 0.0 < delta < 1.0:
        raise ValueError('delta must lie in (0, 1), got {}'.format(delta))
    return max(1, math.ceil(math.log(2.0 / delta) / (2.0 * gamma ** 2)))


def reverse_markov_bound(mean, bound):
    """
    Lower bound on ``Pr[X >= mean / 2]`` for a variable ``X <= bound``
    with expectation ``mean``.

    Args:
        mean (float): expectation of X, positive.
        bound (float): almost sure upper bound of X.

    Returns:
        float: ``mean / (2 * bound)``.
    """
    if bound <= 0.0:
        raise ValueError('bound must be positive')
    if mean > bound:
        raise ValueError('mean {} exceeds bound {}'.format(mean, bound))
    return max(0.0, mean / (2.0 * bound))


def vc_sample_size(vc_dim, eps, delta, constant=1.0):
    """
    Uniform convergence sizing for a class of VC dimension ``vc_dim``:
    ``constant * vc_dim * ln(1 / (eps * delta)) / eps ** 2``.

    Returns:
        int: sample size.
    """
    if vc_dim < 1:
        raise ValueError('vc_dim must be positive')
    return max(1, math.ceil(
        constant * vc_dim * math.log(1.0 / (eps * delta)) / eps ** 2))


def pq_halfspace_sample_size(n, rounds, eps, delta, constant=1.0):
    """
    Train set size for the membership query halfspace learner. The
    selector is a decision list of ``rounds`` stages, each a conjunction of
    a subspace test, a halfspace and a quadratic threshold, which puts its
    VC dimension at ``O(rounds * n ** 2 * log(n * rounds))``.

    Args:
        n (int): ambient dimension.
        rounds (int): number of stages.
        eps (float): rejection target.
        delta (float): failure probability.
        constant (float): leading constant.

    Returns:
        int: sample size.
    """
    vc_dim = rounds * n ** 2 * max(1.0, math.log(n * rounds))
    return vc_sample_size(math.ceil(vc_dim), eps, delta, constant)


def margin(w, x):
    """
    Margin ``|w . x| / (||w|| ||x||)`` of points relative to a homogeneous
    halfspace.

    Args:
        w (np.ndarray): normal vector.
        x (np.ndarray): single point or ``(size, n)`` array.

    Returns:
        float or np.ndarray: margins, 0 for zero points.

    Raises:
        DegenerateQueryError: for a zero normal vector.
    """
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    w_norm = np.linalg.norm(w)
    if w_norm <= ToleranceEnum.ZERO_NORM.value:
        raise DegenerateQueryError('margin of a zero normal vector')
    norms = np.linalg.norm(x, axis=-1)
    zero = norms <= ToleranceEnum.ZERO_NORM.value
    margins = np.abs(x @ w) / (np.where(zero, 1.0, norms) * w_norm)
    margins = np.where(zero, 0.0, margins)
    return float(margins) if margins.ndim == 0 else margins
