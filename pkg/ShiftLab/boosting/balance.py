#!/usr/bin/python
"""
Rebalancing coin of the branching program routing.

For a bit ``w ~ Bernoulli(q)`` and ``q_hat = q`` the output is exactly
Bernoulli(1/2): with ``b`` the bit nearest ``q_hat`` (ties go to 1), ``w``
is kept with probability ``1 / (1 + 2 |q_hat - 1/2|)`` and replaced by
``1 - b`` otherwise.
"""
import numpy as np


def _nearest_bit(q_hat):
    return 1 if q_hat >= 0.5 else 0


def keep_probability(q_hat):
    """
    ``1 / (1 + 2 |q_hat - 1/2|)``, equal to ``1 / (2 max(q_hat, 1 - q_hat))``.
    """
    if not 0.0 <= q_hat <= 1.0:
        raise ValueError('q_hat must lie in [0, 1], got {}'.format(q_hat))
    return 1.0 / (1.0 + 2.0 * abs(q_hat - 0.5))


def balance_probability(q_hat, p_w):
    """
    Exact probability that :func:`balance` outputs 1 when ``w`` is 1 with
    probability ``p_w``.
    """
    keep = keep_probability(q_hat)
    return p_w * keep + (1 - _nearest_bit(q_hat)) * (1.0 - keep)


def balance_many(q_hat, w, rng):
    """
    Vectorized :func:`balance`.

    Args:
        q_hat (float): estimate of ``Pr[w = 1]``.
        w (np.ndarray): bits.
        rng (np.random.Generator): coins.

    Returns:
        np.ndarray: balanced bits.
    """
    w = np.asarray(w, dtype=int)
    keep = rng.random(len(w)) < keep_probability(q_hat)
    return np.where(keep, w, 1 - _nearest_bit(q_hat))


def balance(q_hat, w, rng):
    """
    Balanced copy of a single bit ``w``.
    """
    return int(balance_many(q_hat, np.array([w]), rng)[0])
