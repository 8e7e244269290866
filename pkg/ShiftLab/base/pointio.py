#!/usr/bin/python
"""
Point set CSV files: one row per point, optionally followed by a label
column holding +1 or -1.
"""
import numpy as np

from ShiftLab.base.sampling import LabeledBatch
from ShiftLab.errors import SerializationError


def read_points(file_path, labeled=False):
    """
    Read a point set.

    Args:
        file_path (str): csv file.
        labeled (bool): treat the last column as labels.

    Returns:
        np.ndarray or LabeledBatch: ``(size, n)`` points, or a batch when
        ``labeled`` is set.
    """
    try:
        rows = np.loadtxt(file_path, delimiter=',', ndmin=2, comments='#')
    except ValueError as e:
        raise SerializationError('cannot parse "{}": {}'.format(file_path, e))
    if not labeled:
        return rows
    if rows.shape[1] < 2:
        raise SerializationError('"{}" has no label column'.format(file_path))
    labels = rows[:, -1].astype(int)
    if not np.isin(labels, (-1, 1)).all():
        raise SerializationError('labels must be +1 or -1')
    return LabeledBatch(rows[:, :-1], labels)


def write_points(file_path, points, labels=None):
    """
    Write a point set, labels appended as a final column when given.
    """
    rows = np.atleast_2d(np.asarray(points, dtype=float))
    if labels is not None:
        rows = np.column_stack([rows, np.asarray(labels, dtype=float)])
    np.savetxt(file_path, rows, delimiter=',', fmt='%.17g')
