import math

import numpy as np
import pytest

from ShiftLab.errors import BudgetExceededError, NonUnitInputError
from ShiftLab.halfspaces.forster import (
    ForsterStage,
    Subspace,
    Transform,
    anticoncentration_fraction,
    forster_decompose,
    forster_transform,
    inverse_sqrtm,
    is_radially_isotropic,
    isotropy_report,
    satisfies_counting_condition,
)

CROSS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def _normalize(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _in_subspace(rng, n, d, size):
    basis, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return _normalize(rng.standard_normal((size, d))) @ basis.T


def _fuzzed(rng):
    """General position sets, sets with a heavy subspace and sets with a light one."""
    n = int(rng.integers(2, 7))
    size = int(rng.integers(4 * n, 160))
    kind = int(rng.integers(3))
    if kind == 0 or n == 2 and kind == 2:
        return _normalize(rng.standard_normal((size, n)))
    d = int(rng.integers(1, n))
    fraction = 0.95 if kind == 1 else 0.5 * d / n
    inside = max(1, int(fraction * size))
    points = np.vstack([_in_subspace(rng, n, d, inside),
                        _normalize(rng.standard_normal((size - inside, n)))])
    return points[rng.permutation(size)]


class TestIsotropy:

    def test_cross_is_isotropic(self):
        assert is_radially_isotropic(CROSS, 0.5)
        report = isotropy_report(CROSS, 0.5)
        assert report.verdict == 'isotropic, eps=0'
        np.testing.assert_allclose(report.eigenvalues, [0.5, 0.5])

    def test_line_is_not(self):
        points = np.array([[1.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        report = isotropy_report(points, 0.5)
        assert not report.isotropic
        assert report.verdict.startswith('not isotropic')

    def test_non_unit_input(self):
        with pytest.raises(NonUnitInputError):
            forster_transform(np.array([[2.0, 0.0], [0.0, 1.0]]))

    def test_inverse_sqrtm(self):
        matrix = np.array([[4.0, 1.0], [1.0, 3.0]])
        root = inverse_sqrtm(matrix)
        np.testing.assert_allclose(root @ matrix @ root, np.eye(2), atol=1e-12)


class TestForsterTransform:

    def test_isotropic_input_keeps_identity(self):
        outcome = forster_transform(CROSS, 0.5)
        assert isinstance(outcome, Transform)
        np.testing.assert_allclose(outcome.matrix, np.eye(2))

    def test_anisotropic_cloud(self, rng):
        points = _normalize(rng.standard_normal((300, 3)) * [10.0, 1.0, 0.1])
        outcome = forster_transform(points, 0.1)
        assert isinstance(outcome, Transform)
        assert is_radially_isotropic(outcome.apply(points), 0.1)

    def test_heavy_line(self, rng):
        line = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        points = np.vstack([np.repeat(line, 45, axis=0),
                            _normalize(rng.standard_normal((10, 3)))])
        outcome = forster_transform(points, 0.5)
        assert isinstance(outcome, Subspace)
        assert outcome.dimension == 1
        assert satisfies_counting_condition(points, outcome.basis)
        np.testing.assert_allclose(np.abs(outcome.basis[:, 0]), [1.0, 0.0, 0.0], atol=1e-9)

    def test_only_certified_outcomes(self, rng):
        budget = 0
        for _ in range(60):
            points = _fuzzed(rng)
            try:
                outcome = forster_transform(points, 0.5)
            except BudgetExceededError:
                budget += 1
                continue
            if isinstance(outcome, Transform):
                images = outcome.apply(points)
                n = points.shape[1]
                eigenvalues = np.linalg.eigvalsh(images.T @ images / len(images))
                assert np.all(eigenvalues >= 0.5 / n - 1e-12)
                assert np.all(eigenvalues <= 1.5 / n + 1e-12)
            else:
                assert satisfies_counting_condition(points, outcome.basis)
        assert budget <= 3

    def test_anticoncentration(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            points = _normalize(rng.standard_normal((int(rng.integers(4 * n, 200)), n)))
            outcome = forster_transform(points, 0.5)
            assert isinstance(outcome, Transform)
            images = outcome.apply(points)
            for w in _normalize(rng.standard_normal((100, n))):
                assert anticoncentration_fraction(images, w) >= 1.0 / (4 * n)


class TestForsterDecompose:

    def test_planar_mass_gives_plane_stage(self, rng):
        plane = np.column_stack([_normalize(rng.standard_normal((180, 2))), np.zeros(180)])
        points = np.vstack([plane, _normalize(rng.standard_normal((20, 3)))])
        stage = forster_decompose(points, 0.1, rng)
        assert stage.dimension == 2
        inside = stage.contains(points)
        assert inside.sum() * 3 > 2 * len(points)
        images, valid = stage.transform(points[inside])
        assert valid.all()
        assert is_radially_isotropic(images, 0.5)

    def test_moderate_planar_mass_keeps_full_space(self, rng):
        plane = np.column_stack([_normalize(rng.standard_normal((120, 2))), np.zeros(120)])
        points = np.vstack([plane, _normalize(rng.standard_normal((80, 3)))])
        stage = forster_decompose(points, 0.1, rng)
        assert stage.dimension == 3
        images, valid = stage.transform(points)
        assert valid.all()
        assert is_radially_isotropic(images, 0.5)

    def test_transformed_direction_preserves_labels(self, rng):
        points = _normalize(rng.standard_normal((200, 4)) * [5.0, 1.0, 1.0, 0.2])
        stage = forster_decompose(points, 0.1, rng)
        w = rng.standard_normal(4)
        images, _ = stage.transform(points)
        np.testing.assert_array_equal(np.sign(images @ stage.transformed_direction(w)),
                                      np.sign(points @ w))

    def test_pullback_inverts_transform_direction(self, rng):
        points = _normalize(rng.standard_normal((100, 3)) * [3.0, 1.0, 0.5])
        stage = forster_decompose(points, 0.1, rng)
        images, _ = stage.transform(points)
        back = stage.pullback(images)
        cosines = np.sum(_normalize(back) * points, axis=1)
        np.testing.assert_allclose(cosines, 1.0, atol=1e-9)

    def test_stage_document(self, rng):
        points = _normalize(rng.standard_normal((50, 3)))
        stage = forster_decompose(points, 0.1, rng)
        rebuilt = ForsterStage.from_dict(stage.to_dict)
        np.testing.assert_array_equal(rebuilt.matrix, stage.matrix)
        assert math.isclose(abs(np.linalg.det(rebuilt.basis)), 1.0)
