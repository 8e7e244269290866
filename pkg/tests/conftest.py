import numpy as np
import pytest

from ShiftLab.learners.discrete import DiscreteDomain, ShiftScenario


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def disjoint_domain():
    """Train on buckets {0, 1}, test on {2, 3}, every label +1."""
    return DiscreteDomain([0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5], [1, 1, 1, 1])


@pytest.fixture
def identical_domain():
    return DiscreteDomain([0.25] * 4, [0.25] * 4, [-1, -1, 1, 1])


@pytest.fixture
def disjoint_scenario(disjoint_domain):
    return ShiftScenario.from_domain(disjoint_domain)


@pytest.fixture
def identical_scenario(identical_domain):
    return ShiftScenario.from_domain(identical_domain)
