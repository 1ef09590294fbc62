import numpy as np
import pytest

from vkit.metric import space_from_points


@pytest.fixture
def square():
    """Unit square corners: sides 1, diagonals sqrt(2)."""
    return space_from_points([[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture
def line3():
    """Collinear points at 0, 1, 2."""
    return space_from_points([[0.0], [1.0], [2.0]])


@pytest.fixture
def equilateral():
    """Equilateral triangle with side exactly 1 (given as a matrix: the
    Euclidean apex coordinates would round the side below 1)."""
    from vkit.metric import validate_metric
    return validate_metric([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
