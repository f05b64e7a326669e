import numpy as np
import pytest

from cutplane.geometry import Polytope
from cutplane.rng import RngStream


@pytest.fixture
def cube2():
    """The square [-1, 1]^2."""
    return Polytope.box([-1.0, -1.0], [1.0, 1.0])


@pytest.fixture
def triangle():
    """conv{0, e1, e2}: x >= 0, y >= 0, x + y <= 1."""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    b = np.array([0.0, 0.0, -1.0])
    return Polytope(A, b, bounding_radius=np.sqrt(2.0),
                    witness=np.array([0.25, 0.25]))


def stream(seed, sid=0):
    return RngStream(seed, sid)
