import numpy as np
import pytest

from granex import forces as fm
from granex.pointsys import random_cloud


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def spring_gravity_system(rng, n):
    """Random cloud with a spring chain plus a few extra links, gravity and a weak trap."""
    cloud = random_cloud(rng, n)
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 3:
        pairs.append((0, n - 1))
    models = [
        fm.PairSpring(pairs, stiffness=float(rng.uniform(0.5, 3.0)), rest_length=float(rng.uniform(0.2, 1.0))),
        fm.UniformField([0.0, 0.0, -9.81]),
        fm.QuadraticTrap(0.3, [0.1, -0.2, 0.05]),
    ]
    return cloud, models
