import math

import numpy as np
import pytest

from laplace_panels import triangle_from_vertices

collect_ignore_glob = ["examples/*"]

SQRT3 = math.sqrt(3.0)


@pytest.fixture
def equilateral():
    return triangle_from_vertices((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, SQRT3 / 2.0, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
