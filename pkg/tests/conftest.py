import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from assembly.material import Material  # noqa: E402
from meshes.macro_splits import apply_split  # noqa: E402
from meshes.simplicial_mesh import (Mesh, unit_cube_mesh,  # noqa: E402
                                    unit_square_mesh)

REFERENCE_TRIANGLE = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
REFERENCE_TET = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                 [0.0, 0.0, 1.0]]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def reference_triangle():
    return Mesh(REFERENCE_TRIANGLE, [[0, 1, 2]])


@pytest.fixture
def reference_tet():
    return Mesh(REFERENCE_TET, [[0, 1, 2, 3]])


@pytest.fixture
def square():
    return unit_square_mesh(1)


@pytest.fixture
def cube():
    return unit_cube_mesh(1)


@pytest.fixture
def square_macros():
    return apply_split(unit_square_mesh(1), '2d-p2')


@pytest.fixture
def material2d():
    return Material(0.5, 1.0, 2)


@pytest.fixture
def material3d():
    return Material(0.5, 1.0, 3)
