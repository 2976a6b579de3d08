import numpy as np
import pytest

from spaces.h2_composite import LOCAL_DIM
from spaces.polynomials import PiecewisePoly, lattice_points
from verify.unisolvence import airy, random_unisolvence, unisolvence_check

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def _nodal(fn, degree, cell=TRIANGLE):
    x = lattice_points(2, degree) @ cell

    return PiecewisePoly.from_nodal(cell[None], degree, fn(x)[None])


def test_airy_of_linear_is_zero():
    q = _nodal(lambda x: 1.0 + 2.0 * x[:, 0] - x[:, 1], 1)
    assert np.allclose(airy(q).coeffs, 0.0)


def test_airy_of_quadratic():
    q = _nodal(lambda x: 0.5 * x[:, 0] ** 2, 2)
    stress = airy(q)
    assert stress.kind == 'tensor'
    # (xx, yy, xy) = (q_yy, q_xx, -q_xy)
    assert np.allclose(stress.coeffs[0, 0], [0.0, 1.0, 0.0])


def test_airy_is_divergence_free(rng):
    cell = np.array([[0.1, 0.0], [1.2, 0.3], [0.4, 0.9]])
    q = PiecewisePoly.from_nodal(cell[None], 4, rng.normal(size=(1, 15)))
    assert np.allclose(airy(q).divergence().coeffs, 0.0, atol=1e-9)


def test_airy_needs_2d(reference_tet):
    q = PiecewisePoly(reference_tet.cell_points, 1, np.ones((1, 4)))
    with pytest.raises(ValueError):
        airy(q)


def test_reference_triangle_is_unisolvent():
    report = unisolvence_check()
    assert report['pass']
    assert report['dim'] == report['rank'] == LOCAL_DIM
    assert report['kronecker_error'] < 1e-9


def test_random_triangles():
    reports = random_unisolvence(trials=2, seed=3, n_jobs=1)
    assert all(r['pass'] for r in reports)


@pytest.mark.slow
def test_many_random_triangles():
    assert all(r['pass'] for r in random_unisolvence(trials=20))
