"""Airy stress functions and unisolvence of the composite H2 element."""
import logging
import numpy as np

from joblib import Parallel, delayed

from solvers.dense_kernels import dense_rank
from spaces.h2_composite import (LOCAL_DIM, composite_dofs,
                                 composite_nodal_basis, composite_shape_space)
from spaces.polynomials import PiecewisePoly
from verify.certificates import (DEFAULT_SEED, MIN_ANGLE_DEG,
                                 REFERENCE_VERTICES, macro_from_vertices,
                                 random_simplex)
from utils.general_utils import spawn_generators, thread_cap

logger = logging.getLogger(__name__)

COND_BOUND = 1e12
KRONECKER_TOL = 1e-9

# second gradient components are laid out (xx, xy, yx, yy)
AIRY_COMPONENTS = (3, 0, 1)
AIRY_SIGNS = (1.0, 1.0, -1.0)


def airy(q):
    """
    Airy stress of a scalar piecewise polynomial.

    Jq has components (xx, yy, xy) = (q_yy, q_xx, -q_xy).
    """
    if q.dim != 2:
        raise ValueError('the Airy operator is defined in 2D, got {}D'.format(
            q.dim))
    assert q.ncomp == 1, 'airy needs a scalar field'
    hess = q.hessian()
    coeffs = hess.coeffs[:, :, list(AIRY_COMPONENTS)] * np.array(AIRY_SIGNS)

    return PiecewisePoly(q.cell_points, hess.degree, coeffs, 'tensor')


def _macro_data(vertices):
    macro_mesh, macro = macro_from_vertices(vertices, '2d-p2')
    cell_points = macro_mesh.fine.cell_points[list(macro.cells)]

    return cell_points, macro.points


def unisolvence_check(vertices=None, cond_bound=COND_BOUND):
    """
    Evaluate the 27 degrees of freedom on a basis of U_M.

    Output:
        report (dict): dim, rank, condition number of the 27 x 27 matrix,
            the Kronecker error of the dual basis and the pass flag.
    """
    if vertices is None:
        vertices = REFERENCE_VERTICES[2]
    cell_points, points = _macro_data(vertices)
    shape = composite_shape_space(cell_points, points)
    dofs = composite_dofs(cell_points, points)
    matrix = dofs @ shape
    rank = dense_rank(matrix)
    cond = float(np.linalg.cond(matrix))
    report = {'dim': int(shape.shape[1]), 'rank': rank, 'cond': cond,
              'vertices': np.asarray(vertices, dtype=float).tolist()}
    if rank == LOCAL_DIM and cond < cond_bound:
        nodal = composite_nodal_basis(cell_points, points)
        report['kronecker_error'] = float(
            np.max(np.abs(dofs @ nodal - np.eye(LOCAL_DIM))))
    else:
        report['kronecker_error'] = float('inf')
    report['pass'] = bool(rank == LOCAL_DIM and cond < cond_bound and
                          report['kronecker_error'] < KRONECKER_TOL)

    return report


def _random_trial(rng, min_angle_deg, cond_bound):
    return unisolvence_check(random_simplex(rng, 2, min_angle_deg),
                             cond_bound)


def random_unisolvence(trials=20, seed=DEFAULT_SEED,
                       min_angle_deg=MIN_ANGLE_DEG, cond_bound=COND_BOUND,
                       n_jobs=None):
    """Unisolvence on seeded random well-shaped triangles."""
    n_jobs = thread_cap() if n_jobs is None else n_jobs
    reports = Parallel(n_jobs=n_jobs)(
        delayed(_random_trial)(rng, min_angle_deg, cond_bound)
        for rng in spawn_generators(seed, trials))
    for report in reports:
        if not report['pass']:
            logger.error('unisolvence failed: %s', report)

    return reports
