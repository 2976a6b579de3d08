"""Divergence rank certificates of macro bubble spaces.

A macro bubble space maps onto the complement of the rigid motions in the
piecewise P_{k-1} vector fields exactly when its divergence matrix has rank
N_u - n(n+1)/2, with N_u the dimension of those vector fields.
"""
import logging
import numpy as np
import scipy.linalg

from joblib import Parallel, delayed

from assembly.forms import cell_div_blocks
from meshes.macro_splits import apply_split
from meshes.simplicial_mesh import Mesh, barycentric_gradients
from solvers.dense_kernels import RANK_TOL, dense_rank, singular_value_gap
from spaces.bubbles import get_family, macro_bubble_space
from spaces.rigid_motions import RigidMotionBasis
from utils.general_utils import spawn_generators, thread_cap

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
MIN_ANGLE_DEG = 15.0
MAX_DRAWS = 10000

REFERENCE_VERTICES = {
    2: [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
    3: [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
}


class Certificate(object):
    """
    Outcome of one rank test.

    Args:
        family (str): Stress family.
        n_u (int): Dimension of piecewise P_{k-1} vectors on the macro.
        n_sigma (int): Dimension of the macro bubble space.
        rank (int): Numerical rank of the divergence matrix.
        required (int): n_u - n(n+1)/2.
        sv_gap (float): Singular value ratio at the rank cutoff.
        geometry (list): Macro vertices, kept for failure reports.
    """

    def __init__(self, family, n_u, n_sigma, rank, required, sv_gap,
                 geometry=None):
        self.family = family
        self.n_u = int(n_u)
        self.n_sigma = int(n_sigma)
        self.rank = int(rank)
        self.required = int(required)
        self.sv_gap = float(sv_gap)
        self.geometry = geometry

    @property
    def passed(self):
        return self.rank == self.required

    def to_dict(self):
        out = {'family': self.family, 'N_u': self.n_u,
               'N_sigma': self.n_sigma, 'rank': self.rank,
               'required': self.required, 'sv_gap': self.sv_gap,
               'pass': self.passed}
        if not self.passed and self.geometry is not None:
            out['geometry'] = self.geometry

        return out

    def __repr__(self):
        return 'Certificate({family}, rank {rank}/{N_u}, pass={pass})'.format(
            **self.to_dict())


def macro_from_vertices(vertices, family):
    """Split a single simplex with the family's split."""
    family = get_family(family)
    vertices = np.asarray(vertices, dtype=float)
    mesh = Mesh(vertices, [list(range(len(vertices)))])
    macro_mesh = apply_split(mesh, family.split)

    return macro_mesh, macro_mesh.macros[0]


def divergence_matrix(macro_mesh, macro, bubble_space, degree=None):
    """
    B_div[i, j] = integral over the macro of div psi_j . zeta_i.

    zeta runs over the broken Lagrange basis of P_{k-1} vector fields on
    the macro cells and psi over the bubble basis.
    """
    degree = bubble_space.degree if degree is None else degree
    cell_points = macro_mesh.fine.cell_points[list(macro.cells)]
    blocks = cell_div_blocks(cell_points, degree)

    return scipy.linalg.block_diag(*blocks) @ bubble_space.coeffs


def rigid_motion_pairing(macro_mesh, macro, bubble_space):
    """Integrals of div psi_j . w for the rigid motions w, one row each."""
    degree = bubble_space.degree
    cell_points = macro_mesh.fine.cell_points[list(macro.cells)]
    rigid = RigidMotionBasis(macro_mesh.dim).nodal_values(cell_points,
                                                          degree - 1)

    return rigid @ divergence_matrix(macro_mesh, macro, bubble_space)


def rank_certificate(family, vertices=None, rank_tol=RANK_TOL):
    """
    Certify div(macro bubbles) = RM-perp on one macro.

    Args:
        family (str): '2d-p2', '3d-p3' or '3d-p2'.
        vertices (np.ndarray): Macro vertices; the reference simplex when
            omitted.
    """
    family = get_family(family)
    if vertices is None:
        vertices = REFERENCE_VERTICES[family.dim]
    macro_mesh, macro = macro_from_vertices(vertices, family)
    bubbles = macro_bubble_space(macro_mesh, macro, family)
    b_div = divergence_matrix(macro_mesh, macro, bubbles)
    dim = family.dim
    required = b_div.shape[0] - dim * (dim + 1) // 2
    rank = dense_rank(b_div, rank_tol)
    certificate = Certificate(family.name, b_div.shape[0], bubbles.dim, rank,
                              required, singular_value_gap(b_div, rank_tol),
                              np.asarray(vertices, dtype=float).tolist())
    logger.debug('%s', certificate)

    return certificate


def simplex_angles(vertices):
    """Interior angles (2D) or dihedral angles (3D) in degrees."""
    vertices = np.asarray(vertices, dtype=float)
    dim = vertices.shape[1]
    angles = []
    if dim == 2:
        for i in range(3):
            a, b = vertices[(i + 1) % 3] - vertices[i], \
                vertices[(i + 2) % 3] - vertices[i]
            cos = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
            angles.append(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))
        return np.array(angles)

    grads = barycentric_gradients(vertices[None])[0]
    for i in range(4):
        for j in range(i + 1, 4):
            cos = -grads[i] @ grads[j] / (np.linalg.norm(grads[i]) *
                                          np.linalg.norm(grads[j]))
            angles.append(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))

    return np.array(angles)


def is_well_shaped(vertices, min_angle_deg=MIN_ANGLE_DEG):
    vertices = np.asarray(vertices, dtype=float)
    edges = vertices[1:] - vertices[0]
    if abs(np.linalg.det(edges)) < 1e-12:
        return False

    return bool(np.min(simplex_angles(vertices)) >= min_angle_deg)


def random_simplex(rng, dim, min_angle_deg=MIN_ANGLE_DEG):
    """Vertices uniform in [0, 1]^n, redrawn until the angle bound holds."""
    for _ in range(MAX_DRAWS):
        vertices = rng.uniform(0.0, 1.0, size=(dim + 1, dim))
        if is_well_shaped(vertices, min_angle_deg):
            return vertices
    raise RuntimeError('no simplex with angles >= {} degrees in {} draws'
                       .format(min_angle_deg, MAX_DRAWS))


def _random_trial(family, rng, min_angle_deg, rank_tol):
    vertices = random_simplex(rng, get_family(family).dim, min_angle_deg)

    return rank_certificate(family, vertices, rank_tol)


def random_geometry_certificate(family, trials=20, seed=DEFAULT_SEED,
                                min_angle_deg=MIN_ANGLE_DEG,
                                rank_tol=RANK_TOL, n_jobs=None):
    """
    Rank certificates on seeded random well-shaped macros.

    Each trial draws its geometry from its own generator spawned from the
    master seed, so results do not depend on the number of workers.
    """
    assert trials >= 1, 'trials must be positive'
    family = get_family(family).name
    n_jobs = thread_cap() if n_jobs is None else n_jobs
    certificates = Parallel(n_jobs=n_jobs)(
        delayed(_random_trial)(family, rng, min_angle_deg, rank_tol)
        for rng in spawn_generators(seed, trials))
    failed = [c for c in certificates if not c.passed]
    for certificate in failed:
        logger.error('rank certificate failed: %s', certificate.to_dict())

    return certificates
