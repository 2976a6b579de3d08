"""Direct solution of the mixed elasticity saddle point system.

    [ M  B^T ] [sigma]   [G]
    [ B   0  ] [  u  ] = [F]

G carries prescribed boundary displacements and is zero for u = 0 on the
boundary.
"""
import logging
import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from assembly.forms import (assemble_boundary, assemble_div, assemble_load,
                            assemble_mass)

logger = logging.getLogger(__name__)

DENSE_CUTOFF = 5000
RESIDUAL_TOL = 1e-9


class SingularSystemError(RuntimeError):
    pass


class SaddleSystem(object):
    """
    Args:
        mass (scipy.sparse.spmatrix): (Ns, Ns) compliance mass matrix.
        div (scipy.sparse.spmatrix): (Nu, Ns) divergence matrix.
        load (np.ndarray): (Nu,) load vector.
        boundary (np.ndarray): (Ns,) boundary displacement term, zero if None.
    """

    def __init__(self, mass, div, load, boundary=None):
        self.mass = sp.csr_matrix(mass)
        self.div = sp.csr_matrix(div)
        self.load = np.asarray(load, dtype=float)
        assert self.mass.shape[0] == self.mass.shape[1] == self.div.shape[1], \
            'mass and divergence sizes disagree'
        assert self.div.shape[0] == len(self.load), \
            'load size does not match the displacement space'
        if boundary is None:
            boundary = np.zeros(self.mass.shape[0])
        self.boundary = np.asarray(boundary, dtype=float)
        assert len(self.boundary) == self.mass.shape[0], \
            'boundary term size does not match the stress space'

    @classmethod
    def assemble(cls, stress_space, displacement_space, material, load_fn,
                 boundary_fn=None):
        boundary = None
        if boundary_fn is not None:
            boundary = assemble_boundary(stress_space, boundary_fn)

        return cls(assemble_mass(stress_space, material),
                   assemble_div(stress_space, displacement_space),
                   assemble_load(displacement_space, load_fn), boundary)

    @property
    def n_stress(self):
        return self.mass.shape[0]

    @property
    def n_displacement(self):
        return self.div.shape[0]

    @property
    def size(self):
        return self.n_stress + self.n_displacement

    def matrix(self):
        return sp.bmat([[self.mass, self.div.T], [self.div, None]],
                       format='csc')

    def rhs(self):
        return np.concatenate([self.boundary, self.load])

    def residual(self, sigma, u):
        return np.concatenate([self.mass @ sigma + self.div.T @ u -
                               self.boundary,
                               self.div @ sigma - self.load])


def solve_saddle(system, dense_cutoff=DENSE_CUTOFF):
    """
    Solve the saddle point system by a direct factorization.

    Small systems use a dense symmetric solve, larger ones a sparse LU.

    Output:
        sigma (np.ndarray): Stress coefficients.
        u (np.ndarray): Displacement coefficients.
    """
    matrix = system.matrix()
    rhs = system.rhs()
    try:
        if system.size < dense_cutoff:
            solution = scipy.linalg.solve(matrix.toarray(), rhs,
                                          assume_a='sym')
        else:
            solution = scipy.sparse.linalg.splu(matrix).solve(rhs)
    except (scipy.linalg.LinAlgError, RuntimeError) as err:
        raise SingularSystemError('singular system: {}'.format(err))

    sigma = solution[:system.n_stress]
    u = solution[system.n_stress:]
    residual = np.linalg.norm(system.residual(sigma, u))
    bound = RESIDUAL_TOL * (np.linalg.norm(system.rhs()) + 1.0)
    if not np.isfinite(residual) or residual > bound:
        raise SingularSystemError(
            'singular system: residual {:.3e} above {:.3e}'.format(residual,
                                                                   bound))
    logger.debug('solved %d unknowns, residual %.3e', system.size, residual)

    return sigma, u
