import numpy as np
import scipy.linalg

from assembly.forms import reference_mass
from meshes.simplicial_mesh import simplex_volumes
from solvers.dense_kernels import null_basis
from spaces.polynomials import PiecewisePoly, lattice_points


class RigidMotionBasis(object):
    """
    Translations and infinitesimal rotations, n(n+1)/2 linear vector fields.

    The rotations are x -> W x for the skew matrices W = e_i e_j^T - e_j e_i^T,
    i < j, so every member has zero symmetric gradient.
    """

    def __init__(self, dim):
        self.dim = dim
        self.rotations = []
        for i in range(dim):
            for j in range(i + 1, dim):
                skew = np.zeros((dim, dim))
                skew[i, j], skew[j, i] = 1.0, -1.0
                self.rotations.append(skew)

    def __len__(self):
        return self.dim + len(self.rotations)

    def __call__(self, x):
        """Values of all members at points x, shape (nrm, npts, n)."""
        x = np.atleast_2d(x)
        values = [np.broadcast_to(np.eye(self.dim)[i], x.shape)
                  for i in range(self.dim)]
        values += [x @ skew.T for skew in self.rotations]

        return np.stack(values)

    def gradients(self):
        """Constant gradients of all members, shape (nrm, n, n)."""
        grads = [np.zeros((self.dim, self.dim)) for _ in range(self.dim)]

        return np.stack(grads + self.rotations)

    def symmetric_gradients(self):
        grads = self.gradients()

        return 0.5 * (grads + np.swapaxes(grads, 1, 2))

    def nodal_values(self, cell_points, degree):
        """
        Broken Lagrange coefficients of every member.

        Output:
            values (np.ndarray): (nrm, ncell * nnode * n), ordered
                (cell, node, component).
        """
        bary = lattice_points(self.dim, degree)
        x = np.einsum('pl,kls->kps', bary, cell_points).reshape(-1, self.dim)

        return self(x).reshape(len(self), -1)


def vector_mass(cell_points, degree):
    """L2 Gram of broken P_degree vector fields, (cell, node, comp) ordering."""
    dim = np.shape(cell_points)[2]
    vols = simplex_volumes(cell_points)
    blocks = [v * np.kron(reference_mass(dim, degree), np.eye(dim))
              for v in vols]

    return scipy.linalg.block_diag(*blocks)


def rm_perp_coefficients(cell_points, degree):
    """
    L2-orthonormal basis of the complement of rigid motions in V_M.

    Args:
        cell_points (np.ndarray): (ncell, n + 1, n) cells of one macro.
        degree (int): Degree k - 1 of the displacement space.

    Output:
        basis (np.ndarray): (dim V_M, dim V_M - n(n+1)/2) broken Lagrange
            coefficients.
    """
    cell_points = np.asarray(cell_points, dtype=float)
    dim = cell_points.shape[2]
    mass = vector_mass(cell_points, degree)
    rigid = RigidMotionBasis(dim).nodal_values(cell_points, degree).T
    chol = scipy.linalg.cholesky(mass, lower=True)
    # with w = L^T v, orthogonality to RM reads (L^T R)^T w = 0
    free = null_basis((chol.T @ rigid).T, mass.shape[0])

    return scipy.linalg.solve_triangular(chol.T, free, lower=False)


def rm_perp_basis(macro_mesh, macro, k):
    """RM-perp of V_M (piecewise P_{k-1}) as vector PiecewisePoly on the macro."""
    cell_points = macro_mesh.fine.cell_points[list(macro.cells)]
    ncell, dim = cell_points.shape[0], cell_points.shape[2]
    degree = k - 1
    coeffs = rm_perp_coefficients(cell_points, degree)

    return [PiecewisePoly.from_nodal(cell_points, degree,
                                     col.reshape(ncell, -1, dim), 'vector')
            for col in coeffs.T]
