"""Barycentric monomials, Lagrange bases and piecewise polynomials on simplices.

A polynomial of degree k on a simplex is stored as coefficients of the
homogeneous barycentric monomials lambda^alpha with |alpha| = k. Derivatives
are taken with respect to the barycentric variables and mapped to physical
derivatives with the constant barycentric gradients of each cell.
"""
import itertools
import math
import numpy as np

from functools import lru_cache

MAX_LAGRANGE_DEGREE = 4


class UnsupportedDegreeError(ValueError):
    pass


def _frozen(array):
    array.setflags(write=False)

    return array


@lru_cache(maxsize=None)
def multi_indices(dim, degree):
    """
    Exponents of the barycentric monomials of a given degree.

    Args:
        dim (int): Spatial dimension n, so there are n + 1 barycentric
            variables.
        degree (int): Total degree.

    Output:
        alphas (np.ndarray): Integer array of shape (nmono, n + 1), in
            reverse lexicographic order so the first row is the vertex 0
            monomial.
    """
    if degree < 0:
        return _frozen(np.zeros((0, dim + 1), dtype=int))

    alphas = []
    for combo in itertools.combinations_with_replacement(range(dim + 1),
                                                         degree):
        alpha = [0] * (dim + 1)
        for i in combo:
            alpha[i] += 1
        alphas.append(alpha)
    alphas = np.array(sorted(alphas, reverse=True), dtype=int)

    return _frozen(alphas.reshape(-1, dim + 1))


@lru_cache(maxsize=None)
def _index_of(dim, degree):
    return {tuple(alpha): i for i, alpha in
            enumerate(multi_indices(dim, degree))}


def n_monomials(dim, degree):
    return math.comb(dim + degree, dim)


def lattice_points(dim, degree):
    """Barycentric coordinates of the P_k lattice, ordered like multi_indices."""
    if degree == 0:
        return np.full((1, dim + 1), 1.0 / (dim + 1))

    return multi_indices(dim, degree) / float(degree)


def eval_monomials(alphas, bary):
    bary = np.atleast_2d(bary)

    return np.prod(bary[:, None, :] ** alphas[None, :, :], axis=2)


@lru_cache(maxsize=None)
def derivative_matrix(dim, degree, var):
    """Map coefficients of p (degree k) to those of dp/dlambda_var (k - 1)."""
    alphas = multi_indices(dim, degree)
    lower = _index_of(dim, degree - 1)
    mat = np.zeros((len(lower), len(alphas)))
    for col, alpha in enumerate(alphas):
        if alpha[var] > 0:
            beta = list(alpha)
            beta[var] -= 1
            mat[lower[tuple(beta)], col] = alpha[var]

    return _frozen(mat)


@lru_cache(maxsize=None)
def elevation_matrix(dim, degree):
    """Rewrite a degree k polynomial as degree k + 1 via sum(lambda) = 1."""
    alphas = multi_indices(dim, degree)
    upper = _index_of(dim, degree + 1)
    mat = np.zeros((len(upper), len(alphas)))
    for col, alpha in enumerate(alphas):
        for var in range(dim + 1):
            beta = list(alpha)
            beta[var] += 1
            mat[upper[tuple(beta)], col] += 1.0

    return _frozen(mat)


def moments(alphas, dim):
    """Exact averages of lambda^alpha over a simplex: n! alpha! / (|alpha| + n)!."""
    alphas = np.atleast_2d(alphas)
    out = np.empty(len(alphas))
    for i, alpha in enumerate(alphas):
        num = math.factorial(dim) * np.prod(
            [math.factorial(int(a)) for a in alpha])
        out[i] = num / math.factorial(int(np.sum(alpha)) + dim)

    return out


@lru_cache(maxsize=None)
def monomial_gram(dim, degree_a, degree_b):
    """Averages of lambda^alpha lambda^beta, i.e. the L2 Gram over |K|."""
    alphas = multi_indices(dim, degree_a)
    betas = multi_indices(dim, degree_b)
    sums = alphas[:, None, :] + betas[None, :, :]
    gram = moments(sums.reshape(-1, dim + 1), dim)

    return _frozen(gram.reshape(len(alphas), len(betas)))


@lru_cache(maxsize=None)
def lagrange_coefficients(dim, degree):
    """
    Monomial coefficients of the nodal P_k basis.

    Output:
        coeffs (np.ndarray): Shape (nmono, nnode); column j holds Phi_j,
            which is one at lattice node j and zero at the others.
    """
    if degree < 0 or degree > MAX_LAGRANGE_DEGREE:
        raise UnsupportedDegreeError(
            'unsupported degree {} (expected 0..{})'.format(
                degree, MAX_LAGRANGE_DEGREE))

    vander = eval_monomials(multi_indices(dim, degree),
                            lattice_points(dim, degree))

    return _frozen(np.linalg.solve(vander, np.eye(len(vander))))


def tabulate_lagrange(dim, degree, bary):
    """Nodal basis values at barycentric points, shape (npts, nnode)."""
    return eval_monomials(multi_indices(dim, degree), bary) @ \
        lagrange_coefficients(dim, degree)


def tabulate_lagrange_derivatives(dim, degree, bary):
    """dPhi_j/dlambda_l at barycentric points, shape (n + 1, npts, nnode)."""
    if degree == 0:
        return np.zeros((dim + 1, len(np.atleast_2d(bary)), 1))
    mono = eval_monomials(multi_indices(dim, degree - 1), bary)
    coeffs = lagrange_coefficients(dim, degree)

    return np.stack([mono @ derivative_matrix(dim, degree, var) @ coeffs
                     for var in range(dim + 1)])


def physical_gradient_coeffs(coeffs, grad_bary, dim, degree):
    """
    Differentiate piecewise polynomials in physical coordinates.

    Args:
        coeffs (np.ndarray): (ncell, nmono_k, ...) monomial coefficients.
        grad_bary (np.ndarray): (ncell, n + 1, n) barycentric gradients.

    Output:
        grad (np.ndarray): (ncell, nmono_{k-1}, ..., n) coefficients of the
            physical partial derivatives.
    """
    partials = np.stack([
        np.tensordot(derivative_matrix(dim, degree, var), coeffs,
                     axes=([1], [1])).swapaxes(0, 1)
        for var in range(dim + 1)], axis=-1)

    return np.einsum('k...l,kls->k...s', partials, grad_bary)


class PiecewisePoly(object):
    """
    A polynomial of fixed degree on each cell of a simplicial complex.

    Args:
        cell_points (np.ndarray): (ncell, n + 1, n) vertex coordinates of
            the cells the polynomial lives on.
        degree (int): Polynomial degree on every cell.
        coeffs (np.ndarray): (ncell, nmono, ncomp) monomial coefficients.
        kind (str): 'scalar', 'vector' or 'tensor' (symmetric, stored by
            independent components).
    """

    def __init__(self, cell_points, degree, coeffs, kind='scalar'):
        self.cell_points = np.asarray(cell_points, dtype=float)
        self.dim = self.cell_points.shape[2]
        self.degree = degree
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim == 2:
            self.coeffs = self.coeffs[:, :, None]
        self.kind = kind
        assert self.coeffs.shape[1] == n_monomials(self.dim, degree), \
            'coefficient count does not match degree {}'.format(degree)

    @classmethod
    def from_nodal(cls, cell_points, degree, nodal, kind='scalar'):
        """Build from Lagrange nodal values of shape (ncell, nnode, ncomp)."""
        nodal = np.asarray(nodal, dtype=float)
        if nodal.ndim == 2:
            nodal = nodal[:, :, None]
        dim = np.shape(cell_points)[2]
        coeffs = np.einsum('mj,kja->kma',
                           lagrange_coefficients(dim, degree), nodal)

        return cls(cell_points, degree, coeffs, kind)

    @property
    def ncomp(self):
        return self.coeffs.shape[2]

    @property
    def ncell(self):
        return self.coeffs.shape[0]

    def grad_bary(self):
        from meshes.simplicial_mesh import barycentric_gradients

        return barycentric_gradients(self.cell_points)

    def evaluate_bary(self, bary, cells=None):
        """
        Values at barycentric points.

        If cells is None every point is evaluated on every cell and the
        output has shape (ncell, npts, ncomp); otherwise bary[i] is taken
        on cells[i] and the output has shape (npts, ncomp).
        """
        mono = eval_monomials(multi_indices(self.dim, self.degree), bary)
        if cells is None:
            return np.einsum('pm,kma->kpa', mono, self.coeffs)

        return np.einsum('pm,pma->pa', mono, self.coeffs[cells])

    def __call__(self, x, cells):
        from meshes.simplicial_mesh import to_barycentric

        x = np.atleast_2d(x)
        cells = np.broadcast_to(np.asarray(cells, dtype=int), (len(x),))
        bary = np.stack([to_barycentric(self.cell_points[c], xi)
                         for c, xi in zip(cells, x)])

        return self.evaluate_bary(bary, cells)

    def gradient(self):
        """Component-wise gradient, comps laid out as (ncomp, n) flattened."""
        if self.degree == 0:
            coeffs = np.zeros((self.ncell, 1, self.ncomp * self.dim))
            return PiecewisePoly(self.cell_points, 0, coeffs, 'vector')

        grad = physical_gradient_coeffs(self.coeffs, self.grad_bary(),
                                        self.dim, self.degree)

        return PiecewisePoly(self.cell_points, self.degree - 1,
                             grad.reshape(self.ncell, -1,
                                          self.ncomp * self.dim),
                             'vector')

    def hessian(self):
        """Second derivatives of a scalar field, comps (xx, xy, ..) as (n, n)."""
        assert self.ncomp == 1, 'hessian is defined for scalar fields'

        return self.gradient().gradient()

    def divergence(self):
        """Row-wise divergence of a symmetric tensor field."""
        from spaces.tensors import divergence_tensor

        assert self.kind == 'tensor', 'divergence needs a tensor field'
        grad = self.gradient().coeffs.reshape(self.ncell, -1, self.ncomp,
                                              self.dim)
        coeffs = np.einsum('kmas,isa->kmi', grad,
                           divergence_tensor(self.dim))

        return PiecewisePoly(self.cell_points, max(self.degree - 1, 0),
                             coeffs, 'vector')


def lagrange_basis(degree, cell_points):
    """
    Nodal P_k basis on one cell.

    Args:
        degree (int): Polynomial degree, 1..4.
        cell_points (np.ndarray): (n + 1, n) vertex coordinates.

    Output:
        basis (list): One scalar PiecewisePoly per lattice node.
    """
    if degree < 1 or degree > MAX_LAGRANGE_DEGREE:
        raise UnsupportedDegreeError(
            'unsupported degree {} (expected 1..{})'.format(
                degree, MAX_LAGRANGE_DEGREE))

    cell_points = np.asarray(cell_points, dtype=float)[None]
    dim = cell_points.shape[2]
    coeffs = lagrange_coefficients(dim, degree)

    return [PiecewisePoly(cell_points, degree, coeffs[None, :, j:j + 1])
            for j in range(coeffs.shape[1])]
