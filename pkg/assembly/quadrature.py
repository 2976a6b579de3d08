"""Collapsed Gauss-Jacobi rules on the reference triangle and tetrahedron.

The reference simplex is mapped from the unit square/cube by the Duffy
collapse; the Jacobian factors (1-u)^2 (1-v) are absorbed into Gauss-Jacobi
weights so m points per direction integrate total degree 2m - 1 exactly.
"""
import math
import numpy as np

from functools import lru_cache
from scipy.special import roots_jacobi

from spaces.polynomials import UnsupportedDegreeError

MAX_QUADRATURE_DEGREE = 10

FORM_DEGREE_OFFSET = 2
NORM_DEGREE = 8


class QuadratureRule(object):
    """
    Args:
        dim (int): 2 or 3.
        points (np.ndarray): (npts, n + 1) barycentric coordinates.
        weights (np.ndarray): (npts,) summing to the reference volume 1/n!.
        degree (int): Exactness degree.
    """

    def __init__(self, dim, points, weights, degree):
        self.dim = dim
        self.points = points
        self.weights = weights
        self.degree = degree

    def __len__(self):
        return len(self.weights)

    @property
    def reference_volume(self):
        return 1.0 / math.factorial(self.dim)

    @property
    def unit_weights(self):
        """Weights normalized to sum 1, i.e. averages over any cell."""
        return self.weights / self.reference_volume

    def integrate(self, values):
        """Integral over the reference simplex of values given at the points."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _gauss_jacobi_01(npts, alpha):
    """Nodes in [0, 1] and weights for the weight (1 - u)^alpha."""
    t, w = roots_jacobi(npts, alpha, 0.0)

    return 0.5 * (1.0 + t), w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=None)
def simplex_quadrature(dim, degree):
    """Rule on the reference simplex exact for total degree <= degree."""
    if degree < 0 or degree > MAX_QUADRATURE_DEGREE:
        raise UnsupportedDegreeError(
            'unsupported quadrature degree {} (expected 0..{})'.format(
                degree, MAX_QUADRATURE_DEGREE))
    assert dim in (2, 3), 'simplex rules exist for 2D and 3D'

    npts = max(1, int(math.ceil((degree + 1) / 2.0)))
    if dim == 2:
        u, wu = _gauss_jacobi_01(npts, 1.0)
        v, wv = _gauss_jacobi_01(npts, 0.0)
        uu, vv = np.meshgrid(u, v, indexing='ij')
        x = uu
        y = vv * (1.0 - uu)
        weights = np.outer(wu, wv).ravel()
        cart = np.stack([x.ravel(), y.ravel()], axis=1)
    else:
        u, wu = _gauss_jacobi_01(npts, 2.0)
        v, wv = _gauss_jacobi_01(npts, 1.0)
        w, ww = _gauss_jacobi_01(npts, 0.0)
        uu, vv, ws = np.meshgrid(u, v, w, indexing='ij')
        x = uu
        y = vv * (1.0 - uu)
        z = ws * (1.0 - uu) * (1.0 - vv)
        weights = np.einsum('i,j,k->ijk', wu, wv, ww).ravel()
        cart = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    points = np.concatenate([1.0 - cart.sum(axis=1, keepdims=True), cart],
                            axis=1)

    return QuadratureRule(dim, points, weights, degree)


def form_degree(k):
    return 2 * k + FORM_DEGREE_OFFSET


@lru_cache(maxsize=None)
def facet_quadrature(dim, degree):
    """
    Rule on a facet of an n-simplex, exact for total degree <= degree.

    Output:
        points (np.ndarray): (npts, n) barycentric coordinates on the facet.
        weights (np.ndarray): (npts,) summing to 1, so averages over a facet.
    """
    if dim == 3:
        rule = simplex_quadrature(2, degree)
        return rule.points, rule.unit_weights
    assert dim == 2, 'facet rules exist for 2D and 3D meshes'
    if degree < 0 or degree > MAX_QUADRATURE_DEGREE:
        raise UnsupportedDegreeError(
            'unsupported quadrature degree {} (expected 0..{})'.format(
                degree, MAX_QUADRATURE_DEGREE))
    t, w = _gauss_jacobi_01(max(1, int(math.ceil((degree + 1) / 2.0))), 0.0)

    return np.stack([1.0 - t, t], axis=1), w
