"""Affine maps between simplices and the transforms they induce on fields.

Fields are callables on batches of points. The transforms only use matrix
products, so they accept numpy arrays as well as torch tensors, which lets
derivative identities be checked with torch.func.
"""
import numpy as np
import torch

MAP_TOL = 1e-12


class SingularMapError(ValueError):
    pass


def _like(matrix, x):
    if isinstance(x, torch.Tensor):
        return torch.as_tensor(matrix, dtype=x.dtype, device=x.device)

    return matrix


class AffineMap(object):
    """
    x = B x_hat + b.

    Args:
        matrix (np.ndarray): (n, n) invertible matrix B.
        offset (np.ndarray): (n,) translation b.
    """

    def __init__(self, matrix, offset=None):
        self.matrix = np.array(matrix, dtype=float)
        dim = self.matrix.shape[0]
        self.offset = np.zeros(dim) if offset is None else \
            np.array(offset, dtype=float)
        self.det = float(np.linalg.det(self.matrix))
        scale = max(np.max(np.abs(self.matrix)), 1.0) ** dim
        if abs(self.det) <= MAP_TOL * scale:
            raise SingularMapError('singular affine map (det {:.3e})'.format(
                self.det))
        self.inverse_matrix = np.linalg.inv(self.matrix)

    @classmethod
    def from_simplex(cls, points):
        """Map from the reference simplex (origin and unit points) to points."""
        points = np.asarray(points, dtype=float)

        return cls((points[1:] - points[0]).T, points[0])

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, x_hat):
        return x_hat @ _like(self.matrix.T, x_hat) + _like(self.offset, x_hat)

    def inverse(self):
        return AffineMap(self.inverse_matrix,
                         -self.inverse_matrix @ self.offset)

    def compose(self, other):
        """self after other."""
        return AffineMap(self.matrix @ other.matrix,
                         self.matrix @ other.offset + self.offset)


def covariant_vector(amap, v_hat):
    """v(x) = B^{-T} v_hat(x_hat); maps rigid motions onto rigid motions."""
    pull = amap.inverse()

    def v(x):
        return v_hat(pull(x)) @ _like(amap.inverse_matrix, x)

    return v


def piola_stress(amap, tau_hat):
    """tau(x) = B tau_hat(x_hat) B^T for tau_hat returning (npts, n, n)."""
    pull = amap.inverse()

    def tau(x):
        b = _like(amap.matrix, x)
        return b @ tau_hat(pull(x)) @ b.T

    return tau


def piola_divergence(amap, div_tau_hat):
    """div tau(x) = B div_hat tau_hat(x_hat), the divergence of piola_stress."""
    pull = amap.inverse()

    def div_tau(x):
        return div_tau_hat(pull(x)) @ _like(amap.matrix.T, x)

    return div_tau
