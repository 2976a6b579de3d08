import numpy as np

from assembly.quadrature import NORM_DEGREE, simplex_quadrature
from meshes.simplicial_mesh import from_barycentric
from spaces.tensors import frobenius, from_matrix


def _exact_at(fn, x, shape):
    values = np.asarray(fn(x.reshape(-1, x.shape[-1])), dtype=float)

    return values.reshape(shape)


def error_norms(stress_space, sigma, displacement_space, u, exact_stress,
                exact_divergence, exact_displacement, degree=NORM_DEGREE):
    """
    Quadrature errors of a discrete solution against exact fields.

    Args:
        stress_space (FESpace): Space of sigma.
        sigma (np.ndarray): Stress coefficients.
        displacement_space (FESpace): Space of u.
        u (np.ndarray): Displacement coefficients.
        exact_stress (callable): x (npts, n) -> (npts, n, n).
        exact_divergence (callable): x -> (npts, n), the divergence of the
            exact stress (the load f).
        exact_displacement (callable): x -> (npts, n).
        degree (int): Quadrature degree.

    Output:
        errors (dict): L2_stress, Hdiv_stress and L2_displacement.
    """
    mesh = stress_space.mesh
    dim = mesh.dim
    rule = simplex_quadrature(dim, degree)
    x = from_barycentric(mesh.cell_points, rule.points)
    weights = np.abs(mesh.volumes)[:, None] * rule.unit_weights[None]

    sigma_h = stress_space.function(sigma)
    diff = sigma_h.evaluate_bary(rule.points) - from_matrix(
        _exact_at(exact_stress, x, x.shape + (dim,)), dim)
    stress_sq = np.sum(weights * frobenius(diff, diff, dim))

    div_diff = sigma_h.divergence().evaluate_bary(rule.points) - \
        _exact_at(exact_divergence, x, x.shape)
    div_sq = np.sum(weights * np.sum(div_diff ** 2, axis=-1))

    u_h = displacement_space.function(u)
    u_diff = u_h.evaluate_bary(rule.points) - \
        _exact_at(exact_displacement, x, x.shape)
    u_sq = np.sum(weights * np.sum(u_diff ** 2, axis=-1))

    return {'L2_stress': float(np.sqrt(stress_sq)),
            'Hdiv_stress': float(np.sqrt(stress_sq + div_sq)),
            'L2_displacement': float(np.sqrt(u_sq))}
