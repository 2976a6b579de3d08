"""Mass, divergence, load and boundary forms of the mixed problem.

Every space is carried by a broken Lagrange representation indexed by
(cell, lattice node, component) and a sparse prolongation to its global
basis, so each form is a block diagonal cell operator sandwiched between
prolongations.
"""
import logging
import math
import numpy as np
import scipy.sparse as sp

from functools import lru_cache

from assembly.quadrature import (NORM_DEGREE, facet_quadrature, form_degree,
                                 simplex_quadrature)
from meshes.simplicial_mesh import (barycentric_gradients, from_barycentric,
                                    simplex_volumes)
from spaces.polynomials import (lattice_points, tabulate_lagrange,
                                tabulate_lagrange_derivatives)
from spaces.tensors import divergence_tensor, frobenius_weights, from_matrix

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def reference_mass(dim, degree):
    """Averages of Phi_i Phi_j over a cell, independent of the cell."""
    rule = simplex_quadrature(dim, form_degree(degree))
    phi = tabulate_lagrange(dim, degree, rule.points)
    mass = (phi.T * rule.unit_weights) @ phi
    mass.setflags(write=False)

    return mass


@lru_cache(maxsize=None)
def reference_div(dim, degree):
    """D[l, m, j]: cell average of psi_m dPhi_j/dlambda_l, psi of degree k-1."""
    rule = simplex_quadrature(dim, form_degree(degree))
    psi = tabulate_lagrange(dim, degree - 1, rule.points)
    dphi = tabulate_lagrange_derivatives(dim, degree, rule.points)
    table = np.einsum('q,qm,lqj->lmj', rule.unit_weights, psi, dphi)
    table.setflags(write=False)

    return table


def block_diagonal(blocks):
    """Sparse block diagonal matrix from a (ncell, R, C) stack."""
    ncell, nrow, ncol = blocks.shape
    cells = np.arange(ncell)[:, None, None]
    rows = np.broadcast_to(cells * nrow + np.arange(nrow)[None, :, None],
                           blocks.shape)
    cols = np.broadcast_to(cells * ncol + np.arange(ncol)[None, None, :],
                           blocks.shape)
    mat = sp.coo_matrix((blocks.ravel(), (rows.ravel(), cols.ravel())),
                        shape=(ncell * nrow, ncell * ncol)).tocsr()
    mat.eliminate_zeros()

    return mat


def cell_mass_blocks(cell_points, degree, metric):
    vols = simplex_volumes(cell_points)
    local = np.kron(reference_mass(cell_points.shape[2], degree), metric)

    return vols[:, None, None] * local[None]


def cell_div_blocks(cell_points, degree):
    """
    Per-cell divergence pairing of degree-k tensors with degree-(k-1) vectors.

    Output:
        blocks (np.ndarray): (ncell, nloc_v * n, nloc * ncomp) with
            entry [(m, i), (j, a)] = integral of psi_m e_i . div(Phi_j E_a).
    """
    dim = cell_points.shape[2]
    vols = simplex_volumes(cell_points)
    grads = barycentric_gradients(cell_points)
    blocks = np.einsum('k,kls,lmj,isa->kmija', vols, grads,
                       reference_div(dim, degree), divergence_tensor(dim))
    ncell, nv, _, nloc, ncomp = blocks.shape

    return blocks.reshape(ncell, nv * dim, nloc * ncomp)


def assemble_mass(stress_space, material):
    """M[i, j] = (A phi_j, phi_i) with the compliance of material."""
    blocks = cell_mass_blocks(stress_space.cell_points, stress_space.degree,
                              material.compliance_metric())
    prolong = stress_space.prolongation

    return (prolong.T @ block_diagonal(blocks) @ prolong).tocsr()


def assemble_stress_gram(stress_space):
    """Plain L2 Gram (phi_j : phi_i) of a stress space."""
    metric = np.diag(frobenius_weights(stress_space.mesh.dim))
    blocks = cell_mass_blocks(stress_space.cell_points, stress_space.degree,
                              metric)
    prolong = stress_space.prolongation

    return (prolong.T @ block_diagonal(blocks) @ prolong).tocsr()


def assemble_displacement_mass(displacement_space):
    dim = displacement_space.mesh.dim
    blocks = cell_mass_blocks(displacement_space.cell_points,
                              displacement_space.degree, np.eye(dim))
    prolong = displacement_space.prolongation

    return (prolong.T @ block_diagonal(blocks) @ prolong).tocsr()


def assemble_div(stress_space, displacement_space):
    """B[i, j] = (div phi_j, psi_i)."""
    assert stress_space.mesh is displacement_space.mesh, \
        'spaces must live on the same mesh'
    assert displacement_space.degree == stress_space.degree - 1, \
        'displacement degree must be one below the stress degree'
    blocks = cell_div_blocks(stress_space.cell_points, stress_space.degree)
    broken = block_diagonal(blocks)

    return (displacement_space.prolongation.T @ broken @
            stress_space.prolongation).tocsr()


def quadrature_points(cell_points, degree):
    rule = simplex_quadrature(cell_points.shape[2], degree)

    return rule, from_barycentric(cell_points, rule.points)


def assemble_load(displacement_space, load_fn, degree=NORM_DEGREE):
    """F[i] = (f, psi_i) for a vectorized load callable f(x) -> (npts, n)."""
    cell_points = displacement_space.cell_points
    dim = cell_points.shape[2]
    rule, x = quadrature_points(cell_points, degree)
    values = np.asarray(load_fn(x.reshape(-1, dim))).reshape(x.shape)
    psi = tabulate_lagrange(dim, displacement_space.degree, rule.points)
    vols = simplex_volumes(cell_points)
    broken = np.einsum('k,q,qm,kqi->kmi', vols, rule.unit_weights, psi,
                       values)

    return displacement_space.prolongation.T @ broken.ravel()


def facet_measures(facet_points):
    """Length or area of facets given as (nfacet, n, n) coordinates."""
    edges = facet_points[:, 1:, :] - facet_points[:, :1, :]
    gram = np.einsum('fis,fjs->fij', edges, edges)

    return np.sqrt(np.linalg.det(gram)) / math.factorial(edges.shape[1])


def assemble_boundary(stress_space, displacement_fn, degree=NORM_DEGREE):
    """
    G[i] = <g, phi_i n> over the boundary for prescribed displacements g.

    Args:
        stress_space (FESpace): Stress space on a fine mesh.
        displacement_fn (callable): g(x) -> (npts, n) on the boundary.
        degree (int): Exactness of the facet rule.
    """
    mesh = stress_space.mesh
    dim = mesh.dim
    facets = mesh.boundary_facets()
    cells = mesh.facet_cells[facets, 0]
    points, weights = facet_quadrature(dim, degree)

    # lambda of the vertex opposite the facet is zero on it
    bary = np.zeros((len(facets), len(points), dim + 1))
    for f, local in enumerate(mesh.facet_local[facets, 0]):
        bary[f][:, [i for i in range(dim + 1) if i != local]] = points
    x = np.einsum('fpl,fls->fps', bary, mesh.cell_points[cells])
    values = np.asarray(displacement_fn(x.reshape(-1, dim))).reshape(x.shape)
    phi = tabulate_lagrange(dim, stress_space.degree, bary.reshape(
        -1, dim + 1)).reshape(len(facets), len(points), -1)
    rows = np.einsum('isa,fs->fia', divergence_tensor(dim),
                     mesh.facet_normals[facets])
    measures = facet_measures(mesh.vertices[mesh.facets[facets]])
    local = np.einsum('f,p,fpj,fpi,fia->fja', measures, weights, phi, values,
                      rows)

    broken = np.zeros((mesh.n_cells,) + local.shape[1:])
    np.add.at(broken, cells, local)
    logger.debug('boundary term over %d facets', len(facets))

    return stress_space.prolongation.T @ broken.ravel()


def interpolate_broken(cell_points, degree, fn, tensor=False):
    """
    Lagrange interpolant of a callable in broken (cell, node, comp) order.

    Tensor callables return full (npts, n, n) matrices.
    """
    dim = cell_points.shape[2]
    x = from_barycentric(cell_points, lattice_points(dim, degree))
    values = np.asarray(fn(x.reshape(-1, dim)))
    if tensor:
        values = from_matrix(values, dim)

    return values.reshape(-1)
