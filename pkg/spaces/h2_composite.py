"""Composite piecewise quartic H2 element on the four-cell 2D macro.

On a macro x0x1x2 split into K1..K4 the shape space U_M is the set of
piecewise P4 functions that are C2 at x0, have continuous value, gradient,
tangential-tangential and tangential-normal second derivatives at the edge
midpoints m1, m2, m3 and continuous value at d1 and d3. Its 27 degrees of
freedom are value, gradient and Hessian at x0, x1, x2 and the normal, the
tangential-normal and the tangential-tangential derivative at m1, m2, m3.
"""
import logging
import numpy as np
import scipy.sparse as sp

from meshes.simplicial_mesh import barycentric_gradients, to_barycentric
from solvers.dense_kernels import null_basis
from spaces.bubbles import DimensionMismatchError
from spaces.polynomials import (derivative_matrix, eval_monomials,
                                lattice_points, multi_indices)
from spaces.stress_spaces import FESpace

logger = logging.getLogger(__name__)

DEGREE = 4
JET_SIZE = 6
LOCAL_DIM = 27

# cell pairs (K_i, K_j) sharing a point, as positions in macro.cells
MIDPOINT_PAIRS = {
    'm1': ((0, 1), (0, 2), (0, 3)),
    'm2': ((0, 1),),
    'm3': ((2, 3),),
}
# macro edge carrying each midpoint
MIDPOINT_EDGES = {'m1': ('x1', 'x2'), 'm2': ('x0', 'x1'), 'm3': ('x0', 'x2')}
# cell each degree of freedom is read from
VERTEX_CELLS = {'x0': 1, 'x1': 0, 'x2': 3}
MIDPOINT_CELLS = {'m1': 0, 'm2': 0, 'm3': 2}


def jet_rows(cell_points, x):
    """
    Rows mapping P4 monomial coefficients on one cell to the 2-jet at x.

    Output:
        rows (np.ndarray): (6, 15) giving u, u_x, u_y, u_xx, u_xy, u_yy.
    """
    cell_points = np.asarray(cell_points, dtype=float)
    bary = to_barycentric(cell_points, np.atleast_2d(x))
    grads = barycentric_gradients(cell_points[None])[0]
    value = eval_monomials(multi_indices(2, DEGREE), bary)[0]
    first = np.array([
        eval_monomials(multi_indices(2, DEGREE - 1), bary)[0] @
        derivative_matrix(2, DEGREE, l) for l in range(3)])
    mono2 = eval_monomials(multi_indices(2, DEGREE - 2), bary)[0]
    second = np.array([[mono2 @ derivative_matrix(2, DEGREE - 1, m) @
                        derivative_matrix(2, DEGREE, l) for m in range(3)]
                       for l in range(3)])
    grad = np.einsum('ls,lc->sc', grads, first)
    hess = np.einsum('ls,mt,lmc->stc', grads, grads, second)

    return np.vstack([value, grad, hess[0, 0], hess[0, 1], hess[1, 1]])


def hessian_form(u, v):
    """Row r with r . (u_xx, u_xy, u_yy) = u^T Hess v."""
    return np.array([u[0] * v[0], u[0] * v[1] + u[1] * v[0], u[1] * v[1]])


def edge_frame(start, end):
    """Unit tangent from start to end and the normal (t_y, -t_x)."""
    t = np.asarray(end, dtype=float) - np.asarray(start, dtype=float)
    t = t / np.linalg.norm(t)

    return t, np.array([t[1], -t[0]])


def midpoint_rows(jets, t, n):
    """u, grad u, d_tt u and d_tn u from a 2-jet block."""
    return np.vstack([jets[:3], hessian_form(t, t) @ jets[3:],
                      hessian_form(t, n) @ jets[3:]])


def edge_dof_rows(jets, t, n):
    """d_n u, d_tn u and d_tt u from a 2-jet block."""
    return np.vstack([n @ jets[1:3], hessian_form(t, n) @ jets[3:],
                      hessian_form(t, t) @ jets[3:]])


def _cell_block(rows, cell):
    out = np.zeros((len(rows), 4 * rows.shape[1]))
    out[:, cell * rows.shape[1]:(cell + 1) * rows.shape[1]] = rows

    return out


def composite_constraints(cell_points, points):
    """
    The 33 continuity conditions of U_M on 4 x 15 monomial coefficients.

    Args:
        cell_points (np.ndarray): (4, 3, 2) cells K1..K4.
        points (dict): Named points of the macro (x_i, m_i, d_i).
    """
    rows = []
    x0 = points['x0']
    rows.append(_cell_block(jet_rows(cell_points[1], x0), 1) -
                _cell_block(jet_rows(cell_points[2], x0), 2))
    for name, pairs in sorted(MIDPOINT_PAIRS.items()):
        start, end = MIDPOINT_EDGES[name]
        t, n = edge_frame(points[start], points[end])
        for a, b in pairs:
            rows.append(
                _cell_block(midpoint_rows(jet_rows(cell_points[a],
                                                   points[name]), t, n), a) -
                _cell_block(midpoint_rows(jet_rows(cell_points[b],
                                                   points[name]), t, n), b))
    for name, (a, b) in (('d1', (0, 1)), ('d3', (2, 3))):
        rows.append(_cell_block(jet_rows(cell_points[a], points[name])[:1],
                                a) -
                    _cell_block(jet_rows(cell_points[b], points[name])[:1],
                                b))

    return np.vstack(rows)


def composite_shape_space(cell_points, points):
    """Monomial coefficient basis (60, 27) of U_M."""
    basis = null_basis(composite_constraints(cell_points, points), 60)
    if basis.shape[1] != LOCAL_DIM:
        raise DimensionMismatchError(
            'U_M dimension mismatch: {} != {}'.format(basis.shape[1],
                                                     LOCAL_DIM))

    return basis


def composite_dofs(cell_points, points, frames=None):
    """
    The 27 degrees of freedom of U_M as rows over monomial coefficients.

    Args:
        frames (dict): Optional (t, n) per midpoint name; defaults to the
            frame of the macro edge oriented from its first to second vertex.
    """
    rows = []
    for name in ('x0', 'x1', 'x2'):
        cell = VERTEX_CELLS[name]
        rows.append(_cell_block(jet_rows(cell_points[cell], points[name]),
                                cell))
    for name in ('m1', 'm2', 'm3'):
        cell = MIDPOINT_CELLS[name]
        if frames is not None and name in frames:
            t, n = frames[name]
        else:
            start, end = MIDPOINT_EDGES[name]
            t, n = edge_frame(points[start], points[end])
        jets = jet_rows(cell_points[cell], points[name])
        rows.append(_cell_block(edge_dof_rows(jets, t, n), cell))

    return np.vstack(rows)


def composite_nodal_basis(cell_points, points, frames=None):
    """Monomial coefficients (60, 27) of the basis dual to composite_dofs."""
    shape = composite_shape_space(cell_points, points)
    dofs = composite_dofs(cell_points, points, frames)

    return shape @ np.linalg.inv(dofs @ shape)


def monomials_to_nodal(ncell):
    """Block map from per-cell P4 monomial coefficients to Lagrange values."""
    vander = eval_monomials(multi_indices(2, DEGREE),
                            lattice_points(2, DEGREE))

    return np.kron(np.eye(ncell), vander)


def h2_space(macro_mesh):
    """
    Global composite H2 space U_h on a 2D macro mesh.

    Degrees of freedom are shared through the macro vertices (value,
    gradient, Hessian) and through the macro edges (normal and second
    derivatives in a frame fixed by the global vertex order), numbered
    6 v + a for vertices and 6 #V + 3 e + b for edges.

    Output:
        space (FESpace): 'H2-composite', broken nodal P4 representation.
    """
    assert macro_mesh.dim == 2 and macro_mesh.split == '2d-p2', \
        'the composite H2 space needs the 2D macro split'
    mesh = macro_mesh.fine
    corners = sorted({m.vertices[x] for m in macro_mesh.macros
                      for x in ('x0', 'x1', 'x2')})
    vertex_index = {v: i for i, v in enumerate(corners)}
    edges = sorted({tuple(sorted((m.vertices[a], m.vertices[b])))
                    for m in macro_mesh.macros
                    for a, b in MIDPOINT_EDGES.values()})
    edge_index = {e: i for i, e in enumerate(edges)}
    ndof = JET_SIZE * len(corners) + 3 * len(edges)

    nloc = len(multi_indices(2, DEGREE))
    to_nodal = monomials_to_nodal(4)
    rows, cols, vals = [], [], []
    for macro in macro_mesh.macros:
        cells = list(macro.cells)
        cell_points = mesh.cell_points[cells]
        frames = {}
        for name, (a, b) in MIDPOINT_EDGES.items():
            va, vb = sorted((macro.vertices[a], macro.vertices[b]))
            frames[name] = edge_frame(mesh.vertices[va], mesh.vertices[vb])
        nodal = to_nodal @ composite_nodal_basis(cell_points, macro.points,
                                                 frames)
        global_dofs = []
        for name in ('x0', 'x1', 'x2'):
            base = JET_SIZE * vertex_index[macro.vertices[name]]
            global_dofs.extend(range(base, base + JET_SIZE))
        for name in ('m1', 'm2', 'm3'):
            a, b = MIDPOINT_EDGES[name]
            edge = tuple(sorted((macro.vertices[a], macro.vertices[b])))
            base = JET_SIZE * len(corners) + 3 * edge_index[edge]
            global_dofs.extend(range(base, base + 3))
        broken = (np.asarray(cells)[:, None] * nloc +
                  np.arange(nloc)[None]).ravel()
        r, c = np.nonzero(np.abs(nodal) > 0.0)
        rows.append(broken[r])
        cols.append(np.asarray(global_dofs)[c])
        vals.append(nodal[r, c])

    # every broken row belongs to exactly one macro
    prolongation = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.n_cells * nloc, ndof))
    info = {'vertices': len(corners), 'edges': len(edges),
            'local_dim': LOCAL_DIM}
    logger.debug('H2 composite space: %d dofs on %d macros', ndof,
                 len(macro_mesh.macros))

    return FESpace(mesh, 'H2-composite', DEGREE, 1, prolongation, info)
