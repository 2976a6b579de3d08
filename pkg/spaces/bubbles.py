"""H(div) bubble spaces of single cells and of macro-elements.

Every constraint used here (normal trace continuity, vanishing normal
trace, continuity at a vertex, normal-normal continuity on an edge,
vanishing at a point) only involves the Lagrange values of a piecewise
P_k tensor at one lattice node, seen from the cells around it. Spaces are
therefore built one lattice node at a time: a NodeContext collects the
(cell, local node) positions of a node and each family turns it into a
matrix whose columns are admissible nodal values, in the broken ordering
(position, component).
"""
import logging
import numpy as np
import scipy.linalg

from collections import Counter

from solvers.dense_kernels import null_basis, range_basis
from spaces.polynomials import (PiecewisePoly, eval_monomials, lattice_points,
                                monomial_gram, multi_indices)
from spaces.tensors import (bilinear_row, frobenius_weights, n_components,
                            normal_trace_rows, orthonormal_complement,
                            sym_outer)
from meshes.simplicial_mesh import barycentric_gradients, simplex_volumes

logger = logging.getLogger(__name__)

NORMAL_PAIRS = ((0, 0), (0, 1), (1, 1))


class DimensionMismatchError(RuntimeError):
    pass


class EmptyBubbleSpaceError(RuntimeError):
    pass


def _unit(v):
    v = np.asarray(v, dtype=float)

    return v / np.linalg.norm(v)


def _face_normal(a, b, c):
    return _unit(np.cross(b - a, c - a))


class NodeContext(object):
    """
    One global lattice node seen from a set of cells.

    Args:
        mesh (Mesh): The fine mesh.
        lagrange (LagrangeNodes): Lattice numbering of the stress degree.
        node (int): Global node index.
        positions (np.ndarray): (npos, 2) pairs (cell, local node index),
            restricted to the cells of interest (a macro or the whole patch).
    """

    def __init__(self, mesh, lagrange, node, positions):
        self.mesh = mesh
        self.lagrange = lagrange
        self.node = node
        self.positions = np.asarray(positions, dtype=int).reshape(-1, 2)
        self.ncomp = n_components(mesh.dim)

    @property
    def key(self):
        return self.lagrange.keys[self.node]

    @property
    def support(self):
        """Vertices whose barycentric weight is non-zero at the node."""
        return tuple(v for v, _ in self.key)

    @property
    def cells(self):
        return self.positions[:, 0]

    @property
    def size(self):
        return len(self.positions) * self.ncomp

    def point(self):
        return self.lagrange.coords[self.node]

    def local_facets(self, p):
        """Local facet indices of position p that contain the node."""
        j = self.positions[p, 1]

        return np.nonzero(self.lagrange.alphas[j] == 0)[0]

    def facets(self):
        """Global facet -> list of positions whose cell has it and sees the node."""
        found = {}
        for p, cell in enumerate(self.cells):
            for i in self.local_facets(p):
                found.setdefault(int(self.mesh.cell_facets[cell, i]),
                                 []).append(p)

        return found

    def embed(self, p, block):
        """Place rows or columns acting on one position into the node block."""
        block = np.atleast_2d(block)
        out = np.zeros((self.size, block.shape[1]))
        out[p * self.ncomp:(p + 1) * self.ncomp] = block

        return out

    def place_rows(self, p, rows):
        rows = np.atleast_2d(rows)
        out = np.zeros((len(rows), self.size))
        out[:, p * self.ncomp:(p + 1) * self.ncomp] = rows

        return out

    def replicate(self, tensors):
        """Continuous columns: the same tensors at every position."""
        tensors = np.atleast_2d(tensors)

        return np.tile(tensors.T, (len(self.positions), 1))

    def edge_tangent(self):
        a, b = self.support
        verts = self.mesh.vertices

        return _unit(verts[b] - verts[a])


def hdiv_rows(ctx, boundary_zero):
    """
    Single-valued normal traces on every facet through the node.

    Facets seen from one position only are on the boundary of the context;
    their normal trace is forced to zero when boundary_zero is set.
    """
    rows = []
    for facet, positions in sorted(ctx.facets().items()):
        trace = normal_trace_rows(ctx.mesh.facet_normals[facet])
        if len(positions) == 2:
            rows.append(ctx.place_rows(positions[0], trace) -
                        ctx.place_rows(positions[1], trace))
        elif boundary_zero:
            rows.append(ctx.place_rows(positions[0], trace))

    return _stack(rows, ctx.size)


def continuity_rows(ctx, functionals=None):
    """Equal values (or equal functionals of the value) at all positions."""
    if functionals is None:
        functionals = np.eye(ctx.ncomp)
    rows = [ctx.place_rows(p, functionals) - ctx.place_rows(0, functionals)
            for p in range(1, len(ctx.positions))]

    return _stack(rows, ctx.size)


def vanish_rows(ctx, functionals=None):
    if functionals is None:
        functionals = np.eye(ctx.ncomp)
    rows = [ctx.place_rows(p, functionals)
            for p in range(len(ctx.positions))]

    return _stack(rows, ctx.size)


def edge_normal_functionals(ctx):
    """Rows of n_i^T tau n_j for two unit normals of the edge through the node."""
    normals = orthonormal_complement(ctx.edge_tangent()[None], ctx.mesh.dim)

    return np.array([bilinear_row(normals[i], normals[j])
                     for i, j in NORMAL_PAIRS])


def _stack(rows, ncols):
    if not rows:
        return np.zeros((0, ncols))

    return np.vstack(rows)


class StressFamily(object):
    """
    A family of H(div) conforming stress spaces.

    Args:
        name (str): Family name used on the command line.
        dim (int): Spatial dimension.
        degree (int): Stress degree k; displacements use k - 1.
        split (str): Macro split the family lives on.
        kind (str): FESpace kind of the global stress space.
    """

    def __init__(self, name, dim, degree, split, kind):
        self.name = name
        self.dim = dim
        self.degree = degree
        self.split = split
        self.kind = kind

    def __repr__(self):
        return '{}({!r})'.format(type(self).__name__, self.name)

    def macro_node_space(self, ctx, macro, counts):
        """Bubble values at one node of a macro, as columns."""
        raise NotImplementedError

    def node_space(self, ctx, extras):
        """
        Global stress space at one node: continuous tensors followed by the
        part of the macro bubble values they do not already span.
        """
        npos = len(ctx.positions)
        cont = ctx.replicate(np.eye(ctx.ncomp))
        if not extras:
            return cont
        extras = np.hstack(extras)
        projected = extras - cont @ (cont.T @ extras) / float(npos)
        scale = np.linalg.norm(extras) if extras.size else 1.0

        return np.hstack([cont, range_basis(projected, scale=scale)])


class SpanningFamily(StressFamily):
    """
    Bubbles given by spanning sets: element bubbles of every sub-cell,
    continuous bubbles at nodes inside interior facets of the macro and
    tangential bubbles at nodes of collinear or coplanar boundary pieces.
    """

    def macro_node_space(self, ctx, macro, counts):
        generators = []
        for p, cell in enumerate(ctx.cells):
            normals = ctx.mesh.facet_normals[
                ctx.mesh.cell_facets[cell, ctx.local_facets(p)]]
            trace = _stack([normal_trace_rows(n) for n in normals],
                           ctx.ncomp)
            free = null_basis(trace, ctx.ncomp)
            counts['element'] += free.shape[1]
            generators.append(ctx.embed(p, free))

        tensors = self.continuous_tensors(ctx, macro)
        counts['continuous'] += len(tensors)
        if tensors:
            generators.append(ctx.replicate(tensors))

        tensors = self.tangential_tensors(ctx, macro)
        counts['tangential'] += len(tensors)
        if tensors:
            generators.append(ctx.replicate(tensors))

        return range_basis(np.hstack(generators))

    def continuous_tensors(self, ctx, macro):
        if len(ctx.support) != self.dim:
            return []
        facet = ctx.mesh.facet_id(ctx.support)
        if facet not in macro.interior_facets:
            return []
        normal = ctx.mesh.facet_normals[facet]
        tangents = orthonormal_complement(normal[None], self.dim)
        tensors = [2.0 * sym_outer(t, normal) for t in tangents]

        return tensors + [sym_outer(normal, normal)]

    def tangential_tensors(self, ctx, macro):
        names = macro.vertices
        points = macro.points
        if self.dim == 2:
            for mid, a, b in (('m1', 'x1', 'x2'), ('m2', 'x0', 'x1'),
                              ('m3', 'x0', 'x2')):
                if ctx.key == ((names[mid], 2),):
                    t = _unit(points[b] - points[a])
                    return [sym_outer(t, t)]
            return []

        support = set(ctx.support)
        for a, b, face in (('m1', 'm2', ('x0', 'x2', 'x3')),
                           ('x1', 'm2', ('x0', 'x1', 'x2')),
                           ('x3', 'm2', ('x0', 'x2', 'x3')),
                           ('m2', 'm3', ('x0', 'x1', 'x2'))):
            if support == {names[a], names[b]}:
                t1 = _unit(points[b] - points[a])
                normal = _face_normal(*[points[v] for v in face])
                t2 = np.cross(t1, normal)
                return [sym_outer(t2, t2), 2.0 * sym_outer(t1, t2)]

        return []


class ConstrainedFamily(StressFamily):
    """
    Degree 2 bubbles in 3D defined by constraints on the twelve-cell macro:
    H(div) conforming with zero normal trace on the macro boundary,
    continuous at the vertices and normal-normal continuous on the edges,
    vanishing at the face centroids, and with vanishing normal-normal
    components at the midpoints of the edges inside each macro face.
    """

    def macro_node_space(self, ctx, macro, counts):
        face_points = {macro.vertices['m{}'.format(i)] for i in range(1, 5)}
        corners = {macro.vertices['x{}'.format(i)] for i in range(4)}
        rows = [hdiv_rows(ctx, boundary_zero=True)]
        if len(ctx.support) == 1:
            rows.append(continuity_rows(ctx))
            if ctx.support[0] in face_points:
                rows.append(vanish_rows(ctx))
        else:
            functionals = edge_normal_functionals(ctx)
            rows.append(continuity_rows(ctx, functionals))
            a, b = ctx.support
            if {a, b} & corners and {a, b} & face_points:
                rows.append(vanish_rows(ctx, functionals))
        space = null_basis(np.vstack(rows), ctx.size)
        counts['constrained'] += space.shape[1]

        return space


class FlatFamily(StressFamily):
    """Degree 2 conforming stresses on a plain tetrahedral mesh, no bubbles."""

    def macro_node_space(self, ctx, macro, counts):
        return np.zeros((ctx.size, 0))

    def node_space(self, ctx, extras):
        rows = [hdiv_rows(ctx, boundary_zero=False)]
        if len(ctx.support) == 1:
            rows.append(continuity_rows(ctx))
        else:
            rows.append(continuity_rows(ctx, edge_normal_functionals(ctx)))

        return null_basis(np.vstack(rows), ctx.size)


FAMILIES = {
    '2d-p2': SpanningFamily('2d-p2', 2, 2, '2d-p2', 'stress-2D-P2'),
    '3d-p3': SpanningFamily('3d-p3', 3, 3, '3d-p3', 'stress-3D-P3'),
    '3d-p2': ConstrainedFamily('3d-p2', 3, 2, '3d-p2', 'stress-3D-P2'),
    '3d-p2-flat': FlatFamily('3d-p2-flat', 3, 2, 'none', 'stress-3D-P2-flat'),
}


def get_family(family):
    if isinstance(family, StressFamily):
        return family
    if family not in FAMILIES:
        raise ValueError('unknown family {!r}, expected one of {}'.format(
            family, ', '.join(FAMILIES)))

    return FAMILIES[family]


class BubbleSpace(object):
    """
    Basis of a bubble space on one cell or one macro.

    Args:
        cell_points (np.ndarray): (ncell, n + 1, n) cells the basis lives on.
        degree (int): Polynomial degree.
        coeffs (np.ndarray): Columns are basis members. For macros they are
            broken Lagrange values ordered (cell, node, component); for a
            single cell they are monomial coefficients (monomial, component).
        family (str): Family name, or None for element bubbles.
        macro (Macro): The macro, or None for element bubbles.
        category_counts (dict): Generator counts per category.
        nodal (bool): Whether coeffs hold Lagrange values.
    """

    def __init__(self, cell_points, degree, coeffs, family=None, macro=None,
                 category_counts=None, nodal=True):
        self.cell_points = np.asarray(cell_points, dtype=float)
        self.degree = degree
        self.coeffs = coeffs
        self.family = family
        self.macro = macro
        self.category_counts = dict(category_counts or {})
        self.nodal = nodal

    def __len__(self):
        return self.coeffs.shape[1]

    @property
    def dim(self):
        return self.coeffs.shape[1]

    def member(self, i):
        ncell = len(self.cell_points)
        ncomp = n_components(self.cell_points.shape[2])
        values = self.coeffs[:, i].reshape(ncell, -1, ncomp)
        if self.nodal:
            return PiecewisePoly.from_nodal(self.cell_points, self.degree,
                                            values, 'tensor')

        return PiecewisePoly(self.cell_points, self.degree, values, 'tensor')

    @property
    def basis(self):
        return [self.member(i) for i in range(self.dim)]


def expected_element_bubble_dim(dim, degree):
    """Sum over lattice nodes of the symmetric tensors free of s normal traces."""
    total = 0
    for alpha in multi_indices(dim, degree):
        free = dim - int(np.sum(alpha == 0))
        total += free * (free + 1) // 2

    return total


def element_bubble_space(cell_points, k):
    """
    Tensors in P_k(K; S) with zero normal trace on the boundary of K.

    The normal trace on each facet is sampled at the degree k lattice of
    the facet, which determines a degree k trace, and the kernel is
    orthonormalized in L2(K).

    Args:
        cell_points (np.ndarray): (n + 1, n) vertex coordinates.
        k (int): Degree, at least 2.

    Output:
        space (BubbleSpace): Monomial coefficient columns.
    """
    assert k >= 2, 'element bubbles need degree >= 2'
    cell_points = np.asarray(cell_points, dtype=float)
    dim = cell_points.shape[1]
    ncomp = n_components(dim)
    alphas = multi_indices(dim, k)
    bary = lattice_points(dim, k)
    grads = barycentric_gradients(cell_points[None])[0]

    rows = []
    for i in range(dim + 1):
        trace = normal_trace_rows(-_unit(grads[i]))
        on_facet = bary[alphas[:, i] == 0]
        mono = eval_monomials(alphas, on_facet)
        rows.extend(np.kron(m[None], trace) for m in mono)
    kernel = null_basis(np.vstack(rows), len(alphas) * ncomp)

    expected = expected_element_bubble_dim(dim, k)
    if kernel.shape[1] != expected:
        raise DimensionMismatchError(
            'element bubble dimension {} != {}'.format(kernel.shape[1],
                                                       expected))

    volume = abs(simplex_volumes(cell_points[None])[0])
    gram = volume * np.kron(monomial_gram(dim, k, k),
                            np.diag(frobenius_weights(dim)))
    chol = scipy.linalg.cholesky(kernel.T @ gram @ kernel, lower=True)
    coeffs = scipy.linalg.solve_triangular(chol, kernel.T, lower=True).T

    return BubbleSpace(cell_points[None], k, coeffs, nodal=False)


def macro_node_spaces(macro_mesh, macro, family):
    """
    Bubble values of one macro, node by node.

    Output:
        spaces (list): (node, positions, columns) triples in node order.
        counts (Counter): Generator counts per category.
    """
    family = get_family(family)
    mesh = macro_mesh.fine
    lagrange = mesh.lagrange_nodes(family.degree)
    patches = lagrange.patches()
    inside = macro_mesh.cell_macro == macro.index
    counts = Counter()
    spaces = []
    for node in np.unique(lagrange.cell_nodes[list(macro.cells)]):
        patch = patches[node]
        positions = patch[inside[patch[:, 0]]]
        ctx = NodeContext(mesh, lagrange, node, positions)
        columns = family.macro_node_space(ctx, macro, counts)
        if columns.shape[1]:
            spaces.append((int(node), positions, columns))

    return spaces, counts


def macro_bubble_space(macro_mesh, macro, family):
    """
    Bubble space of one macro-element of the given family.

    Output:
        space (BubbleSpace): Columns over the macro-local broken Lagrange
            values (local cell, node, component).
    """
    family = get_family(family)
    assert macro_mesh.split == family.split, \
        'family {} needs the {} split'.format(family.name, family.split)
    spaces, counts = macro_node_spaces(macro_mesh, macro, family)
    if not spaces:
        raise EmptyBubbleSpaceError(
            'empty bubble space on macro {}'.format(macro.index))

    dim = macro_mesh.dim
    ncomp = n_components(dim)
    nloc = len(multi_indices(dim, family.degree))
    local = {c: i for i, c in enumerate(macro.cells)}
    total = sum(columns.shape[1] for _, _, columns in spaces)
    coeffs = np.zeros((len(macro.cells) * nloc * ncomp, total))
    start = 0
    for _, positions, columns in spaces:
        width = columns.shape[1]
        for p, (cell, j) in enumerate(positions):
            row = (local[cell] * nloc + j) * ncomp
            coeffs[row:row + ncomp, start:start + width] = \
                columns[p * ncomp:(p + 1) * ncomp]
        start += width
    logger.debug('macro %d: %d bubbles from %s', macro.index, total,
                 dict(counts))

    cell_points = macro_mesh.fine.cell_points[list(macro.cells)]

    return BubbleSpace(cell_points, family.degree, coeffs, family.name,
                       macro, counts)
