import logging
import math
import numpy as np

from spaces.polynomials import multi_indices

logger = logging.getLogger(__name__)

GEOMETRY_TOL = 1e-12


class DegenerateCellError(ValueError):
    pass


def simplex_volumes(points):
    """Signed volumes of simplices given as (ncell, n + 1, n) coordinates."""
    points = np.asarray(points, dtype=float)
    edges = points[:, 1:, :] - points[:, :1, :]

    return np.linalg.det(edges) / math.factorial(points.shape[2])


def barycentric_gradients(points):
    """
    Gradients of the barycentric coordinates of each simplex.

    Args:
        points (np.ndarray): (ncell, n + 1, n) vertex coordinates.

    Output:
        grads (np.ndarray): (ncell, n + 1, n); grads[k, l] is the constant
            gradient of lambda_l on cell k.
    """
    points = np.asarray(points, dtype=float)
    edges = points[:, 1:, :] - points[:, :1, :]
    inv = np.linalg.inv(edges)
    grads = np.empty(points.shape)
    grads[:, 1:, :] = np.swapaxes(inv, 1, 2)
    grads[:, 0, :] = -grads[:, 1:, :].sum(axis=1)

    return grads


def to_barycentric(cell_points, x):
    """Barycentric coordinates of points x (npts, n) in one simplex."""
    cell_points = np.asarray(cell_points, dtype=float)
    x = np.asarray(x, dtype=float)
    edges = cell_points[1:] - cell_points[0]
    tail = (x - cell_points[0]) @ np.linalg.inv(edges)

    return np.concatenate([1.0 - tail.sum(axis=-1, keepdims=True), tail],
                          axis=-1)


def from_barycentric(cell_points, bary):
    """Physical points of barycentric points on each cell: (ncell, npts, n)."""
    return np.einsum('pl,kls->kps', np.atleast_2d(bary),
                     np.asarray(cell_points, dtype=float))


def orient_cells(vertices, cells):
    """Reorder cells to positive signed volume, rejecting degenerate ones."""
    cells = np.array(cells, dtype=int)
    points = vertices[cells]
    vols = simplex_volumes(points)
    edges = points[:, 1:, :] - points[:, :1, :]
    scale = np.max(np.linalg.norm(edges, axis=2), axis=1) ** vertices.shape[1]
    bad = np.abs(vols) <= GEOMETRY_TOL * scale
    if np.any(bad):
        raise DegenerateCellError(
            'degenerate cell {}'.format(np.nonzero(bad)[0][0]))
    flip = vols < 0
    cells[flip, -2], cells[flip, -1] = cells[flip, -1], cells[flip, -2].copy()

    return cells


class LagrangeNodes(object):
    """
    Global numbering of the P_k lattice of a conforming mesh.

    A lattice node is identified by the cell vertices carrying non-zero
    weight together with those weights, which makes the key independent of
    the cell it is seen from.
    """

    def __init__(self, mesh, degree):
        self.degree = degree
        self.alphas = multi_indices(mesh.dim, degree)
        self.keys = []
        self.index = {}
        cell_nodes = np.empty((mesh.n_cells, len(self.alphas)), dtype=int)
        for c, cell in enumerate(mesh.cells):
            for j, alpha in enumerate(self.alphas):
                key = node_key(zip(cell, alpha))
                if key not in self.index:
                    self.index[key] = len(self.keys)
                    self.keys.append(key)
                cell_nodes[c, j] = self.index[key]
        self.cell_nodes = cell_nodes
        self.coords = np.array([
            sum(mesh.vertices[v] * w for v, w in key) / float(degree)
            for key in self.keys])
        self._patches = None

    def __len__(self):
        return len(self.keys)

    def patches(self):
        """For each node, the (cell, local index) pairs that see it."""
        if self._patches is None:
            patches = [[] for _ in self.keys]
            for c, row in enumerate(self.cell_nodes):
                for j, node in enumerate(row):
                    patches[node].append((c, j))
            self._patches = [np.array(p, dtype=int) for p in patches]

        return self._patches


def node_key(pairs):
    return tuple(sorted((int(v), int(w)) for v, w in pairs if w > 0))


class Mesh(object):
    """
    Conforming simplicial mesh.

    Cells are stored with positive orientation. Facet i of a cell is the
    facet opposite its local vertex i. Every facet records the pair
    (K+, K-) of cells sharing it, with K- = -1 on the boundary, and a unit
    normal pointing out of K+. Jumps are taken as value(K+) - value(K-).
    """

    def __init__(self, vertices, cells):
        self.vertices = np.array(vertices, dtype=float)
        self.dim = self.vertices.shape[1]
        assert np.shape(cells)[1] == self.dim + 1, \
            'cells need {} vertices'.format(self.dim + 1)
        self.cells = orient_cells(self.vertices, cells)
        self._lagrange = {}
        self._build_facets()

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def cell_points(self):
        return self.vertices[self.cells]

    @property
    def volumes(self):
        return simplex_volumes(self.cell_points)

    @property
    def grad_bary(self):
        return barycentric_gradients(self.cell_points)

    def _build_facets(self):
        n = self.dim
        local = [np.delete(np.arange(n + 1), i) for i in range(n + 1)]
        all_facets = np.sort(self.cells[:, local], axis=2).reshape(-1, n)
        self.facets, inverse = np.unique(all_facets, axis=0,
                                         return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        self.cell_facets = inverse.reshape(self.n_cells, n + 1)

        self.facet_cells = -np.ones((len(self.facets), 2), dtype=int)
        self.facet_local = -np.ones((len(self.facets), 2), dtype=int)
        for flat, f in enumerate(inverse):
            cell, i = divmod(flat, n + 1)
            side = 0 if self.facet_cells[f, 0] < 0 else 1
            assert self.facet_cells[f, side] < 0, \
                'facet {} is shared by more than two cells'.format(f)
            self.facet_cells[f, side] = cell
            self.facet_local[f, side] = i
        self.facet_index = {tuple(f): i for i, f in enumerate(self.facets)}

        grads = self.grad_bary[self.facet_cells[:, 0], self.facet_local[:, 0]]
        self.facet_normals = -grads / np.linalg.norm(grads, axis=1,
                                                     keepdims=True)

    def facet_id(self, vertex_ids):
        return self.facet_index[tuple(sorted(int(v) for v in vertex_ids))]

    def interior_facets(self):
        return np.nonzero(self.facet_cells[:, 1] >= 0)[0]

    def boundary_facets(self):
        return np.nonzero(self.facet_cells[:, 1] < 0)[0]

    def edges(self):
        """Sorted vertex pairs of all edges."""
        pairs = np.sort(self.cells[:, list(
            zip(*np.triu_indices(self.dim + 1, 1)))], axis=2)

        return np.unique(pairs.reshape(-1, 2), axis=0)

    def jump(self, cell_values):
        """Jump of a piecewise constant field over interior facets."""
        cell_values = np.asarray(cell_values)
        inner = self.interior_facets()
        plus, minus = self.facet_cells[inner, 0], self.facet_cells[inner, 1]

        return cell_values[plus] - cell_values[minus]

    def lagrange_nodes(self, degree):
        if degree not in self._lagrange:
            self._lagrange[degree] = LagrangeNodes(self, degree)

        return self._lagrange[degree]

    def refine(self):
        """Red refinement of a triangle mesh: each cell into four."""
        assert self.dim == 2, 'red refinement is implemented for triangles'
        edges = self.facets
        midpoints = 0.5 * (self.vertices[edges[:, 0]] +
                           self.vertices[edges[:, 1]])
        vertices = np.vstack([self.vertices, midpoints])
        mid = self.n_vertices + self.cell_facets
        a, b, c = self.cells.T
        ma, mb, mc = mid.T
        cells = np.vstack([
            np.stack([a, mc, mb], axis=1),
            np.stack([b, ma, mc], axis=1),
            np.stack([c, mb, ma], axis=1),
            np.stack([ma, mb, mc], axis=1),
        ])
        logger.debug('refined %d cells into %d', self.n_cells, len(cells))

        return Mesh(vertices, cells)


def unit_square_mesh(levels):
    """Two triangles split by the (0,0)-(1,1) diagonal, red refined levels-1 times."""
    assert levels >= 1, 'levels must be positive'
    mesh = Mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                [[0, 1, 3], [0, 3, 2]])
    for _ in range(levels - 1):
        mesh = mesh.refine()

    return mesh


def unit_cube_mesh(levels):
    """
    Kuhn tetrahedralization of a cube grid with 2^(levels-1) cells per axis.

    Every cube is cut into six tetrahedra sharing its (0,0,0)-(1,1,1)
    diagonal. Vertices are numbered lexicographically, so ascending vertex
    indices of a tetrahedron follow its path along the cube edges.
    """
    assert levels >= 1, 'levels must be positive'
    n = 2 ** (levels - 1)
    ticks = np.linspace(0.0, 1.0, n + 1)
    grid = np.stack(np.meshgrid(ticks, ticks, ticks, indexing='ij'), axis=-1)
    vertices = grid.reshape(-1, 3)

    def vid(i, j, k):
        return (i * (n + 1) + j) * (n + 1) + k

    cells = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2),
                             (1, 2, 0), (2, 0, 1), (2, 1, 0)):
                    corner = [i, j, k]
                    path = [vid(*corner)]
                    for axis in perm:
                        corner[axis] += 1
                        path.append(vid(*corner))
                    cells.append(path)

    return Mesh(vertices, cells)
