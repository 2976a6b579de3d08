"""Macro-element splits of simplicial meshes.

Each coarse cell becomes a macro-element made of fine cells. Named points of
a macro (vertices x_i, midpoints or centroids m_i, facet points d_i and
edge points g_i) are recorded per macro; names that are fine-mesh vertices
also map to their vertex index.
"""
import logging
import numpy as np

from meshes.simplicial_mesh import (Mesh, orient_cells, unit_cube_mesh,
                                    unit_square_mesh)

logger = logging.getLogger(__name__)

LABEL_TOL = 1e-12

SPLITS = ('none', '2d-p2', '3d-p3', '3d-p2')


class Macro(object):
    """
    One macro-element of a MacroMesh.

    Args:
        index (int): Position in MacroMesh.macros.
        coarse_cell (int): The coarse cell it was made from.
        cells (tuple): Fine cell indices, ordered K1, K2, ...
        vertices (dict): Name -> fine vertex index for named vertices.
        points (dict): Name -> coordinates for every named point.
    """

    def __init__(self, index, coarse_cell, cells, vertices, points):
        self.index = index
        self.coarse_cell = coarse_cell
        self.cells = tuple(int(c) for c in cells)
        self.vertices = dict(vertices)
        self.points = {k: np.asarray(v, dtype=float) for k, v in
                       points.items()}
        self.interior_facets = ()

    def __repr__(self):
        return 'Macro({}, cells={})'.format(self.index, self.cells)


class MacroMesh(object):
    """A fine mesh grouped into macro-elements of one split family."""

    def __init__(self, fine, macros, split, coarse=None):
        self.fine = fine
        self.macros = list(macros)
        self.split = split
        self.coarse = coarse
        self.cell_macro = -np.ones(fine.n_cells, dtype=int)
        for macro in self.macros:
            self.cell_macro[list(macro.cells)] = macro.index
        assert np.all(self.cell_macro >= 0), 'every fine cell needs a macro'
        inner = fine.interior_facets()
        owners = self.cell_macro[fine.facet_cells[inner]]
        same = owners[:, 0] == owners[:, 1]
        grouped = [[] for _ in self.macros]
        for f, m in zip(inner[same], owners[same, 0]):
            grouped[m].append(int(f))
        for macro, facets in zip(self.macros, grouped):
            macro.interior_facets = tuple(facets)

    @property
    def dim(self):
        return self.fine.dim

    def macro_volumes(self):
        vols = self.fine.volumes

        return np.array([vols[list(m.cells)].sum() for m in self.macros])


class _VertexPool(object):
    """Fine vertices: coarse ones first, new points deduplicated by origin."""

    def __init__(self, coarse_vertices):
        self.coords = [np.asarray(v, dtype=float) for v in coarse_vertices]
        self.index = {}

    def mean_of(self, ids):
        key = tuple(sorted(int(i) for i in ids))
        if len(key) == 1:
            return key[0]
        if key not in self.index:
            self.index[key] = len(self.coords)
            self.coords.append(np.mean([self.coords[i] for i in key],
                                       axis=0))

        return self.index[key]

    def __getitem__(self, i):
        return self.coords[i]


def _check_coarse(mesh, dim):
    assert mesh.dim == dim, 'split needs a {}D mesh'.format(dim)
    # re-validates volumes; raises DegenerateCellError
    orient_cells(mesh.vertices, mesh.cells)


def _assemble(mesh, pool, records, split):
    fine_cells = []
    macros = []
    for index, (coarse_cell, cells, names) in enumerate(records):
        ids = list(range(len(fine_cells), len(fine_cells) + len(cells)))
        fine_cells.extend(cells)
        vertices = {k: v for k, v in names.items() if isinstance(v, int)}
        points = {k: (pool[v] if isinstance(v, int) else v)
                  for k, v in names.items()}
        macros.append(Macro(index, coarse_cell, ids, vertices, points))
    fine = Mesh(np.array(pool.coords), fine_cells)
    logger.debug('%s split: %d macros, %d fine cells', split, len(macros),
                 fine.n_cells)

    return MacroMesh(fine, macros, split, coarse=mesh)


def identity_split(mesh):
    """Every cell is its own macro; used for runs without a split."""
    pool = _VertexPool(mesh.vertices)
    records = []
    for c, cell in enumerate(mesh.cells):
        names = {'x{}'.format(i): int(v) for i, v in enumerate(cell)}
        records.append((c, [list(cell)], names))

    return _assemble(mesh, pool, records, 'none')


def longest_edge_apex(vertices, cell):
    """
    Labels (x0, x1, x2) of a triangle with x0 opposite its longest edge.

    Ties go to the lowest global index; x1 < x2.
    """
    cell = sorted(int(v) for v in cell)
    lengths = np.array([np.linalg.norm(vertices[b] - vertices[a]) for a, b in
                        ((cell[1], cell[2]), (cell[0], cell[2]),
                         (cell[0], cell[1]))])
    apex = cell[int(np.argmax(lengths >= lengths.max() * (1.0 - LABEL_TOL)))]
    rest = [v for v in cell if v != apex]

    return apex, rest[0], rest[1]


def macro_split_2d(mesh):
    """
    Split each triangle x0x1x2 into K1=x1m1m2, K2=x0m1m2, K3=x0m1m3, K4=x2m1m3.

    x0 is the vertex opposite the longest edge; m1, m2, m3 are the
    midpoints of x1x2, x0x1 and x0x2; d1, d2, d3 are the midpoints of the
    interior edges E1=m1m2, E2=m1x0 and E3=m1m3.
    """
    _check_coarse(mesh, 2)
    pool = _VertexPool(mesh.vertices)
    records = []
    for c, cell in enumerate(mesh.cells):
        x0, x1, x2 = longest_edge_apex(mesh.vertices, cell)
        m1, m2, m3 = pool.mean_of((x1, x2)), pool.mean_of((x0, x1)), \
            pool.mean_of((x0, x2))
        cells = [[x1, m1, m2], [x0, m1, m2], [x0, m1, m3], [x2, m1, m3]]
        names = {'x0': x0, 'x1': x1, 'x2': x2, 'm1': m1, 'm2': m2, 'm3': m3,
                 'd1': 0.5 * (pool[m1] + pool[m2]),
                 'd2': 0.5 * (pool[m1] + pool[x0]),
                 'd3': 0.5 * (pool[m1] + pool[m3])}
        records.append((c, cells, names))

    return _assemble(mesh, pool, records, '2d-p2')


def macro_split_3d_p3(mesh):
    """
    Two successive bisections of each tetrahedron into four.

    With the cell vertices sorted ascending as (y0, y1, y2, y3), the labels
    are x0=y0, x1=y1, x2=y3, x3=y2, so the first bisection edge x0x2 is
    the path diagonal of a Kuhn tetrahedron. The first bisection at
    m2=mid(x0x2) is followed by bisections at m1=mid(x0x3) and m3=mid(x1x2),
    giving K1=x0x1m1m2, K2=x1x3m1m2, K3=x1x3m2m3, K4=x2x3m2m3.
    """
    _check_coarse(mesh, 3)
    pool = _VertexPool(mesh.vertices)
    records = []
    for c, cell in enumerate(mesh.cells):
        y0, y1, y2, y3 = sorted(int(v) for v in cell)
        x0, x1, x2, x3 = y0, y1, y3, y2
        m2 = pool.mean_of((x0, x2))
        m1 = pool.mean_of((x0, x3))
        m3 = pool.mean_of((x1, x2))
        cells = [[x0, x1, m1, m2], [x1, x3, m1, m2], [x1, x3, m2, m3],
                 [x2, x3, m2, m3]]
        names = {'x0': x0, 'x1': x1, 'x2': x2, 'x3': x3,
                 'm1': m1, 'm2': m2, 'm3': m3}
        for i, face in enumerate(((x1, m1, m2), (x1, x3, m2), (x3, m2, m3))):
            names['d{}'.format(i + 1)] = np.mean([pool[v] for v in face],
                                                 axis=0)
        # g1,g2 on m1m2; g3,g4 on x1m2; g5,g6 on x3m2; g7,g8 on m2m3
        for i, (a, b) in enumerate(((m1, m2), (x1, m2), (x3, m2), (m2, m3))):
            names['g{}'.format(2 * i + 1)] = (2 * pool[a] + pool[b]) / 3.0
            names['g{}'.format(2 * i + 2)] = (pool[a] + 2 * pool[b]) / 3.0
        records.append((c, cells, names))

    return _assemble(mesh, pool, records, '3d-p3')


def macro_split_3d_p2(mesh):
    """
    Twelve-way split of each tetrahedron.

    m1..m4 are the centroids of the faces opposite x0..x3 and m5 the cell
    centroid. Each face is cut into three triangles at its centroid and each
    of the twelve triangles is coned to m5. g1..g4 are the midpoints of
    x_i m5 and g5..g8 those of m_i m5.
    """
    _check_coarse(mesh, 3)
    pool = _VertexPool(mesh.vertices)
    records = []
    for c, cell in enumerate(mesh.cells):
        xs = sorted(int(v) for v in cell)
        m5 = pool.mean_of(xs)
        names = {'x{}'.format(i): x for i, x in enumerate(xs)}
        names['m5'] = m5
        cells = []
        for i in range(4):
            face = [x for j, x in enumerate(xs) if j != i]
            mi = pool.mean_of(face)
            names['m{}'.format(i + 1)] = mi
            for a in range(3):
                cells.append([face[a], face[(a + 1) % 3], mi, m5])
        for i in range(4):
            names['g{}'.format(i + 1)] = 0.5 * (pool[xs[i]] + pool[m5])
            names['g{}'.format(i + 5)] = 0.5 * (
                pool[names['m{}'.format(i + 1)]] + pool[m5])
        records.append((c, cells, names))

    return _assemble(mesh, pool, records, '3d-p2')


def apply_split(mesh, split):
    if split == 'none':
        return identity_split(mesh)
    if split == '2d-p2':
        return macro_split_2d(mesh)
    if split == '3d-p3':
        return macro_split_3d_p3(mesh)
    if split == '3d-p2':
        return macro_split_3d_p2(mesh)
    raise ValueError('unknown split {!r}, expected one of {}'.format(
        split, ', '.join(SPLITS)))


def split_unit_mesh(dim, split, levels):
    """Unit square or unit cube mesh at a refinement level, then split."""
    if dim == 2:
        return apply_split(unit_square_mesh(levels), split)

    return apply_split(unit_cube_mesh(levels), split)


def check_labels(macro_mesh, tol=LABEL_TOL):
    """
    Recompute every named point of every macro from its definition.

    Output:
        bad (list): (macro index, name) pairs that do not match.
    """
    split = macro_mesh.split
    bad = []
    for macro in macro_mesh.macros:
        p = macro.points
        expected = {}
        if split == '2d-p2':
            expected = {'m1': (p['x1'] + p['x2']) / 2,
                        'm2': (p['x0'] + p['x1']) / 2,
                        'm3': (p['x0'] + p['x2']) / 2,
                        'd1': (p['m1'] + p['m2']) / 2,
                        'd2': (p['m1'] + p['x0']) / 2,
                        'd3': (p['m1'] + p['m3']) / 2}
        elif split == '3d-p3':
            expected = {'m1': (p['x0'] + p['x3']) / 2,
                        'm2': (p['x0'] + p['x2']) / 2,
                        'm3': (p['x1'] + p['x2']) / 2,
                        'd1': (p['x1'] + p['m1'] + p['m2']) / 3,
                        'd2': (p['x1'] + p['x3'] + p['m2']) / 3,
                        'd3': (p['x3'] + p['m2'] + p['m3']) / 3,
                        'g1': (2 * p['m1'] + p['m2']) / 3,
                        'g2': (p['m1'] + 2 * p['m2']) / 3,
                        'g3': (2 * p['x1'] + p['m2']) / 3,
                        'g4': (p['x1'] + 2 * p['m2']) / 3,
                        'g5': (2 * p['x3'] + p['m2']) / 3,
                        'g6': (p['x3'] + 2 * p['m2']) / 3,
                        'g7': (2 * p['m2'] + p['m3']) / 3,
                        'g8': (p['m2'] + 2 * p['m3']) / 3}
        elif split == '3d-p2':
            xs = [p['x{}'.format(i)] for i in range(4)]
            expected['m5'] = np.mean(xs, axis=0)
            for i in range(4):
                face = [x for j, x in enumerate(xs) if j != i]
                expected['m{}'.format(i + 1)] = np.mean(face, axis=0)
                expected['g{}'.format(i + 1)] = (xs[i] + expected['m5']) / 2
            for i in range(4):
                expected['g{}'.format(i + 5)] = (
                    expected['m{}'.format(i + 1)] + expected['m5']) / 2
        for name, point in expected.items():
            if np.max(np.abs(p[name] - point)) > tol * max(
                    1.0, np.max(np.abs(point))):
                bad.append((macro.index, name))
        for name, v in macro.vertices.items():
            if np.max(np.abs(macro_mesh.fine.vertices[v] - p[name])) > tol:
                bad.append((macro.index, name))

    return bad
