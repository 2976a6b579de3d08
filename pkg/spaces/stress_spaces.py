"""Global finite element spaces on a fine mesh.

A space is a sparse prolongation from its global degrees of freedom to the
broken Lagrange values (cell, lattice node, component) of the fine mesh.
"""
import logging
import numpy as np
import scipy.linalg
import scipy.sparse as sp

from tqdm import tqdm

from assembly.forms import assemble_stress_gram
from solvers.dense_kernels import singular_values
from spaces.bubbles import NodeContext, get_family, macro_node_spaces
from spaces.polynomials import PiecewisePoly, n_monomials
from spaces.tensors import n_components

logger = logging.getLogger(__name__)

INDEPENDENCE_TOL = 1e-10
CERTIFY_DOF_LIMIT = 4000


class DependentBasisError(RuntimeError):
    pass


class FESpace(object):
    """
    Args:
        mesh (Mesh): Fine mesh the space lives on.
        kind (str): e.g. 'stress-2D-P2', 'displacement-P1', 'H2-composite'.
        degree (int): Polynomial degree on every cell.
        ncomp (int): Values per Lagrange node.
        prolongation (scipy.sparse.spmatrix): (nbroken, dof_count) map from
            global coefficients to broken Lagrange values.
        info (dict): Construction details for describe().
    """

    def __init__(self, mesh, kind, degree, ncomp, prolongation, info=None):
        self.mesh = mesh
        self.kind = kind
        self.degree = degree
        self.ncomp = ncomp
        self.prolongation = sp.csc_matrix(prolongation)
        self.info = dict(info or {})
        assert self.prolongation.shape[0] == \
            mesh.n_cells * self.nloc * ncomp, \
            'prolongation rows do not match the broken representation'

    def __repr__(self):
        return 'FESpace({}, dofs={})'.format(self.kind, self.dof_count)

    @property
    def dof_count(self):
        return self.prolongation.shape[1]

    @property
    def nloc(self):
        return n_monomials(self.mesh.dim, self.degree)

    @property
    def cell_points(self):
        return self.mesh.cell_points

    @property
    def value_kind(self):
        if self.ncomp == 1:
            return 'scalar'
        if self.ncomp == n_components(self.mesh.dim) and \
                self.kind.startswith('stress'):
            return 'tensor'
        return 'vector'

    def broken(self, coeffs):
        values = self.prolongation @ np.asarray(coeffs, dtype=float)

        return values.reshape(self.mesh.n_cells, self.nloc, self.ncomp)

    def function(self, coeffs):
        return PiecewisePoly.from_nodal(self.cell_points, self.degree,
                                        self.broken(coeffs), self.value_kind)

    def basis_function(self, i):
        unit = np.zeros(self.dof_count)
        unit[i] = 1.0

        return self.function(unit)

    def describe(self):
        """JSON-ready summary: kind, sizes and construction details."""
        summary = {'kind': self.kind, 'degree': self.degree,
                   'dim': self.mesh.dim, 'cells': int(self.mesh.n_cells),
                   'dof_count': int(self.dof_count)}
        summary.update(self.info)

        return summary


def _broken_rows(positions, nloc, ncomp):
    base = (positions[:, 0] * nloc + positions[:, 1]) * ncomp

    return (base[:, None] + np.arange(ncomp)[None]).ravel()


def stress_space(macro_mesh, family, certify=None, progress=False):
    """
    H(div) conforming stress space of a family on a macro mesh.

    Each global lattice node contributes the continuous tensors Phi_X E_a and
    the part of the bubble values of the macros around it that is not
    already continuous. Nodes touch disjoint broken values, so the union of
    the node blocks is independent when every block is.

    Args:
        macro_mesh (MacroMesh): Mesh split by the family's split.
        family (str or StressFamily): '2d-p2', '3d-p3', '3d-p2' or
            '3d-p2-flat'.
        certify (bool or None): Also check the L2 Gram matrix of the whole
            basis. None checks it when DEBUG logging is on and the space
            has at most CERTIFY_DOF_LIMIT dofs.
        progress (bool): Show a progress bar over macros.

    Output:
        space (FESpace)
    """
    family = get_family(family)
    assert macro_mesh.split == family.split, \
        'family {} needs the {} split, got {}'.format(
            family.name, family.split, macro_mesh.split)
    mesh = macro_mesh.fine
    lagrange = mesh.lagrange_nodes(family.degree)
    patches = lagrange.patches()
    ncomp = n_components(mesh.dim)
    nloc = lagrange.cell_nodes.shape[1]

    extras = {}
    bubble_counts = []
    for macro in tqdm(macro_mesh.macros, disable=not progress,
                      desc='macro bubbles'):
        spaces, counts = macro_node_spaces(macro_mesh, macro, family)
        local_dim = 0
        for node, positions, columns in spaces:
            patch = patches[node]
            rows = np.nonzero(np.isin(patch[:, 0], positions[:, 0]))[0]
            embedded = np.zeros((len(patch) * ncomp, columns.shape[1]))
            for p, q in enumerate(rows):
                embedded[q * ncomp:(q + 1) * ncomp] = \
                    columns[p * ncomp:(p + 1) * ncomp]
            extras.setdefault(node, []).append((macro.index, embedded))
            local_dim += columns.shape[1]
        bubble_counts.append({'macro': macro.index, 'bubbles': local_dim,
                              'categories': dict(counts)})

    rows, cols, vals = [], [], []
    ndof = 0
    for node, patch in enumerate(patches):
        ctx = NodeContext(mesh, lagrange, node, patch)
        owners = extras.get(node, [])
        block = family.node_space(ctx, [e for _, e in owners])
        _check_block(block, node, [m for m, _ in owners])
        broken = _broken_rows(patch, nloc, ncomp)
        r, c = np.nonzero(np.abs(block) > 0.0)
        rows.append(broken[r])
        cols.append(ndof + c)
        vals.append(block[r, c])
        ndof += block.shape[1]

    prolongation = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.n_cells * nloc * ncomp, ndof))
    info = {'family': family.name, 'split': macro_mesh.split,
            'macros': len(macro_mesh.macros),
            'continuous_dim': int(len(lagrange) * ncomp),
            'bubble_counts': bubble_counts}
    space = FESpace(mesh, family.kind, family.degree, ncomp, prolongation,
                    info)
    logger.debug('%s: %d dofs on %d cells', family.kind, space.dof_count,
                 mesh.n_cells)
    if certify is None:
        certify = logger.isEnabledFor(logging.DEBUG) and \
            space.dof_count <= CERTIFY_DOF_LIMIT
    if certify:
        certify_independence(space, macro_mesh)

    return space


def _check_block(block, node, macros):
    if block.shape[1] == 0:
        return
    s = singular_values(block)
    if s[-1] < INDEPENDENCE_TOL * s[0] or block.shape[1] > block.shape[0]:
        raise DependentBasisError(
            'dependent basis at node {} (macros {})'.format(node, macros))


def certify_independence(space, macro_mesh, tol=INDEPENDENCE_TOL):
    """
    Check that the L2 Gram matrix of the basis has full numerical rank.

    On failure the macro carrying most of the weakest combination is named.
    """
    gram = assemble_stress_gram(space).toarray()
    eigs, vecs = scipy.linalg.eigh(gram)
    if eigs[0] > tol * eigs[-1]:
        logger.debug('gram certificate: lambda_min/lambda_max = %.3e',
                     eigs[0] / eigs[-1])
        return float(eigs[0] / eigs[-1])

    weak = space.broken(vecs[:, 0])
    cell = int(np.argmax(np.linalg.norm(weak.reshape(len(weak), -1), axis=1)))
    raise DependentBasisError('dependent basis in macro {}'.format(
        int(macro_mesh.cell_macro[cell])))


def displacement_space(mesh, k):
    """Discontinuous P_{k-1} vector fields; the prolongation is the identity."""
    assert k >= 2, 'displacements need stress degree k >= 2'
    degree = k - 1
    size = mesh.n_cells * n_monomials(mesh.dim, degree) * mesh.dim

    return FESpace(mesh, 'displacement-P{}'.format(degree), degree, mesh.dim,
                   sp.identity(size, format='csc'))
