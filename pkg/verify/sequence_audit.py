"""Audit of the discrete 2D elasticity sequence P1 -> U_h -> Sigma_h -> V_h -> 0."""
import logging
import numpy as np
import scipy.linalg

from assembly.forms import assemble_div
from solvers.dense_kernels import dense_rank
from spaces.polynomials import lattice_points
from spaces.stress_spaces import displacement_space, stress_space
from spaces.h2_composite import MIDPOINT_EDGES, h2_space
from verify.unisolvence import airy

logger = logging.getLogger(__name__)

INCLUSION_TOL = 1e-9


def airy_values(h2, stress):
    """Broken Lagrange values of J u for every basis function u of U_h."""
    bary = lattice_points(2, stress.degree)
    columns = []
    for i in range(h2.dof_count):
        field = airy(h2.basis_function(i))
        columns.append(field.evaluate_bary(bary).ravel())

    return np.stack(columns, axis=1)


def macro_counts(macro_mesh):
    """Macro vertices, macro edges, interior macro edges and macros."""
    edge_uses = {}
    corners = set()
    for macro in macro_mesh.macros:
        corners.update(macro.vertices[x] for x in ('x0', 'x1', 'x2'))
        for a, b in MIDPOINT_EDGES.values():
            edge = tuple(sorted((macro.vertices[a], macro.vertices[b])))
            edge_uses[edge] = edge_uses.get(edge, 0) + 1

    return {'V': len(corners), 'E': len(edge_uses),
            'E_interior': sum(1 for n in edge_uses.values() if n == 2),
            'M': len(macro_mesh.macros)}


def sequence_audit(macro_mesh, inclusion_tol=INCLUSION_TOL):
    """
    Check exactness of the discrete sequence on a 2D macro mesh.

    Output:
        report (dict): inclusion residual, rank of div against dim V_h, the
            alternating dimension sum, kernel dimensions, Euler identity
            and the dimension count of Sigma_h, plus an overall pass flag.
    """
    assert macro_mesh.dim == 2, 'the sequence audit is 2D only'
    h2 = h2_space(macro_mesh)
    sigma = stress_space(macro_mesh, '2d-p2')
    disp = displacement_space(macro_mesh.fine, 2)

    values = airy_values(h2, sigma)
    prolong = sigma.prolongation.toarray()
    fit, _, _, _ = scipy.linalg.lstsq(prolong, values)
    norms = np.maximum(np.linalg.norm(values, axis=0), 1e-300)
    residual = np.linalg.norm(prolong @ fit - values, axis=0) / norms

    rank_b = dense_rank(assemble_div(sigma, disp).toarray())
    rank_j = dense_rank(values)
    dims = {'U_h': h2.dof_count, 'Sigma_h': sigma.dof_count,
            'V_h': disp.dof_count}
    counts = macro_counts(macro_mesh)
    dim_count = 3 * counts['V'] + 7 * counts['E'] + counts['E_interior'] + \
        18 * counts['M']

    report = {
        'dims': dims,
        'counts': counts,
        'inclusion_residual': float(residual.max()) if len(residual) else 0.0,
        'rank_div': rank_b,
        'rank_airy': rank_j,
        'alternating_sum': dims['U_h'] - dims['Sigma_h'] + dims['V_h'],
        'kernel_div': dims['Sigma_h'] - rank_b,
        'euler': 1 + counts['E'] - counts['V'] - counts['M'],
        'dim_count': dim_count,
    }
    checks = {
        'inclusion': report['inclusion_residual'] < inclusion_tol,
        'surjective': rank_b == dims['V_h'],
        'dimension': report['alternating_sum'] == 3,
        'kernel': report['kernel_div'] == dims['U_h'] - 3 and
        rank_j == dims['U_h'] - 3,
        'euler': report['euler'] == 0,
        'dim_count': dims['Sigma_h'] <= dim_count,
    }
    report['checks'] = checks
    report['pass'] = all(checks.values())
    level = logging.INFO if report['pass'] else logging.WARNING
    logger.log(level, 'sequence audit: %s', checks)

    return report
