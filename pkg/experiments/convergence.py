"""Convergence studies of the mixed elasticity discretizations.

One row per refinement level: the original unit square or cube mesh at
meshsize 2^{1-level}, split by the family's macro split, assembled, solved
and compared with the manufactured solution.
"""
import logging
import time
import numpy as np
import pandas as pd

from tqdm import tqdm

from assembly.error_norms import error_norms
from assembly.material import Material
from assembly.quadrature import NORM_DEGREE
from experiments.problems import get_problem
from meshes.macro_splits import split_unit_mesh
from solvers.saddle_point import DENSE_CUTOFF, SaddleSystem, solve_saddle
from spaces.bubbles import get_family
from spaces.stress_spaces import displacement_space, stress_space
from spaces.tensors import n_components
from utils.general_utils import convergence_rates, write_json

logger = logging.getLogger(__name__)

DEFAULT_DOF_CAP = 500000

COLUMNS = ['meshsize', 'e_sigma_L2', 'rate_sigma', 'e_u_L2', 'rate_u',
           'e_sigma_Hdiv', 'rate_hdiv', 'n_dof_sigma', 'n_dof_u', 'seconds']

# reference errors per level, (meshsize, sigma L2, u L2)
REFERENCE_TABLES = {
    '2d-p2': [(1.0, 0.45246, 0.039392), (0.5, 0.17977, 0.019599),
              (0.25, 0.025369, 0.0049733), (0.125, 0.0033584, 0.0012482),
              (0.0625, 0.00042966, 0.00031237)],
    '3d-p3': [(1.0, 0.082325, 0.028988), (0.5, 0.0051819, 0.0040798),
              (0.25, 0.00034209, 0.00051945)],
    '3d-p2': [(1.0, 0.90246, 0.13854), (0.5, 0.20592, 0.042811),
              (0.25, 0.032968, 0.011251)],
    '3d-p2-flat': [(1.0, 1.5784, 0.25691), (0.5, 0.39872, 0.085996),
                   (0.25, 0.083743, 0.023579), (0.125, 0.018084, 0.0059988)],
}


class DofCapExceededError(RuntimeError):
    pass


def level_mesh(problem, level):
    family = get_family(problem)

    return split_unit_mesh(family.dim, family.split, level)


def _check_cap(count, cap, problem, level):
    if count > cap:
        raise DofCapExceededError(
            '{} level {}: {} stress dofs exceed the cap of {}'.format(
                problem, level, count, cap))


def solve_level(problem, level, material=None, dof_cap=DEFAULT_DOF_CAP,
                dense_cutoff=DENSE_CUTOFF, norm_degree=NORM_DEGREE):
    """
    Solve one level of a convergence study.

    Args:
        problem (str): '2d-p2', '3d-p3', '3d-p2' or '3d-p2-flat'.
        level (int): Refinement level, meshsize 2^{1-level}.
        material (Material): Defaults to mu = 1/2, lam = 1.
        dof_cap (int): Largest accepted stress dof count.

    Output:
        row (dict): Errors, dof counts and wall time of the level.
        sigma_space (FESpace): The stress space, for debug dumps.
    """
    start = time.time()
    family = get_family(problem)
    exact = get_problem(problem, material)
    macro_mesh = level_mesh(problem, level)
    mesh = macro_mesh.fine

    # the continuous part alone bounds the count from below
    lower = len(mesh.lagrange_nodes(family.degree)) * n_components(mesh.dim)
    _check_cap(lower, dof_cap, problem, level)
    sigma_space = stress_space(macro_mesh, family)
    _check_cap(sigma_space.dof_count, dof_cap, problem, level)
    disp_space = displacement_space(mesh, family.degree)

    system = SaddleSystem.assemble(sigma_space, disp_space, exact.material,
                                   exact.load)
    sigma, u = solve_saddle(system, dense_cutoff)
    errors = error_norms(sigma_space, sigma, disp_space, u, exact.stress,
                         exact.load, exact.displacement, norm_degree)
    row = {'meshsize': 2.0 ** (1 - level),
           'e_sigma_L2': errors['L2_stress'],
           'e_u_L2': errors['L2_displacement'],
           'e_sigma_Hdiv': errors['Hdiv_stress'],
           'n_dof_sigma': sigma_space.dof_count,
           'n_dof_u': disp_space.dof_count,
           'seconds': time.time() - start}
    logger.info('%s level %d: |sigma - sigma_h| = %.5g, |u - u_h| = %.5g '
                '(%d + %d dofs)', problem, level, row['e_sigma_L2'],
                row['e_u_L2'], row['n_dof_sigma'], row['n_dof_u'])

    return row, sigma_space


def run_convergence(problem, levels, cfg=None, dump_space=None,
                    progress=False):
    """
    Run levels 1..levels of a problem and tabulate errors and rates.

    A level above the dof cap ends the study; the rows computed so far are
    returned.

    Args:
        problem (str): Problem and family name.
        levels (int): Number of levels.
        cfg (dict): Configuration with material, dof_cap, dense_cutoff and
            quadrature sections.
        dump_space (str): JSON path for the stress space summaries.

    Output:
        table (pd.DataFrame): Columns COLUMNS, one row per level.
    """
    assert levels >= 1, 'levels must be positive'
    cfg = {} if cfg is None else cfg
    dim = get_family(problem).dim
    material = Material.from_cfg(cfg, dim)
    dof_cap = cfg.get('dof_cap', DEFAULT_DOF_CAP)
    dense_cutoff = cfg.get('dense_cutoff', DENSE_CUTOFF)
    norm_degree = cfg.get('quadrature', {}).get('norms', NORM_DEGREE)

    rows = []
    spaces = {}
    for level in tqdm(range(1, levels + 1), disable=not progress,
                      desc=problem):
        try:
            row, space = solve_level(problem, level, material, dof_cap,
                                     dense_cutoff, norm_degree)
        except DofCapExceededError as err:
            logger.error('%s', err)
            break
        rows.append(row)
        spaces['level_{}'.format(level)] = space.describe()

    table = pd.DataFrame(rows, columns=COLUMNS)
    meshsizes = list(table['meshsize'])
    for error, rate in (('e_sigma_L2', 'rate_sigma'), ('e_u_L2', 'rate_u'),
                        ('e_sigma_Hdiv', 'rate_hdiv')):
        table[rate] = convergence_rates(list(table[error]), meshsizes)
    if dump_space is not None:
        write_json(spaces, dump_space)

    return table


def format_table(table):
    """meshsize, L2 errors and rates as a text table."""
    lines = ['meshsize   |sigma-sigma_h|   rate   |u-u_h|   rate']
    for row in table.itertuples():
        rates = ['---' if _missing(r) else '{:.4f}'.format(r)
                 for r in (row.rate_sigma, row.rate_u)]
        lines.append('{:<10g} {:<17.5g} {:<6} {:<9.5g} {}'.format(
            row.meshsize, row.e_sigma_L2, rates[0], row.e_u_L2, rates[1]))

    return '\n'.join(lines)


def _missing(value):
    return value is None or (isinstance(value, float) and np.isnan(value))


def compare_with_reference(problem, table, rel_tol=0.02):
    """
    Relative deviation of each computed row from the reference table.

    Output:
        deviations (list): (meshsize, sigma deviation, u deviation) for the
            rows present in both tables.
    """
    reference = {h: (s, u) for h, s, u in REFERENCE_TABLES[problem]}
    deviations = []
    for row in table.itertuples():
        if row.meshsize not in reference:
            continue
        sigma_ref, u_ref = reference[row.meshsize]
        deviations.append((row.meshsize,
                           abs(row.e_sigma_L2 - sigma_ref) / sigma_ref,
                           abs(row.e_u_L2 - u_ref) / u_ref))
    for h, ds, du in deviations:
        if max(ds, du) > rel_tol:
            logger.warning('%s meshsize %g deviates from the reference '
                           'table by %.1f%% / %.1f%%', problem, h,
                           100 * ds, 100 * du)

    return deviations
