"""Discrete inf-sup constants of stress/displacement pairs."""
import logging
import numpy as np
import scipy.linalg

from assembly.forms import (assemble_displacement_mass, assemble_div,
                            assemble_stress_gram)
from meshes.macro_splits import split_unit_mesh
from solvers.dense_kernels import dense_rank, generalized_eig_min
from spaces.bubbles import get_family
from spaces.stress_spaces import displacement_space, stress_space

logger = logging.getLogger(__name__)

MAX_VARIATION = 0.25
DEFAULT_LEVELS = {2: (1, 2, 3), 3: (1,)}


def hdiv_gram(sigma, disp, div=None, disp_mass=None):
    """
    (tau, tau) + (div tau, div tau) on the stress space.

    div tau is piecewise P_{k-1}, so its norm is B^T M_V^{-1} B exactly.
    """
    div = assemble_div(sigma, disp).toarray() if div is None else div
    disp_mass = assemble_displacement_mass(disp).toarray() \
        if disp_mass is None else disp_mass
    gram = assemble_stress_gram(sigma).toarray()

    return gram + div.T @ scipy.linalg.solve(disp_mass, div, assume_a='pos')


def inf_sup_constant(macro_mesh, family):
    """
    beta_h = inf_v sup_tau (div tau, v) / (|tau|_Hdiv |v|_L2).

    beta_h^2 is the smallest eigenvalue of B X^{-1} B^T v = lambda M_V v
    with X the H(div) Gram matrix. A divergence that is not onto V_h gives
    beta_h = 0.

    Output:
        beta (float)
        dims (dict): n_dof_sigma, n_dof_u and rank of B.
    """
    family = get_family(family)
    sigma = stress_space(macro_mesh, family)
    disp = displacement_space(macro_mesh.fine, family.degree)
    div = assemble_div(sigma, disp).toarray()
    disp_mass = assemble_displacement_mass(disp).toarray()
    x_gram = hdiv_gram(sigma, disp, div, disp_mass)

    rank = dense_rank(div)
    dims = {'n_dof_sigma': sigma.dof_count, 'n_dof_u': disp.dof_count,
            'rank_div': rank}
    if rank < disp.dof_count:
        logger.warning('%s: div has rank %d < dim V_h = %d', family.name,
                       rank, disp.dof_count)
        return 0.0, dims

    factor = scipy.linalg.cho_factor(x_gram)
    schur = div @ scipy.linalg.cho_solve(factor, div.T)
    beta = float(np.sqrt(generalized_eig_min(schur, disp_mass)))

    return beta, dims


def inf_sup_study(family, levels=None, max_variation=MAX_VARIATION):
    """
    inf-sup constants on successive unit-domain meshes of a family.

    Args:
        family (str): Stress family.
        levels (list): Refinement levels; 1-3 in 2D and 1 in 3D by default.
        max_variation (float): Largest accepted relative change of beta_h
            between successive levels.

    Output:
        report (dict): one row per level, the largest variation and a pass
            flag requiring beta_h > 0 everywhere.
    """
    family = get_family(family)
    levels = DEFAULT_LEVELS[family.dim] if levels is None else levels
    rows = []
    for level in levels:
        macro_mesh = split_unit_mesh(family.dim, family.split, level)
        beta, dims = inf_sup_constant(macro_mesh, family)
        row = {'level': int(level), 'meshsize': 2.0 ** (1 - level),
               'beta': beta}
        row.update(dims)
        rows.append(row)
        logger.info('%s level %d: beta_h = %.5f', family.name, level, beta)

    betas = [row['beta'] for row in rows]
    variation = 0.0
    for prev, cur in zip(betas[:-1], betas[1:]):
        if prev > 0.0:
            variation = max(variation, abs(cur - prev) / prev)
    report = {'family': family.name, 'rows': rows, 'variation': variation,
              'pass': bool(min(betas) > 0.0 and variation < max_variation)}

    return report
