import numpy as np
import scipy.sparse as sp

from assembly.forms import (assemble_boundary, assemble_displacement_mass,
                            assemble_div, assemble_load, assemble_mass,
                            assemble_stress_gram, facet_measures,
                            interpolate_broken)
from assembly.quadrature import simplex_quadrature
from experiments.problems import get_problem
from meshes.simplicial_mesh import unit_square_mesh
from solvers.dense_kernels import dense_rank
from spaces.stress_spaces import FESpace, displacement_space, stress_space
from spaces.tensors import to_matrix


def _constant_identity_space(mesh, degree):
    nloc = (degree + 1) * (degree + 2) // 2
    column = np.tile([1.0, 1.0, 0.0], mesh.n_cells * nloc)

    return FESpace(mesh, 'stress-constant', degree, 3,
                   sp.csc_matrix(column[:, None]))


def test_mass_of_identity_on_reference_triangle(reference_triangle,
                                                material2d):
    space = _constant_identity_space(reference_triangle, 1)
    mass = assemble_mass(space, material2d).toarray()
    assert np.allclose(mass, [[1.0 / 3]])


def test_constant_stress_has_zero_divergence(reference_triangle):
    space = _constant_identity_space(reference_triangle, 2)
    disp = displacement_space(reference_triangle, 2)
    assert np.allclose(assemble_div(space, disp).toarray(), 0.0)


def test_mass_is_symmetric_positive(square_macros, material2d):
    sigma = stress_space(square_macros, '2d-p2')
    mass = assemble_mass(sigma, material2d).toarray()
    assert np.abs(mass - mass.T).max() < 1e-12 * np.abs(mass).max()
    assert np.linalg.eigvalsh(mass).min() > 0
    gram = assemble_stress_gram(sigma).toarray()
    assert np.linalg.eigvalsh(gram).min() > 0


def test_div_is_onto(square_macros):
    sigma = stress_space(square_macros, '2d-p2')
    disp = displacement_space(square_macros.fine, 2)
    div = assemble_div(sigma, disp).toarray()
    assert div.shape == (disp.dof_count, sigma.dof_count)
    assert dense_rank(div) == disp.dof_count


def test_zero_load(square):
    disp = displacement_space(square, 2)
    load = assemble_load(disp, lambda x: np.zeros_like(x))
    assert np.allclose(load, 0.0)


def test_constant_load(square):
    disp = displacement_space(square, 2)
    load = assemble_load(disp, lambda x: np.tile([2.0, -1.0], (len(x), 1)))
    per_comp = load.reshape(-1, 2).sum(axis=0)
    assert np.allclose(per_comp, [2.0, -1.0])
    mass = assemble_displacement_mass(disp)
    assert np.allclose(mass.sum(), 2.0)


def test_load_quadrature_is_converged():
    problem = get_problem('2d-p2')
    disp = displacement_space(unit_square_mesh(4), 2)
    coarse = assemble_load(disp, problem.load, degree=8)
    fine = assemble_load(disp, problem.load, degree=10)
    assert np.abs(coarse - fine).max() < 1e-8 * np.abs(fine).max()


def test_interpolate_tensor(square):
    values = interpolate_broken(
        square.cell_points, 1,
        lambda x: np.tile([[1.0, 2.0], [2.0, 3.0]], (len(x), 1, 1)),
        tensor=True)
    assert np.allclose(values.reshape(-1, 3), [1.0, 3.0, 2.0])


def test_boundary_term_of_identity(reference_triangle):
    space = _constant_identity_space(reference_triangle, 2)
    # <x, I n> over the boundary is the integral of div x = 2
    assert np.allclose(assemble_boundary(space, lambda x: x), [1.0])
    shift = assemble_boundary(space, lambda x: np.tile([1.0, -2.0],
                                                       (len(x), 1)))
    assert np.allclose(shift, 0.0)


def test_boundary_term_is_green_formula(square_macros, rng):
    sigma = stress_space(square_macros, '2d-p2')
    disp = displacement_space(square_macros.fine, 2)
    coeffs = rng.normal(size=sigma.dof_count)

    # g linear: <g, tau n> = (div tau, g) + (tau, grad g)
    grad = np.array([[1.0, -0.5], [2.0, 0.25]])
    boundary = assemble_boundary(sigma, lambda x: x @ grad.T) @ coeffs
    g_h = np.linalg.solve(
        assemble_displacement_mass(disp).toarray(),
        assemble_load(disp, lambda x: x @ grad.T))
    volume = assemble_div(sigma, disp).T @ g_h @ coeffs
    tau = sigma.function(coeffs)
    rule = simplex_quadrature(2, 4)
    values = to_matrix(tau.evaluate_bary(rule.points), 2)
    strain = np.einsum('kpij,ij,k,p->', values, grad,
                       square_macros.fine.volumes, rule.unit_weights)
    assert np.isclose(boundary, volume + strain)


def test_facet_measures(cube):
    facets = cube.boundary_facets()
    areas = facet_measures(cube.vertices[cube.facets[facets]])
    assert np.isclose(areas.sum(), 6.0)
