import numpy as np
import pytest

from meshes.simplicial_mesh import (DegenerateCellError, Mesh,
                                    barycentric_gradients, from_barycentric,
                                    to_barycentric, unit_cube_mesh,
                                    unit_square_mesh)


@pytest.mark.parametrize('levels,cells,vertices', [(1, 2, 4), (2, 8, 9),
                                                   (3, 32, 25)])
def test_unit_square_counts(levels, cells, vertices):
    mesh = unit_square_mesh(levels)
    assert mesh.n_cells == cells
    assert mesh.n_vertices == vertices
    assert np.isclose(mesh.volumes.sum(), 1.0)


def test_unit_square_diagonal():
    mesh = unit_square_mesh(1)
    diagonal = mesh.facet_id([0, 3])
    assert diagonal in set(mesh.interior_facets())
    assert len(mesh.interior_facets()) == 1
    assert len(mesh.boundary_facets()) == 4


@pytest.mark.parametrize('levels,cells', [(1, 6), (2, 48)])
def test_unit_cube_counts(levels, cells):
    mesh = unit_cube_mesh(levels)
    assert mesh.n_cells == cells
    assert np.isclose(mesh.volumes.sum(), 1.0)
    assert np.all(mesh.volumes > 0)


def test_unit_cube_shares_main_diagonal():
    mesh = unit_cube_mesh(1)
    # vertex 0 is (0,0,0) and vertex 7 is (1,1,1)
    assert all(0 in cell and 7 in cell for cell in mesh.cells)


def test_orientation_is_positive():
    mesh = Mesh([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]], [[0, 1, 2]])
    assert mesh.volumes[0] > 0


def test_degenerate_cell_is_rejected():
    with pytest.raises(DegenerateCellError, match='degenerate cell'):
        Mesh([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], [[0, 1, 2]])


@pytest.mark.parametrize('mesh', [unit_square_mesh(2), unit_cube_mesh(1)])
def test_facets_are_shared_by_at_most_two_cells(mesh):
    inner = mesh.interior_facets()
    outer = mesh.boundary_facets()
    assert len(inner) + len(outer) == len(mesh.facets)
    uses = np.bincount(mesh.cell_facets.ravel(), minlength=len(mesh.facets))
    assert np.all(uses[inner] == 2)
    assert np.all(uses[outer] == 1)


@pytest.mark.parametrize('mesh', [unit_square_mesh(2), unit_cube_mesh(1)])
def test_normals_point_from_plus_to_minus(mesh):
    assert np.allclose(np.linalg.norm(mesh.facet_normals, axis=1), 1.0)
    centroids = mesh.cell_points.mean(axis=1)
    inner = mesh.interior_facets()
    plus, minus = mesh.facet_cells[inner].T
    direction = centroids[minus] - centroids[plus]
    assert np.all(np.sum(direction * mesh.facet_normals[inner], axis=1) > 0)


def test_boundary_normals_point_outward():
    mesh = unit_square_mesh(2)
    outer = mesh.boundary_facets()
    midpoints = mesh.vertices[mesh.facets[outer]].mean(axis=1)
    assert np.all(np.sum((midpoints - 0.5) * mesh.facet_normals[outer],
                         axis=1) > 0)


def test_jump_of_constant_vanishes():
    mesh = unit_square_mesh(3)
    assert np.allclose(mesh.jump(np.full(mesh.n_cells, 2.5)), 0.0)


def test_barycentric_round_trip(rng):
    points = np.array([[0.1, 0.2], [1.3, 0.1], [0.4, 0.9]])
    bary = rng.dirichlet(np.ones(3), size=5)
    x = from_barycentric(points[None], bary)[0]
    assert np.allclose(to_barycentric(points, x), bary)


def test_barycentric_gradients_sum_to_zero():
    mesh = unit_cube_mesh(1)
    grads = barycentric_gradients(mesh.cell_points)
    assert np.allclose(grads.sum(axis=1), 0.0)
    # grad lambda_l . (x_m - x_0) = delta_lm - delta_l0
    edges = mesh.cell_points[:, 1:] - mesh.cell_points[:, :1]
    products = np.einsum('kls,kms->klm', grads[:, 1:], edges)
    assert np.allclose(products, np.eye(3))


@pytest.mark.parametrize('degree', [1, 2, 3, 4])
def test_lagrange_node_count(degree):
    mesh = unit_square_mesh(2)
    expected = mesh.n_vertices + (degree - 1) * len(mesh.facets) + \
        (degree - 1) * (degree - 2) // 2 * mesh.n_cells
    nodes = mesh.lagrange_nodes(degree)
    assert len(nodes) == expected
    assert nodes.cell_nodes.shape == (mesh.n_cells,
                                      (degree + 1) * (degree + 2) // 2)


def test_lagrange_patches_see_the_same_point():
    mesh = unit_square_mesh(2)
    nodes = mesh.lagrange_nodes(2)
    for node, patch in enumerate(nodes.patches()):
        for c, j in patch:
            assert nodes.cell_nodes[c, j] == node


def test_refine_preserves_area_and_quadruples():
    mesh = unit_square_mesh(2)
    fine = mesh.refine()
    assert fine.n_cells == 4 * mesh.n_cells
    assert np.isclose(fine.volumes.sum(), mesh.volumes.sum())
    assert np.allclose(fine.volumes, mesh.volumes[0] / 4)
