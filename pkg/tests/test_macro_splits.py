import numpy as np
import pytest

from meshes.macro_splits import (apply_split, check_labels, identity_split,
                                 longest_edge_apex, macro_split_2d,
                                 macro_split_3d_p2, macro_split_3d_p3,
                                 split_unit_mesh)
from meshes.simplicial_mesh import (DegenerateCellError, Mesh,
                                    unit_cube_mesh, unit_square_mesh)


def _boundary_measure(mesh):
    points = mesh.vertices[mesh.facets[mesh.boundary_facets()]]
    if mesh.dim == 2:
        return np.linalg.norm(points[:, 1] - points[:, 0], axis=1).sum()
    cross = np.cross(points[:, 1] - points[:, 0], points[:, 2] - points[:, 0])

    return 0.5 * np.linalg.norm(cross, axis=1).sum()


def test_square_macro_mesh(square_macros):
    assert square_macros.fine.n_cells == 8
    assert len(square_macros.macros) == 2
    assert all(len(m.cells) == 4 for m in square_macros.macros)
    assert all(len(m.interior_facets) == 3 for m in square_macros.macros)
    assert np.allclose(square_macros.macro_volumes(), 0.5)


def test_reference_triangle_labels(reference_triangle):
    macro_mesh = macro_split_2d(reference_triangle)
    macro = macro_mesh.macros[0]
    assert np.allclose(macro.points['x0'], [0.0, 0.0])
    assert np.allclose(macro.points['m1'], [0.5, 0.5])
    # E2 runs from m1 to x0
    assert np.allclose(macro.points['d2'], [0.25, 0.25])
    vols = macro_mesh.fine.volumes[list(macro.cells)]
    assert np.isclose(vols.sum(), 0.5)


def test_apex_is_the_right_angle(square_macros):
    apexes = []
    for macro in square_macros.macros:
        x0, x1, x2 = (macro.points[x] for x in ('x0', 'x1', 'x2'))
        assert np.isclose((x1 - x0) @ (x2 - x0), 0.0)
        assert macro.vertices['x1'] < macro.vertices['x2']
        # E2 joins the apex to the midpoint of the diagonal
        assert np.allclose(macro.points['m1'], [0.5, 0.5])
        apexes.append(tuple(x0))
    assert sorted(apexes) == [(0.0, 1.0), (1.0, 0.0)]


def test_apex_on_refined_square():
    macro_mesh = split_unit_mesh(2, '2d-p2', 3)
    for macro in macro_mesh.macros:
        x0, x1, x2 = (macro.points[x] for x in ('x0', 'x1', 'x2'))
        assert np.linalg.norm(x2 - x1) > np.linalg.norm(x1 - x0) + 1e-12
        assert np.linalg.norm(x2 - x1) > np.linalg.norm(x2 - x0) + 1e-12


def test_apex_tie_goes_to_lowest_index():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    assert longest_edge_apex(vertices, [2, 0, 1]) == (0, 1, 2)
    right = np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 0.0]])
    assert longest_edge_apex(right, [0, 1, 2]) == (2, 0, 1)


def test_3d_p3_reference(reference_tet):
    macro_mesh = macro_split_3d_p3(reference_tet)
    macro = macro_mesh.macros[0]
    assert np.allclose(macro_mesh.fine.volumes, 1.0 / 24)
    assert len(macro.interior_facets) == 3
    assert np.allclose(macro.points['g1'], [0.0, 1.0 / 3, 1.0 / 6])
    assert np.allclose(macro.points['g2'], [0.0, 1.0 / 6, 1.0 / 3])


def test_3d_p2_reference(reference_tet):
    macro_mesh = macro_split_3d_p2(reference_tet)
    macro = macro_mesh.macros[0]
    assert macro_mesh.fine.n_cells == 12
    assert np.allclose(macro_mesh.fine.volumes, 1.0 / 72)
    assert len(macro.interior_facets) == 18
    assert np.allclose(macro.points['m5'], [0.25, 0.25, 0.25])


@pytest.mark.parametrize('split,cells', [('3d-p3', 24), ('3d-p2', 72),
                                         ('none', 6)])
def test_cube_splits(split, cells):
    macro_mesh = split_unit_mesh(3, split, 1)
    assert macro_mesh.fine.n_cells == cells
    assert np.isclose(macro_mesh.fine.volumes.sum(), 1.0)
    assert np.isclose(_boundary_measure(macro_mesh.fine), 6.0)
    assert check_labels(macro_mesh) == []


@pytest.mark.parametrize('levels', [1, 2, 3])
def test_square_split_is_conforming(levels):
    macro_mesh = split_unit_mesh(2, '2d-p2', levels)
    assert np.isclose(_boundary_measure(macro_mesh.fine), 4.0)
    assert check_labels(macro_mesh) == []


def test_cube_level_two_split_is_conforming():
    macro_mesh = apply_split(unit_cube_mesh(2), '3d-p3')
    assert macro_mesh.fine.n_cells == 4 * 48
    assert np.isclose(_boundary_measure(macro_mesh.fine), 6.0)


def test_interior_facets_stay_in_their_macro():
    macro_mesh = split_unit_mesh(2, '2d-p2', 2)
    fine = macro_mesh.fine
    for macro in macro_mesh.macros:
        for f in macro.interior_facets:
            owners = macro_mesh.cell_macro[fine.facet_cells[f]]
            assert np.all(owners == macro.index)


def test_identity_split():
    mesh = unit_square_mesh(2)
    macro_mesh = identity_split(mesh)
    assert len(macro_mesh.macros) == mesh.n_cells
    assert np.array_equal(macro_mesh.cell_macro, np.arange(mesh.n_cells))


def test_unknown_split():
    with pytest.raises(ValueError, match='unknown split'):
        apply_split(unit_square_mesh(1), '2d-p7')


def test_split_rejects_degenerate_cell():
    mesh = Mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    mesh.vertices[2] = [2.0, 0.0]
    with pytest.raises(DegenerateCellError):
        macro_split_2d(mesh)


def test_check_labels_detects_moved_point(square_macros):
    square_macros.macros[0].points['d1'] = square_macros.macros[0].points[
        'd1'] + 0.1
    assert (0, 'd1') in check_labels(square_macros)
