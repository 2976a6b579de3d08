import numpy as np
import pytest

from meshes.macro_splits import apply_split, identity_split
from meshes.simplicial_mesh import Mesh
from spaces.bubbles import (EmptyBubbleSpaceError, element_bubble_space,
                            expected_element_bubble_dim, get_family,
                            macro_bubble_space)
from spaces.tensors import to_matrix
from assembly.quadrature import simplex_quadrature
from verify.certificates import REFERENCE_VERTICES


def _reference_macro(split):
    dim = 2 if split == '2d-p2' else 3
    mesh = Mesh(REFERENCE_VERTICES[dim], [list(range(dim + 1))])
    macro_mesh = apply_split(mesh, split)

    return macro_mesh, macro_mesh.macros[0]


def _facet_points(mesh, facet, rng, count=4):
    corners = mesh.vertices[mesh.facets[facet]]

    return rng.dirichlet(np.ones(len(corners)), size=count) @ corners


def _traces(space, macro_mesh, macro, rng):
    """Largest normal trace on the macro boundary and largest normal jump."""
    mesh = macro_mesh.fine
    local = {c: i for i, c in enumerate(macro.cells)}
    boundary, jump = 0.0, 0.0
    for i in range(space.dim):
        member = space.member(i)
        for cell in macro.cells:
            for facet in mesh.cell_facets[cell]:
                x = _facet_points(mesh, facet, rng)
                normal = mesh.facet_normals[facet]
                here = to_matrix(member(x, local[cell]), mesh.dim) @ normal
                if facet in macro.interior_facets:
                    other = [c for c in mesh.facet_cells[facet]
                             if c != cell][0]
                    there = to_matrix(member(x, local[other]),
                                      mesh.dim) @ normal
                    jump = max(jump, np.abs(here - there).max())
                else:
                    boundary = max(boundary, np.abs(here).max())

    return boundary, jump


@pytest.mark.parametrize('dim,degree,expected', [(2, 2, 3), (3, 3, 24),
                                                 (3, 2, 6)])
def test_element_bubble_dimension(dim, degree, expected):
    assert expected_element_bubble_dim(dim, degree) == expected
    space = element_bubble_space(REFERENCE_VERTICES[dim], degree)
    assert space.dim == expected


def test_element_bubbles_are_orthonormal_and_trace_free(rng):
    points = np.array([[0.1, 0.0], [1.0, 0.3], [0.2, 0.8]])
    space = element_bubble_space(points, 2)
    rule = simplex_quadrature(2, 6)
    values = np.stack([m.evaluate_bary(rule.points)[0] for m in space.basis])
    area = 0.5 * abs(np.linalg.det(points[1:] - points[0]))
    gram = area * np.einsum('q,iqa,jqa,a->ij', rule.unit_weights, values,
                            values, [1.0, 1.0, 2.0])
    assert np.allclose(gram, np.eye(space.dim), atol=1e-10)

    for i in range(3):
        edge = np.delete(points, i, axis=0)
        x = rng.dirichlet(np.ones(2), size=3) @ edge
        tangent = edge[1] - edge[0]
        normal = np.array([tangent[1], -tangent[0]])
        for member in space.basis:
            tau = to_matrix(member(x, 0), 2)
            assert np.allclose(tau @ normal, 0.0, atol=1e-10)


@pytest.mark.parametrize('split,counts', [
    ('2d-p2', {'element': 12, 'continuous': 6, 'tangential': 3}),
    ('3d-p3', {'continuous': 9, 'tangential': 16}),
])
def test_category_counts(split, counts):
    macro_mesh, macro = _reference_macro(split)
    space = macro_bubble_space(macro_mesh, macro, split)
    for name, count in counts.items():
        assert space.category_counts[name] == count


@pytest.mark.parametrize('split', ['2d-p2', '3d-p3', '3d-p2'])
def test_macro_bubbles_are_hdiv_bubbles(split, rng):
    macro_mesh, macro = _reference_macro(split)
    space = macro_bubble_space(macro_mesh, macro, split)
    assert space.dim > 0
    assert space.family == split
    boundary, jump = _traces(space, macro_mesh, macro, rng)
    assert boundary < 1e-10
    assert jump < 1e-10


def test_macro_bubbles_are_independent():
    macro_mesh, macro = _reference_macro('2d-p2')
    space = macro_bubble_space(macro_mesh, macro, '2d-p2')
    rule = simplex_quadrature(2, 6)
    values = np.stack([m.evaluate_bary(rule.points) for m in space.basis])
    vols = macro_mesh.fine.volumes[list(macro.cells)]
    gram = np.einsum('k,q,ikqa,jkqa,a->ij', vols, rule.unit_weights, values,
                     values, [1.0, 1.0, 2.0])
    assert np.linalg.eigvalsh(gram).min() > 1e-10 * np.linalg.eigvalsh(
        gram).max()


def test_plain_mesh_has_no_macro_bubbles(reference_tet):
    macro_mesh = identity_split(reference_tet)
    with pytest.raises(EmptyBubbleSpaceError):
        macro_bubble_space(macro_mesh, macro_mesh.macros[0], '3d-p2-flat')


def test_family_lookup():
    family = get_family('3d-p2')
    assert (family.dim, family.degree, family.split) == (3, 2, '3d-p2')
    assert get_family(family) is family
    assert get_family('3d-p2-flat').split == 'none'
    with pytest.raises(ValueError, match='unknown family'):
        get_family('2d-p3')


def test_split_mismatch_is_rejected(square_macros):
    with pytest.raises(AssertionError):
        macro_bubble_space(square_macros, square_macros.macros[0], '3d-p3')

