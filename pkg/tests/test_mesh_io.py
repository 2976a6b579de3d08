import json

import numpy as np

from meshes.macro_splits import MacroMesh, split_unit_mesh
from meshes.mesh_io import mesh_from_dict, mesh_to_dict, read_mesh, write_mesh
from meshes.simplicial_mesh import unit_square_mesh


def test_plain_mesh_round_trip(tmp_path):
    mesh = unit_square_mesh(2)
    path = str(tmp_path / 'square.json')
    write_mesh(path, mesh)
    again = read_mesh(path)
    assert np.array_equal(again.vertices, mesh.vertices)
    assert np.array_equal(again.cells, mesh.cells)


def test_macro_mesh_round_trip(tmp_path):
    macro_mesh = split_unit_mesh(3, '3d-p2', 1)
    path = str(tmp_path / 'cube.json')
    write_mesh(path, macro_mesh)
    with open(path, encoding='utf-8') as stream:
        data = json.load(stream)
    assert data['split'] == '3d-p2'
    assert len(data['cells']) == 72

    again = read_mesh(path)
    assert isinstance(again, MacroMesh)
    assert again.split == '3d-p2'
    assert mesh_to_dict(again) == mesh_to_dict(macro_mesh)
    for a, b in zip(again.macros, macro_mesh.macros):
        assert a.interior_facets == b.interior_facets


def test_dict_keeps_named_points():
    macro_mesh = split_unit_mesh(2, '2d-p2', 1)
    data = mesh_to_dict(macro_mesh)
    assert sorted(data['macros'][0]['labels']) == [
        'd1', 'd2', 'd3', 'm1', 'm2', 'm3', 'x0', 'x1', 'x2']
    again = mesh_from_dict(data)
    assert np.allclose(again.macros[1].points['m1'],
                       macro_mesh.macros[1].points['m1'])
