import json
import logging
import numpy as np

from meshes.macro_splits import Macro, MacroMesh
from meshes.simplicial_mesh import Mesh

logger = logging.getLogger(__name__)


def mesh_to_dict(mesh):
    """JSON-ready dict of a Mesh or MacroMesh."""
    macros = []
    split = 'none'
    if isinstance(mesh, MacroMesh):
        split = mesh.split
        for macro in mesh.macros:
            macros.append({
                'cells': list(macro.cells),
                'coarse_cell': int(macro.coarse_cell),
                'vertices': {k: int(v) for k, v in
                             sorted(macro.vertices.items())},
                'labels': {k: [float(x) for x in v] for k, v in
                           sorted(macro.points.items())},
            })
        mesh = mesh.fine

    return {
        'dim': int(mesh.dim),
        'split': split,
        'vertices': mesh.vertices.tolist(),
        'cells': mesh.cells.tolist(),
        'macros': macros,
    }


def mesh_from_dict(data):
    fine = Mesh(np.array(data['vertices'], dtype=float).reshape(
        -1, data['dim']), data['cells'])
    if not data.get('macros'):
        return fine

    macros = [Macro(i, m.get('coarse_cell', i), m['cells'], m['vertices'],
                    m['labels'])
              for i, m in enumerate(data['macros'])]

    return MacroMesh(fine, macros, data.get('split', 'none'))


def write_mesh(path, mesh):
    with open(path, 'w', encoding='utf-8') as stream:
        json.dump(mesh_to_dict(mesh), stream, indent=1)
    logger.info('Wrote mesh to %s', path)


def read_mesh(path):
    with open(path, 'r', encoding='utf-8') as stream:
        data = json.load(stream)

    return mesh_from_dict(data)
