import json
import os

import pandas as pd

from experiments.convergence import COLUMNS
from experiments.elastmix import (DEFAULT_CFG, get_parser, load_cfg, main,
                                  make_paths_absolute)
from meshes.macro_splits import MacroMesh
from meshes.mesh_io import read_mesh


def test_defaults_load():
    cfg = load_cfg(DEFAULT_CFG)
    assert cfg['material'] == {'mu': 0.5, 'lambda': 1.0}
    assert cfg['levels']['2d-p2'] == 5


def test_make_paths_absolute(tmpdir):
    cfg = make_paths_absolute(str(tmpdir), {'verify': {
        'sequence_mesh_path': 'square.json'}, 'seed': 1})
    assert cfg['verify']['sequence_mesh_path'] == \
        os.path.join(str(tmpdir), 'square.json')


def test_mesh_parser_defaults():
    parser = get_parser()
    args = parser.parse_args(['mesh', '--kind', 'square', '--out', 'm.json'])
    assert args.split == 'none'
    assert args.levels == 1


def test_mesh_square(tmpdir):
    out = str(tmpdir.join('square.json'))
    assert main(['mesh', '--kind', 'square', '--split', '2d-p2', '--out',
                 out]) == 0
    mesh = read_mesh(out)
    assert isinstance(mesh, MacroMesh)
    assert mesh.fine.n_cells == 8


def test_mesh_cube(tmpdir):
    out = str(tmpdir.join('cube.json'))
    assert main(['mesh', '--kind', 'cube', '--split', '3d-p2', '--out',
                 out]) == 0
    assert read_mesh(out).fine.n_cells == 72


def test_verify_rank(tmpdir):
    out = str(tmpdir.join('rank.json'))
    assert main(['verify', 'rank', '--family', '2d-p2', '--trials', '2',
                 '--out', out]) == 0
    with open(out, encoding='utf-8') as f:
        report = json.load(f)
    assert report['pass']
    assert report['trials'] == 2
    assert report['seed'] == 20240601
    assert report['results']['rank']['2d-p2']['reference']['rank'] == 21


def test_converge(tmpdir):
    out = str(tmpdir.join('square.csv'))
    assert main(['converge', '--problem', '2d-p2', '--levels', '2', '--out',
                 out]) == 0
    table = pd.read_csv(out)
    assert list(table.columns) == COLUMNS
    assert len(table) == 2
