"""Mixed finite elements for linear elasticity: convergence, checks, meshes."""
import logging
import os
import pprint
import sys
import time
import yaml

from argparse import ArgumentParser, ArgumentDefaultsHelpFormatter

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from experiments.convergence import (compare_with_reference, format_table,
                                     run_convergence)
from experiments.problems import PROBLEMS
from meshes.macro_splits import (SPLITS, MacroMesh, apply_split,
                                 split_unit_mesh)
from meshes.mesh_io import read_mesh, write_mesh
from meshes.simplicial_mesh import unit_cube_mesh, unit_square_mesh
from utils.general_utils import write_json
from verify.certificates import (DEFAULT_SEED, MIN_ANGLE_DEG,
                                 random_geometry_certificate,
                                 rank_certificate)
from verify.inf_sup import inf_sup_study
from verify.sequence_audit import sequence_audit
from verify.unisolvence import random_unisolvence, unisolvence_check

DEFAULT_CFG = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                           'configs', 'defaults.yaml')

CERTIFIED_FAMILIES = ('2d-p2', '3d-p3', '3d-p2')
TARGETS = ('rank', 'infsup', 'unisolvence', 'sequence', 'all')
KINDS = {'square': unit_square_mesh, 'cube': unit_cube_mesh}


def make_paths_absolute(dir_, cfg):
    """
    Make all values for keys ending with `_path` absolute to dir_.

    Args:
        dir_ (str): The absolute path to the directory of the config.
        cfg (dict): Dictionary of config params.

    Output:
        cfg (dict): Dictionary of config params with absolute paths.
    """
    for key in cfg.keys():
        if key.endswith("_path") and cfg[key] is not None:
            cfg[key] = os.path.abspath(os.path.join(dir_, cfg[key]))
            if not os.path.isfile(cfg[key]):
                logging.error("%s does not exist.", cfg[key])
        if type(cfg[key]) is dict:
            cfg[key] = make_paths_absolute(dir_, cfg[key])

    return cfg


def load_cfg(yaml_filepath):
    """
    Load a YAML configuration file.

    Args:
        yaml_filepath (str): Path to yaml config file.

    Output:
        cfg (dict): Dictionary of config params.
    """
    with open(yaml_filepath, 'r', encoding='utf-8') as stream:
        cfg = yaml.full_load(stream) or {}
    cfg = make_paths_absolute(os.path.dirname(os.path.abspath(yaml_filepath)),
                              cfg)

    return cfg


def _ensure_dir(path):
    dir_ = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(dir_):
        os.makedirs(dir_)


def cmd_converge(args, cfg):
    levels = args.levels or cfg.get('levels', {}).get(args.problem, 2)
    table = run_convergence(args.problem, levels, cfg,
                            dump_space=args.dump_space, progress=True)
    logging.info('%s\n%s', args.problem, format_table(table))
    compare_with_reference(args.problem, table)

    out = args.out or os.path.join('results', '{}.csv'.format(args.problem))
    _ensure_dir(out)
    table.to_csv(out, index=False, na_rep='', encoding='utf-8')
    logging.info('Wrote %d rows to %s', len(table), out)

    return 0 if len(table) == levels else 1


def _families(args):
    return [args.family] if args.family else list(CERTIFIED_FAMILIES)


def verify_rank(args, cfg):
    section = cfg.get('verify', {})
    results = {}
    for family in _families(args):
        reference = rank_certificate(family, rank_tol=section.get(
            'rank_tol', 1e-9))
        trials = random_geometry_certificate(
            family, args.trials, args.seed,
            section.get('min_angle_deg', MIN_ANGLE_DEG),
            section.get('rank_tol', 1e-9))
        passed = reference.passed and all(c.passed for c in trials)
        logging.info('rank %s: %d/%d, %d random trials, pass=%s', family,
                     reference.rank, reference.n_u, len(trials), passed)
        results[family] = {'reference': reference.to_dict(),
                           'random': [c.to_dict() for c in trials],
                           'pass': passed}

    return results


def verify_infsup(args, cfg):
    levels = cfg.get('verify', {}).get('infsup_levels', {})
    results = {}
    for family in _families(args):
        study = inf_sup_study(family, levels.get(family))
        results[family] = study
        logging.info('inf-sup %s: beta_h = %s, pass=%s', family,
                     ['{:.4f}'.format(r['beta']) for r in study['rows']],
                     study['pass'])

    return results


def verify_unisolvence(args, cfg):
    section = cfg.get('verify', {})
    reference = unisolvence_check()
    trials = random_unisolvence(args.trials, args.seed,
                                section.get('min_angle_deg', MIN_ANGLE_DEG))
    passed = reference['pass'] and all(t['pass'] for t in trials)
    logging.info('unisolvence: rank %d, cond %.3e, %d random trials, '
                 'pass=%s', reference['rank'], reference['cond'],
                 len(trials), passed)

    return {'2d-p2': {'reference': reference, 'random': trials,
                      'pass': passed}}


def verify_sequence(args, cfg):
    section = cfg.get('verify', {})
    meshes = {}
    if section.get('sequence_mesh_path'):
        meshes['file'] = read_mesh(section['sequence_mesh_path'])
    else:
        for level in section.get('sequence_levels', [1, 2]):
            meshes['level_{}'.format(level)] = split_unit_mesh(
                2, '2d-p2', level)

    results = {}
    for name, macro_mesh in meshes.items():
        assert isinstance(macro_mesh, MacroMesh) and \
            macro_mesh.split == '2d-p2', \
            'the sequence audit needs a 2d-p2 macro mesh'
        report = sequence_audit(macro_mesh)
        logging.info('sequence %s: dim U_h - dim Sigma_h + dim V_h = %d, '
                     'pass=%s', name, report['alternating_sum'],
                     report['pass'])
        results[name] = report

    return results


VERIFIERS = {'rank': verify_rank, 'infsup': verify_infsup,
             'unisolvence': verify_unisolvence, 'sequence': verify_sequence}


def _passed(results):
    return all(entry['pass'] for entry in results.values())


def cmd_verify(args, cfg):
    section = cfg.get('verify', {})
    if args.seed is None:
        args.seed = section.get('seed', DEFAULT_SEED)
    if args.trials is None:
        args.trials = section.get('trials', 20)
    targets = list(VERIFIERS) if args.target == 'all' else [args.target]
    report = {'target': args.target, 'seed': args.seed,
              'trials': args.trials,
              'created': time.strftime('%Y-%m-%dT%H:%M:%S'),
              'results': {}}
    for target in targets:
        report['results'][target] = VERIFIERS[target](args, cfg)
    report['pass'] = all(_passed(r) for r in report['results'].values())
    if not report['pass']:
        logging.error('verify %s failed', args.target)

    if args.out:
        _ensure_dir(args.out)
        write_json(report, args.out)
        logging.info('Wrote report to %s', args.out)

    return 0 if report['pass'] else 1


def cmd_mesh(args, cfg):
    mesh = KINDS[args.kind](args.levels)
    if args.split != 'none':
        mesh = apply_split(mesh, args.split)
    _ensure_dir(args.out)
    write_mesh(args.out, mesh)

    return 0


def get_parser():
    """Get parser object."""
    parser = ArgumentParser(prog='elastmix', description=__doc__,
                            formatter_class=ArgumentDefaultsHelpFormatter)

    parser.add_argument("-f", "--file",
                        dest="filename",
                        help="experiment definition file",
                        metavar="FILE",
                        default=DEFAULT_CFG)

    parser.add_argument("-v", "--verbose",
                        action="store_true",
                        help="log at DEBUG level")

    commands = parser.add_subparsers(dest="command", required=True)

    converge = commands.add_parser(
        "converge", help="convergence study of a manufactured problem",
        formatter_class=ArgumentDefaultsHelpFormatter)
    converge.add_argument("--problem", choices=sorted(PROBLEMS),
                          required=True)
    converge.add_argument("--levels", type=int,
                          help="number of levels, from the config if unset")
    converge.add_argument("--out", metavar="PATH",
                          help="CSV output, results/<problem>.csv if unset")
    converge.add_argument("--dump-space", dest="dump_space", metavar="PATH",
                          help="JSON summary of the stress spaces")

    verify = commands.add_parser(
        "verify", help="rank, inf-sup, unisolvence and sequence checks",
        formatter_class=ArgumentDefaultsHelpFormatter)
    verify.add_argument("target", choices=TARGETS)
    verify.add_argument("--family", choices=CERTIFIED_FAMILIES)
    verify.add_argument("--seed", type=int,
                        help="master seed, from the config if unset")
    verify.add_argument("--trials", type=int,
                        help="random geometries, from the config if unset")
    verify.add_argument("--out", metavar="PATH", help="JSON report")

    mesh = commands.add_parser("mesh", help="write a mesh as JSON",
                               formatter_class=ArgumentDefaultsHelpFormatter)
    mesh.add_argument("--kind", choices=sorted(KINDS), required=True)
    mesh.add_argument("--levels", type=int, default=1)
    mesh.add_argument("--split", choices=SPLITS, default='none')
    mesh.add_argument("--out", metavar="PATH", required=True)

    return parser


COMMANDS = {'converge': cmd_converge, 'verify': cmd_verify, 'mesh': cmd_mesh}


def main(argv=None):
    args = get_parser().parse_args(argv)
    logging.basicConfig(format='%(asctime)s %(levelname)s %(message)s',
                        level=logging.DEBUG if args.verbose else logging.INFO,
                        stream=sys.stdout)
    cfg = load_cfg(args.filename)
    logging.debug('config:\n%s', pprint.pformat(cfg, indent=4))

    start = time.time()
    code = COMMANDS[args.command](args, cfg)
    print('It took {0:0.1f} seconds'.format(time.time() - start))

    return code


if __name__ == '__main__':
    sys.exit(main())
