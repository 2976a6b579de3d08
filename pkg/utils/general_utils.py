import json
import logging
import math
import numpy as np
import os

THREADS_ENV = 'ELASTMIX_THREADS'


def thread_cap():
    """Worker count from ELASTMIX_THREADS; unset or invalid means 1."""
    value = os.environ.get(THREADS_ENV, '')
    try:
        threads = int(value)
    except ValueError:
        if value:
            logging.warning('ignoring %s=%r', THREADS_ENV, value)
        return 1

    return max(threads, 1)


def spawn_generators(seed, count):
    """Independent generators for count trials derived from one seed."""
    children = np.random.SeedSequence(seed).spawn(count)

    return [np.random.default_rng(child) for child in children]


def convergence_rates(errors, meshsizes=None):
    """
    Observed orders between successive rows.

    Args:
        errors (list): Errors, one per level.
        meshsizes (list): Mesh sizes; halving is assumed when omitted.

    Output:
        rates (list): None for the first row, log(e0/e1)/log(h0/h1) after.
    """
    if len(errors) == 0:
        return []

    rates = [None]
    for i in range(1, len(errors)):
        ratio = 2.0 if meshsizes is None else \
            meshsizes[i - 1] / meshsizes[i]
        if errors[i] <= 0.0 or errors[i - 1] <= 0.0:
            rates.append(None)
            continue
        rates.append(math.log(errors[i - 1] / errors[i]) / math.log(ratio))

    return rates


def write_json(data, out_path):
    dir_ = os.path.dirname(os.path.abspath(out_path))
    if not os.path.isdir(dir_):
        os.makedirs(dir_)

    with open(out_path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=_to_builtin)
        f.write('\n')


def _to_builtin(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError('{} is not JSON serializable'.format(type(obj).__name__))
