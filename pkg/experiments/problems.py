"""Manufactured pure displacement problems on the unit square and cube.

The displacement is written in torch; strain, stress and the load
f = div sigma follow by forward-mode differentiation in double precision.
Every field takes and returns numpy arrays of batched points.
"""
import math
import numpy as np
import torch

from torch.func import jacfwd, vmap

from assembly.material import Material


def _square_displacement(x):
    s, t = x[0], x[1]
    bubble = s * (1 - s) * t * (1 - t)

    return torch.stack([torch.exp(s - t) * bubble,
                        torch.sin(math.pi * s) * torch.sin(math.pi * t)])


def _cube_displacement(x):
    bubble = torch.prod(x * (1 - x))

    return torch.stack([16.0 * bubble, 32.0 * bubble, 64.0 * bubble])


def _zero_displacement(x):
    return 0.0 * x


AFFINE_GRADIENTS = {2: [[2.0, 1.0], [1.0, 3.0]],
                    3: [[2.0, 1.0, 0.0], [0.5, 3.0, -1.0], [1.0, 0.0, -1.0]]}


def _affine_displacement(x):
    grad = torch.as_tensor(AFFINE_GRADIENTS[x.shape[0]], dtype=x.dtype)

    return grad @ x + 0.1


DISPLACEMENTS = {2: _square_displacement, 3: _cube_displacement}
PROBLEMS = {'2d-p2': 2, '3d-p3': 3, '3d-p2': 3, '3d-p2-flat': 3}


class ManufacturedProblem(object):
    """
    Exact fields of a displacement problem; u = 0 on the boundary unless
    the displacement itself is passed as boundary data.

    Args:
        name (str): Problem name.
        dim (int): Spatial dimension.
        displacement (callable): torch function of a single point (n,) -> (n,).
        material (Material): Lame parameters.
    """

    def __init__(self, name, dim, displacement, material=None):
        self.name = name
        self.dim = dim
        self.material = Material(dim=dim) if material is None else material
        self._u = displacement

    def __repr__(self):
        return 'ManufacturedProblem({}, dim={}, {})'.format(
            self.name, self.dim, self.material)

    def _stress_at(self, x):
        grad = jacfwd(self._u)(x)
        eps = 0.5 * (grad + grad.T)
        eye = torch.eye(self.dim, dtype=x.dtype)

        return 2.0 * self.material.mu * eps + \
            self.material.lam * torch.diagonal(eps).sum() * eye

    def _divergence_at(self, x):
        return torch.einsum('ijj->i', jacfwd(self._stress_at)(x))

    def _batched(self, fn, x):
        points = torch.as_tensor(np.asarray(x, dtype=float).reshape(
            -1, self.dim), dtype=torch.float64)

        return vmap(fn)(points).detach().numpy()

    def displacement(self, x):
        """u(x) as (npts, n)."""
        return self._batched(self._u, x)

    def stress(self, x):
        """sigma = 2 mu eps(u) + lam tr(eps(u)) I as (npts, n, n)."""
        return self._batched(self._stress_at, x)

    def load(self, x):
        """f = div sigma as (npts, n)."""
        return self._batched(self._divergence_at, x)


def get_problem(problem, material=None):
    """
    Manufactured problem of a convergence run.

    Args:
        problem (str): '2d-p2' uses the square problem, '3d-p3', '3d-p2' and
            '3d-p2-flat' the cube problem.
        material (Material): Defaults to mu = 1/2, lam = 1.
    """
    if problem not in PROBLEMS:
        raise ValueError('unknown problem {!r}, expected one of {}'.format(
            problem, ', '.join(PROBLEMS)))
    dim = PROBLEMS[problem]

    return ManufacturedProblem(problem, dim, DISPLACEMENTS[dim], material)


def zero_problem(dim, material=None):
    """u = 0, used to check unique solvability."""
    return ManufacturedProblem('zero', dim, _zero_displacement, material)


def affine_problem(dim, material=None):
    """Affine u with constant stress and no load, for patch tests."""
    return ManufacturedProblem('affine', dim, _affine_displacement, material)

