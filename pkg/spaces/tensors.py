"""Symmetric tensors stored by independent components.

2D components are (xx, yy, xy); 3D components are (xx, yy, zz, yz, xz, xy).
Off-diagonal components are stored once, so the Frobenius pairing carries a
weight of 2 on them.
"""
import numpy as np

from functools import lru_cache

COMPONENTS = {
    2: ((0, 0), (1, 1), (0, 1)),
    3: ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)),
}


def n_components(dim):
    return len(COMPONENTS[dim])


@lru_cache(maxsize=None)
def frobenius_weights(dim):
    weights = np.array([1.0 if p == q else 2.0 for p, q in COMPONENTS[dim]])
    weights.setflags(write=False)

    return weights


@lru_cache(maxsize=None)
def trace_vector(dim):
    trace = np.array([1.0 if p == q else 0.0 for p, q in COMPONENTS[dim]])
    trace.setflags(write=False)

    return trace


@lru_cache(maxsize=None)
def divergence_tensor(dim):
    """S[i, s, a]: coefficient of component a in the matrix entry (i, s)."""
    table = np.zeros((dim, dim, n_components(dim)))
    for a, (p, q) in enumerate(COMPONENTS[dim]):
        table[p, q, a] = 1.0
        table[q, p, a] = 1.0
    table.setflags(write=False)

    return table


def to_matrix(comps, dim):
    comps = np.asarray(comps)

    return np.einsum('isa,...a->...is', divergence_tensor(dim), comps)


def from_matrix(mat, dim):
    mat = np.asarray(mat)

    return np.stack([mat[..., p, q] for p, q in COMPONENTS[dim]], axis=-1)


def frobenius(s, t, dim):
    return np.sum(frobenius_weights(dim) * np.asarray(s) * np.asarray(t),
                  axis=-1)


def sym_outer(u, v):
    """Components of (u v^T + v u^T) / 2, so sym_outer(t, t) is t t^T."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    return from_matrix(0.5 * (np.outer(u, v) + np.outer(v, u)), len(u))


def bilinear_row(u, v):
    """Row r with r . T = u^T T v for T in component storage."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    return np.einsum('i,isa,s->a', u, divergence_tensor(len(u)), v)


def normal_trace_rows(normal):
    """Matrix R with R T = T n, shape (n, ncomp)."""
    normal = np.asarray(normal, dtype=float)

    return np.einsum('isa,s->ia', divergence_tensor(len(normal)), normal)


def orthonormal_complement(vectors, dim):
    """Orthonormal basis of the complement of span(vectors) in R^dim."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    _, s, vt = np.linalg.svd(vectors)
    rank = int(np.sum(s > 1e-12 * max(s.max(), 1.0)))

    return vt[rank:dim]
