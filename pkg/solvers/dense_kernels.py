"""Dense rank, range and eigenvalue kernels used by space construction and checks."""
import numpy as np
import scipy.linalg

RANK_TOL = 1e-9
ZERO_EIG_TOL = 1e-10


def singular_values(matrix):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros(0)

    return scipy.linalg.svdvals(matrix)


def dense_rank(matrix, rel_tol=RANK_TOL):
    """Number of singular values above rel_tol times the largest one."""
    s = singular_values(matrix)
    if len(s) == 0 or s[0] == 0.0:
        return 0

    return int(np.sum(s > rel_tol * s[0]))


def singular_value_gap(matrix, rel_tol=RANK_TOL):
    """
    Ratio between the last kept and the first dropped singular value.

    Output:
        gap (float): inf when nothing is dropped.
    """
    s = singular_values(matrix)
    rank = dense_rank(matrix, rel_tol)
    if rank == 0 or rank >= len(s):
        return float('inf')
    if s[rank] == 0.0:
        return float('inf')

    return float(s[rank - 1] / s[rank])


def range_basis(matrix, scale=1.0, tol=1e-8):
    """Orthonormal basis of the column space, ignoring directions below tol*scale."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[1] == 0:
        return np.zeros((matrix.shape[0], 0))
    u, s, _ = scipy.linalg.svd(matrix, full_matrices=False)

    return u[:, s > tol * max(scale, 1.0)]


def null_basis(matrix, ncols, rcond=1e-10):
    """Orthonormal basis of the kernel; no rows means the whole space."""
    matrix = np.asarray(matrix, dtype=float).reshape(-1, ncols)
    if len(matrix) == 0:
        return np.eye(ncols)

    return scipy.linalg.null_space(matrix, rcond=rcond)


def generalized_eig_min(a_mat, b_mat, zero_tol=ZERO_EIG_TOL):
    """Smallest eigenvalue of A x = lambda B x above the zero threshold."""
    eigs = scipy.linalg.eigh(np.asarray(a_mat, dtype=float),
                             np.asarray(b_mat, dtype=float),
                             eigvals_only=True)
    threshold = zero_tol * max(1.0, float(np.max(np.abs(eigs))))
    positive = eigs[eigs > threshold]
    if len(positive) == 0:
        return 0.0

    return float(positive.min())
