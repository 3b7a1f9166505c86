"""Independent reference computations used as test oracles.

Nothing here imports the package's solvers; each routine goes through a
different numerical path (normal equations, Gram inverses, exhaustive
search, numpy's lstsq) than the code it checks.
"""

from itertools import combinations

import numpy as np


def gram_projector(M):
    """M (M^T M)^-1 M^T for full-column-rank M."""
    return M @ np.linalg.solve(M.T @ M, M.T)


def normal_equations(B, Y):
    return np.linalg.solve(B.T @ B, B.T @ Y)


def residual_energy(A, Y, support):
    if len(support) == 0:
        return float(np.sum(Y**2))
    B = A[:, list(support)]
    X, *_ = np.linalg.lstsq(B, Y, rcond=None)
    return float(np.sum((Y - B @ X) ** 2))


def exhaustive_support(A, Y, K):
    """Minimum-residual K-subset by brute force; returns (support, residual, runner-up residual)."""
    best, best_val, second = None, np.inf, np.inf
    for S in combinations(range(A.shape[1]), K):
        val = residual_energy(A, Y, S)
        if val < best_val:
            best, best_val, second = S, val, best_val
        elif val < second:
            second = val
    return tuple(best), best_val, second


def distance_ranking(A, basis_matrix, query):
    """Query atoms sorted by distance to span(basis_matrix), via a Gram projector; ties to lower index."""
    P = gram_projector(basis_matrix) if basis_matrix.shape[1] else np.zeros((A.shape[0],) * 2)
    query = sorted(query)
    d = [float(np.linalg.norm(A[:, i] - P @ A[:, i])) for i in query]
    return [q for _, q in sorted(zip(d, query))]


def omp_single(A, y, K):
    """Textbook single-vector OMP, written separately from the package's SOMP."""
    picked = []
    r = y.copy()
    for _ in range(K):
        c = np.abs(A.T @ r)
        c[picked] = -1.0
        picked.append(int(np.argmax(c)))
        B = A[:, picked]
        coef, *_ = np.linalg.lstsq(B, y, rcond=None)
        r = y - B @ coef
    return picked


def gaussian_instance(rng, m, n, K, N):
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    S = np.sort(rng.choice(n, K, replace=False))
    X = np.zeros((n, N))
    X[S] = rng.standard_normal((K, N))
    return A, A @ X, tuple(int(i) for i in S)
