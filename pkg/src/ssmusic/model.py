"""Joint sparse recovery problem data plus the two classifier primitives.

Atoms (columns of ``A``) are the samples being classified.  A label vector
``l`` in {0, 1}^n marks the atoms believed to be in the support; its fitness
is the energy of ``Y`` left outside the span of the positive atoms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError
from .linalg import DEFAULT_REL_TOL, SubspaceBasis, as_matrix, complement_project, span_basis

DEFAULT_REL_EPSILON = 1e-8


def _atom_set(indices: Iterable[int], n: int) -> tuple[int, ...]:
    out = tuple(int(i) for i in indices)
    if len(set(out)) != len(out):
        raise InvalidInputError(f"duplicate atom indices in {out}")
    if any(i < 0 or i >= n for i in out):
        raise InvalidInputError(f"atom index out of range [0, {n})")
    return out


@dataclass(frozen=True)
class JsrProblem:
    """``Y = A X`` with at most ``K`` nonzero rows in ``X``.

    ``A`` is column-normalised on construction.  ``true_support`` is only
    known for synthetic benchmark instances.
    """

    A: np.ndarray
    Y: np.ndarray
    K: int
    true_support: Optional[tuple[int, ...]] = None
    _hash: str = field(default="", init=False, repr=False, compare=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A").copy()
        Y = as_matrix(self.Y, "Y").copy()
        m, n = A.shape
        if n < 2:
            raise InvalidInputError("dictionary needs at least two atoms")
        if Y.shape[0] != m:
            raise InvalidInputError(f"Y has {Y.shape[0]} rows, A has {m}")
        norms = np.linalg.norm(A, axis=0)
        if np.any(norms == 0.0):
            raise InvalidInputError("dictionary contains a zero atom")
        A /= norms
        K = int(self.K)
        if not 1 <= K < n:
            raise InvalidInputError(f"K={K} must satisfy 1 <= K < n={n}")
        support = self.true_support
        if support is not None:
            support = tuple(sorted(_atom_set(support, n)))
            if len(support) != K:
                raise InvalidInputError(f"true support has {len(support)} atoms, K={K}")
        A.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "true_support", support)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def N(self) -> int:
        return self.Y.shape[1]

    def digest(self) -> str:
        """Short content hash; equal hashes mean the same instance."""
        if not self._hash:
            h = hashlib.sha256()
            h.update(np.ascontiguousarray(self.A).tobytes())
            h.update(np.ascontiguousarray(self.Y).tobytes())
            h.update(str((self.K, self.true_support)).encode())
            object.__setattr__(self, "_hash", h.hexdigest()[:16])
        return self._hash


def support_of(labels) -> tuple[int, ...]:
    labels = np.asarray(labels)
    return tuple(int(i) for i in np.flatnonzero(labels))


def labels_of(support: Iterable[int], n: int) -> np.ndarray:
    labels = np.zeros(n, dtype=np.int8)
    labels[list(_atom_set(support, n))] = 1
    return labels


def fitness_of_support(
    problem: JsrProblem, support: Sequence[int], rel_tol: float = DEFAULT_REL_TOL
) -> float:
    if len(support) == 0:
        return float(np.sum(problem.Y**2))
    basis = span_basis(problem.A[:, list(support)], rel_tol)
    R = complement_project(basis, problem.Y)
    return float(np.sum(R**2))


def fitness(labels, problem: JsrProblem, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Residual energy of ``Y`` outside the span of the positively labelled atoms.

    Zero (up to rounding) exactly when every measurement vector lies in that
    span.  A rank-deficient positive set is handled through its
    numerical-rank basis.
    """
    labels = np.asarray(labels)
    if labels.shape != (problem.n,):
        raise InvalidInputError(f"label vector must have length {problem.n}")
    return fitness_of_support(problem, support_of(labels), rel_tol)


def convergence_threshold(Y: np.ndarray, epsilon: Optional[float], rel_epsilon: float) -> float:
    if epsilon is not None:
        return float(epsilon)
    return rel_epsilon * float(np.sum(np.asarray(Y) ** 2))


def atom_distances(A: np.ndarray, basis: SubspaceBasis) -> np.ndarray:
    """Euclidean distance of every column of ``A`` to the subspace."""
    return np.linalg.norm(complement_project(basis, A), axis=0)


def rank_by_distance(A: np.ndarray, query: Sequence[int], basis: SubspaceBasis) -> np.ndarray:
    """Query atoms sorted nearest first; ties go to the lower index."""
    query = np.sort(np.asarray(query, dtype=int))
    if query.size == 0:
        return query
    d = atom_distances(A[:, query], basis)
    return query[np.argsort(d, kind="stable")]


def nsc_classify(
    A: np.ndarray,
    query: Sequence[int],
    basis: SubspaceBasis,
    k: int,
    forced_positive: Sequence[int] = (),
) -> np.ndarray:
    """Nearest-subspace classifier.

    Labels the ``forced_positive`` atoms positive, then fills the remaining
    ``k - len(forced_positive)`` positive slots with the query atoms closest
    to ``basis``.  Returns a length-n {0,1} vector with exactly ``k`` ones.
    """
    n = A.shape[1]
    forced = _atom_set(forced_positive, n)
    query = _atom_set(query, n)
    if k < len(forced):
        raise InvalidInputError(f"k={k} smaller than the forced-positive set ({len(forced)})")
    if basis.ambient_dim != A.shape[0]:
        raise InvalidInputError("basis ambient dimension does not match the atoms")
    free = k - len(forced)
    forced_set = set(forced)
    pool = [i for i in query if i not in forced_set]
    if free > len(pool):
        raise InvalidInputError(f"only {len(pool)} candidate atoms for {free} positive slots")
    labels = labels_of(forced, n)
    if free:
        labels[rank_by_distance(A, pool, basis)[:free]] = 1
    return labels
