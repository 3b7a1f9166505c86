"""Subspace primitives: numerical rank, orthonormal bases, projections, least squares.

Every solver in the package is written on top of these few functions, so the
rank decisions they make (a relative singular-value cutoff) are shared by all
of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError

DEFAULT_REL_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array (1-D input becomes a column)."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return M


def _check_tol(rel_tol: float) -> None:
    if not 0.0 < rel_tol < 1.0:
        raise InvalidInputError(f"rel_tol must lie in (0, 1), got {rel_tol}")


def _fix_signs(U: np.ndarray) -> np.ndarray:
    # first non-negligible entry of each column made nonnegative
    if U.shape[1] == 0:
        return U
    big = np.abs(U) > 1e-12
    first = np.argmax(big, axis=0)
    signs = np.sign(U[first, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def _rank_from_singular_values(s: np.ndarray, rel_tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis ``U`` (m x d) of a subspace of R^m.

    ``d == 0`` encodes the trivial subspace {0}.
    """

    basis: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.basis, dtype=float)
        if U.ndim != 2:
            raise InvalidInputError("basis must be 2-D")
        if U.shape[1] > U.shape[0]:
            raise InvalidInputError("subspace dimension exceeds ambient dimension")
        if U.shape[1]:
            gram_err = np.max(np.abs(U.T @ U - np.eye(U.shape[1])))
            if gram_err > ORTHONORMAL_TOL:
                raise InvalidInputError(f"basis columns not orthonormal (err {gram_err:.2e})")
        U.setflags(write=False)
        object.__setattr__(self, "basis", U)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def trivial(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.zeros((ambient_dim, 0)))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


def numerical_rank(M, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Number of singular values above ``rel_tol * sigma_max`` (0 for the zero matrix)."""
    _check_tol(rel_tol)
    M = as_matrix(M)
    s = np.linalg.svd(M, compute_uv=False)
    return _rank_from_singular_values(s, rel_tol)


def orthonormal_basis(M, d: int, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """The ``d`` leading left singular vectors of ``M``.

    Raises RankDeficiencyError when ``d`` exceeds the numerical rank of ``M``.
    """
    _check_tol(rel_tol)
    M = as_matrix(M)
    if not 1 <= d <= min(M.shape):
        raise InvalidInputError(f"d={d} outside [1, {min(M.shape)}]")
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = _rank_from_singular_values(s, rel_tol)
    if d > rank:
        raise RankDeficiencyError(f"requested dimension {d} exceeds numerical rank {rank}")
    return SubspaceBasis(_fix_signs(U[:, :d]))


def span_basis(M, rel_tol: float = DEFAULT_REL_TOL) -> SubspaceBasis:
    """Basis of the column space of ``M`` truncated at its numerical rank.

    Unlike :func:`orthonormal_basis` this never fails: a numerically zero
    matrix (or one with no columns) gives the trivial subspace.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidInputError("span_basis expects a 2-D array")
    if M.shape[1] == 0:
        return SubspaceBasis.trivial(M.shape[0])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = _rank_from_singular_values(s, rel_tol)
    return SubspaceBasis(_fix_signs(U[:, :rank]))


def _check_rows(basis: SubspaceBasis, M: np.ndarray) -> np.ndarray:
    M = as_matrix(M)
    if M.shape[0] != basis.ambient_dim:
        raise InvalidInputError(
            f"row count {M.shape[0]} does not match ambient dimension {basis.ambient_dim}"
        )
    return M


def project(basis: SubspaceBasis, M) -> np.ndarray:
    """Orthogonal projection ``U (U^T M)`` onto the subspace."""
    M = _check_rows(basis, M)
    U = basis.basis
    return U @ (U.T @ M)


def complement_project(basis: SubspaceBasis, M) -> np.ndarray:
    """Projection onto the orthogonal complement, ``M - U (U^T M)``."""
    M = _check_rows(basis, M)
    U = basis.basis
    return M - U @ (U.T @ M)


def least_squares(B, Y, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Minimum Frobenius-norm minimiser of ``||Y - B X||_F``.

    Uses a truncated-SVD pseudo-inverse with the same relative cutoff as
    :func:`numerical_rank`, so rank-deficient ``B`` is handled.
    """
    B = as_matrix(B, "B")
    Y = as_matrix(Y, "Y")
    if B.shape[0] != Y.shape[0]:
        raise InvalidInputError(f"B has {B.shape[0]} rows but Y has {Y.shape[0]}")
    U, s, Vt = np.linalg.svd(B, full_matrices=False)
    rank = _rank_from_singular_values(s, rel_tol)
    U, s, Vt = U[:, :rank], s[:rank], Vt[:rank]
    return Vt.T @ ((U.T @ Y) / s[:, None])
