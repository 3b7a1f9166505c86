"""MUSIC and semi-supervised MUSIC.

MUSIC ranks atoms by their distance to the signal subspace of ``Y``; that
works when ``rank(Y) == K`` and fails once the MMVs are rank defective.
SS-MUSIC repairs the rank defect by recruiting ``K - r`` atoms as extra
(pseudo-labelled) training samples: each iteration it

1. projects the signal subspace away from the current positive atoms,
2. picks the ``K - r`` negative atoms nearest that residual subspace,
3. keeps the ``K - r`` candidates carrying the most least-squares energy,
4. reclassifies every atom against span(signal basis + kept atoms).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateStateError, InvalidInputError
from .linalg import (
    DEFAULT_REL_TOL,
    SubspaceBasis,
    complement_project,
    least_squares,
    numerical_rank,
    orthonormal_basis,
    span_basis,
)
from .model import (
    DEFAULT_REL_EPSILON,
    JsrProblem,
    convergence_threshold,
    fitness,
    nsc_classify,
    rank_by_distance,
    support_of,
)

DEGENERATE_TOL = 1e-12


@dataclass
class SsMusicConfig:
    """Solver settings.

    ``epsilon`` is an absolute fitness threshold; when ``None`` the
    threshold is ``rel_epsilon * ||Y||_F^2``.
    """

    epsilon: Optional[float] = None
    rel_epsilon: float = DEFAULT_REL_EPSILON
    t_max: int = 100
    rank_override: Optional[int] = None
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon < 0:
            raise InvalidInputError("epsilon must be nonnegative")
        if self.rel_epsilon < 0:
            raise InvalidInputError("rel_epsilon must be nonnegative")
        if self.t_max < 1:
            raise InvalidInputError("t_max must be at least 1")
        if self.rank_override is not None and self.rank_override < 1:
            raise InvalidInputError("rank_override must be positive")

    def threshold(self, Y: np.ndarray) -> float:
        return convergence_threshold(Y, self.epsilon, self.rel_epsilon)


@dataclass
class SolveResult:
    support: tuple[int, ...]
    iterations: int
    fitness_trace: list[float] = field(default_factory=list)
    converged: bool = False
    final_fitness: float = float("nan")


def signal_basis_of(problem: JsrProblem, r: Optional[int] = None, rel_tol: float = DEFAULT_REL_TOL):
    """Rank and leading-``r`` left singular basis of ``Y``."""
    if r is None:
        r = numerical_rank(problem.Y, rel_tol)
    if r < 1:
        raise InvalidInputError("Y is numerically zero")
    return r, orthonormal_basis(problem.Y, r, rel_tol)


def music(problem: JsrProblem, r: Optional[int] = None, cfg: Optional[SsMusicConfig] = None) -> SolveResult:
    """Plain MUSIC: the K atoms nearest the r-dimensional signal subspace."""
    cfg = cfg or SsMusicConfig()
    if r is not None and not 1 <= r <= min(problem.m, problem.N):
        raise InvalidInputError(f"r={r} outside [1, min(m, N)]")
    r, U = signal_basis_of(problem, r, cfg.rel_tol)
    labels = nsc_classify(problem.A, range(problem.n), U, problem.K)
    f = fitness(labels, problem, cfg.rel_tol)
    return SolveResult(support_of(labels), 1, [f], f <= cfg.threshold(problem.Y), f)


def candidate_step(
    problem: JsrProblem,
    current_positive: Sequence[int],
    r: int,
    signal_basis: Optional[SubspaceBasis] = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> tuple[int, ...]:
    """Current positives followed by the K - r negatives nearest the residual subspace.

    The residual subspace is the span of ``Y`` (or of ``signal_basis`` when
    given) after projecting out the current positive atoms.
    """
    K = problem.K
    if K - r < 1:
        raise InvalidInputError("candidate step needs K - r >= 1")
    current = tuple(int(i) for i in current_positive)
    source = problem.Y if signal_basis is None else signal_basis.basis
    if current:
        Y_res = complement_project(span_basis(problem.A[:, list(current)], rel_tol), source)
    else:
        Y_res = source
    if np.linalg.norm(Y_res) <= DEGENERATE_TOL * np.linalg.norm(source):
        raise DegenerateStateError("residual signal subspace is numerically zero")
    res_basis = span_basis(Y_res, rel_tol)
    taken = set(current)
    negatives = [i for i in range(problem.n) if i not in taken]
    # a small dictionary may hold fewer than K - r negatives; take them all
    nearest = rank_by_distance(problem.A, negatives, res_basis)[: K - r]
    return current + tuple(int(i) for i in nearest)


def refine_training_set(
    problem: JsrProblem,
    candidates: Sequence[int],
    keep: int,
    rel_tol: float = DEFAULT_REL_TOL,
) -> tuple[int, ...]:
    """Keep the candidates whose least-squares coefficient rows are largest.

    Fits ``Y`` on the candidate atoms with the pseudo-inverse and returns the
    ``keep`` atoms with the largest row l2-norms, strongest first.
    """
    candidates = np.asarray(candidates, dtype=int)
    if not 0 <= keep <= candidates.size:
        raise InvalidInputError(f"keep={keep} outside [0, {candidates.size}]")
    if keep == candidates.size:
        return tuple(int(i) for i in candidates)
    order = np.argsort(candidates, kind="stable")
    candidates = candidates[order]
    X_hat = least_squares(problem.A[:, candidates], problem.Y, rel_tol)
    row_norms = np.linalg.norm(X_hat, axis=1)
    best = np.argsort(-row_norms, kind="stable")[:keep]
    return tuple(int(i) for i in candidates[best])


def augmented_basis(problem: JsrProblem, U: SubspaceBasis, training: Sequence[int], rel_tol: float) -> SubspaceBasis:
    if not len(training):
        return U
    return span_basis(np.hstack([U.basis, problem.A[:, list(training)]]), rel_tol)


def augmented_classify(problem: JsrProblem, U: SubspaceBasis, training: Sequence[int], rel_tol: float):
    """Classify all atoms against span(signal basis, training atoms), training atoms forced positive."""
    basis = augmented_basis(problem, U, training, rel_tol)
    return nsc_classify(problem.A, range(problem.n), basis, problem.K, training)


def ss_music(
    problem: JsrProblem,
    cfg: Optional[SsMusicConfig] = None,
    signal_basis: Optional[SubspaceBasis] = None,
    on_iteration=None,
) -> SolveResult:
    """Semi-supervised MUSIC.

    ``signal_basis`` replaces the exact signal subspace of ``Y`` (the noisy
    pipeline passes its estimate); its dimension is then the rank used.
    ``on_iteration(t, training_set, labels)`` is called after every loop
    body, which the tests use to check per-iteration invariants.

    A loop body is a deterministic function of the current labels, so once
    the labels stop changing the remaining bodies up to ``t_max`` are
    identical; they are fast-forwarded instead of recomputed.
    """
    cfg = cfg or SsMusicConfig()
    K, n = problem.K, problem.n
    if signal_basis is None:
        r, U = signal_basis_of(problem, cfg.rank_override, cfg.rel_tol)
    else:
        U = signal_basis
        r = U.dim
    if r > K:
        r = K
        U = SubspaceBasis(U.basis[:, :K])
    eps = cfg.threshold(problem.Y)

    labels = np.zeros(n, dtype=np.int8)
    current = fitness(labels, problem, cfg.rel_tol)
    trace: list[float] = []
    t = 0
    while current > eps and t < cfg.t_max:
        if K == r:
            training: tuple[int, ...] = ()
        else:
            candidates = candidate_step(problem, support_of(labels), r, U, cfg.rel_tol)
            training = refine_training_set(problem, candidates, K - r, cfg.rel_tol)
        new_labels = augmented_classify(problem, U, training, cfg.rel_tol)
        t += 1
        current = fitness(new_labels, problem, cfg.rel_tol)
        trace.append(current)
        if on_iteration is not None:
            on_iteration(t, training, new_labels)
        if np.array_equal(new_labels, labels) and current > eps:
            trace.extend([current] * (cfg.t_max - t))
            t = cfg.t_max
        labels = new_labels
    return SolveResult(support_of(labels), t, trace, current <= eps, current)
