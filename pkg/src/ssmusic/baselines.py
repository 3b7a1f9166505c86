"""Comparison algorithms: SOMP, SCoSaMP, RA-ORMP, SA-MUSIC and fixed-size iMUSIC.

All of them return a :class:`~ssmusic.solver.SolveResult` with exactly K
atoms and break ties towards the lowest atom index.  ``fitness_trace`` holds
one residual energy per counted iteration.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import SubspaceBasis, complement_project, least_squares, span_basis
from .model import JsrProblem, fitness, fitness_of_support, labels_of, rank_by_distance, support_of
from .solver import SolveResult, SsMusicConfig, augmented_basis, augmented_classify, signal_basis_of

ZERO_ATOM_TOL = 1e-10


def _residual(problem: JsrProblem, support: Sequence[int], rel_tol: float) -> np.ndarray:
    if not len(support):
        return problem.Y.copy()
    cols = list(support)
    X = least_squares(problem.A[:, cols], problem.Y, rel_tol)
    return problem.Y - problem.A[:, cols] @ X


def _argmax_excluding(scores: np.ndarray, excluded: Sequence[int]) -> int:
    allowed = np.ones(scores.size, dtype=bool)
    allowed[list(excluded)] = False
    idx = np.flatnonzero(allowed)
    # ties, including an all -inf row once the atoms span R^m, go to the lowest index
    return int(idx[np.argmax(scores[idx])])


def somp_select(problem: JsrProblem, steps: int, rel_tol: float = 1e-10) -> tuple[list[int], list[float]]:
    """``steps`` rounds of simultaneous OMP; returns picks and residual energies."""
    selected: list[int] = []
    energies: list[float] = []
    R = problem.Y.copy()
    for _ in range(steps):
        scores = np.linalg.norm(problem.A.T @ R, axis=1)
        selected.append(_argmax_excluding(scores, selected))
        R = _residual(problem, selected, rel_tol)
        energies.append(float(np.sum(R**2)))
    return selected, energies


def somp(problem: JsrProblem, cfg: Optional[SsMusicConfig] = None) -> SolveResult:
    """Simultaneous orthogonal matching pursuit, K greedy picks with least-squares refits."""
    cfg = cfg or SsMusicConfig()
    selected, energies = somp_select(problem, problem.K, cfg.rel_tol)
    final = energies[-1]
    return SolveResult(tuple(sorted(selected)), problem.K, energies, final <= cfg.threshold(problem.Y), final)


def scosamp(problem: JsrProblem, t_max: int = 100, cfg: Optional[SsMusicConfig] = None) -> SolveResult:
    """Simultaneous CoSaMP with row-norm proxies.

    Each iteration merges the current support with the 2K atoms most
    correlated with the residual, fits, prunes back to the K heaviest rows
    and refits.  Stops on convergence, on a repeated support, or when the
    residual would grow (the previous support is then kept, so residual
    energies never increase).
    """
    cfg = cfg or SsMusicConfig()
    A, Y, K, n = problem.A, problem.Y, problem.K, problem.n
    eps = cfg.threshold(Y)
    support: tuple[int, ...] = ()
    R = Y.copy()
    energy = float(np.sum(Y**2))
    trace: list[float] = []
    t = 0
    while energy > eps and t < t_max:
        proxy = np.linalg.norm(A.T @ R, axis=1)
        omega = np.argsort(-proxy, kind="stable")[: min(2 * K, n)]
        merged = np.array(sorted(set(support) | {int(i) for i in omega}))
        B = least_squares(A[:, merged], Y, cfg.rel_tol)
        keep = np.argsort(-np.linalg.norm(B, axis=1), kind="stable")[:K]
        new_support = tuple(sorted(int(i) for i in merged[keep]))
        new_R = _residual(problem, new_support, cfg.rel_tol)
        new_energy = float(np.sum(new_R**2))
        t += 1
        if support and new_energy > energy:
            trace.append(energy)
            break
        done = new_support == support
        support, R, energy = new_support, new_R, new_energy
        trace.append(energy)
        if done:
            break
    return SolveResult(support, t, trace, energy <= eps, energy)


def rank_aware_select(
    problem: JsrProblem,
    U: SubspaceBasis,
    steps: int,
    rel_tol: float = 1e-10,
    start: Sequence[int] = (),
) -> tuple[list[int], list[float]]:
    """Greedy picks maximising ``||P_R a~|| / ||a~||``.

    ``a~`` is the atom with the selected atoms projected out and ``R`` the
    signal subspace after the same deflation, truncated to at most
    ``K - len(selected)`` directions (this only bites on noisy data).  Atoms
    whose deflated norm is numerically zero are skipped.
    """
    selected = list(start)
    energies: list[float] = []
    A = problem.A
    for _ in range(steps):
        if selected:
            P = span_basis(A[:, selected], rel_tol)
            A_res = complement_project(P, A)
            R_basis = span_basis(complement_project(P, U.basis), rel_tol)
            # the deflated signal block cannot exceed the atoms still missing
            cap = max(problem.K - len(selected), 0)
            if R_basis.dim > cap:
                R_basis = SubspaceBasis(R_basis.basis[:, :cap])
        else:
            A_res, R_basis = A, U
        norms = np.linalg.norm(A_res, axis=0)
        scores = np.linalg.norm(R_basis.basis.T @ A_res, axis=0) / np.where(norms > 0, norms, 1.0)
        scores[norms <= ZERO_ATOM_TOL] = -np.inf
        selected.append(_argmax_excluding(scores, selected))
        energies.append(fitness_of_support(problem, selected, rel_tol))
    return selected, energies


def ra_ormp(problem: JsrProblem, r: Optional[int] = None, cfg: Optional[SsMusicConfig] = None) -> SolveResult:
    """Rank-aware order-recursive matching pursuit (K picks)."""
    cfg = cfg or SsMusicConfig()
    _, U = signal_basis_of(problem, r, cfg.rel_tol)
    selected, energies = rank_aware_select(problem, U, problem.K, cfg.rel_tol)
    final = energies[-1]
    return SolveResult(tuple(sorted(selected)), problem.K, energies, final <= cfg.threshold(problem.Y), final)


def sa_music(
    problem: JsrProblem,
    r: Optional[int] = None,
    cfg: Optional[SsMusicConfig] = None,
    stage1: Optional[Callable[[JsrProblem, SubspaceBasis, int], Sequence[int]]] = None,
) -> SolveResult:
    """Subspace-augmented MUSIC.

    Stage 1 picks K - r atoms greedily (rank-aware selection by default,
    or ``stage1(problem, U, K - r)`` when supplied); stage 2 runs MUSIC on
    the signal subspace augmented with those atoms.  Iterations = K - r.
    """
    cfg = cfg or SsMusicConfig()
    r, U = signal_basis_of(problem, r, cfg.rel_tol)
    r = min(r, problem.K)
    U = SubspaceBasis(U.basis[:, :r])
    k1 = problem.K - r
    if stage1 is not None:
        partial = [int(i) for i in stage1(problem, U, k1)]
        energies = [fitness_of_support(problem, partial[: j + 1], cfg.rel_tol) for j in range(k1)]
    else:
        partial, energies = rank_aware_select(problem, U, k1, cfg.rel_tol)
    labels = augmented_classify(problem, U, partial, cfg.rel_tol)
    final = fitness(labels, problem, cfg.rel_tol)
    return SolveResult(support_of(labels), k1, energies, final <= cfg.threshold(problem.Y), final)


def imusic(problem: JsrProblem, cfg: Optional[SsMusicConfig] = None) -> SolveResult:
    """iMUSIC with a fixed refinement size of K - r.

    K - r rounds of SOMP seed the training set, MUSIC on the augmented
    subspace gives the first labels, then each refinement round takes the
    K - r negatives nearest span(signal basis + training set), fits ``Y`` on
    them plus the current positives and relabels with the K heaviest rows
    directly (the K - r heaviest become the next training set).  Iterations
    count the SOMP rounds plus refinement rounds, capped at ``t_max``.
    """
    cfg = cfg or SsMusicConfig()
    K, n = problem.K, problem.n
    r, U = signal_basis_of(problem, cfg.rank_override, cfg.rel_tol)
    r = min(r, K)
    U = SubspaceBasis(U.basis[:, :r])
    eps = cfg.threshold(problem.Y)
    k1 = K - r

    seed, trace = somp_select(problem, min(k1, cfg.t_max), cfg.rel_tol)
    training: tuple[int, ...] = tuple(seed)
    labels = augmented_classify(problem, U, training, cfg.rel_tol)
    current = fitness(labels, problem, cfg.rel_tol)
    t = len(seed)
    while current > eps and t < cfg.t_max:
        basis = augmented_basis(problem, U, training, cfg.rel_tol)
        positives = support_of(labels)
        taken = set(positives)
        negatives = [i for i in range(n) if i not in taken]
        nearest = rank_by_distance(problem.A, negatives, basis)[:k1]
        candidates = np.array(sorted(positives + tuple(int(i) for i in nearest)))
        X_hat = least_squares(problem.A[:, candidates], problem.Y, cfg.rel_tol)
        order = candidates[np.argsort(-np.linalg.norm(X_hat, axis=1), kind="stable")]
        new_labels = labels_of(order[:K], n)
        new_training = tuple(int(i) for i in order[:k1])
        t += 1
        current = fitness(new_labels, problem, cfg.rel_tol)
        trace.append(current)
        if np.array_equal(new_labels, labels) and new_training == training and current > eps:
            trace.extend([current] * (cfg.t_max - t))
            t = cfg.t_max
        labels, training = new_labels, new_training
    return SolveResult(support_of(labels), t, trace, current <= eps, current)
