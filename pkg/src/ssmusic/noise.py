"""Signal rank and subspace estimation for noisy MMVs, and the noisy SS-MUSIC driver."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InvalidInputError, NoSignalError
from .linalg import DEFAULT_REL_TOL, SubspaceBasis, as_matrix, orthonormal_basis
from .model import JsrProblem
from .solver import SolveResult, SsMusicConfig, ss_music

NOISE_TAU = 2.0
NOISE_EPSILON_FACTOR = 1.5


@dataclass(frozen=True)
class NoisyEstimate:
    rank_estimate: int
    signal_basis: SubspaceBasis
    singular_values: tuple[float, ...]


def estimate_rank(s: np.ndarray, shape: tuple[int, int], noise_sigma: Optional[float],
                  tau: float = NOISE_TAU, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Signal rank from descending singular values ``s`` of an m x N matrix.

    With a known per-entry noise level: count values above
    ``tau * sigma * sqrt(max(m, N))`` (never below the noiseless relative
    cutoff).  Without one: position of the largest ratio between consecutive
    singular values, where a trailing zero counts as an infinite gap.
    """
    if s.size == 0 or s[0] == 0.0:
        return 0
    floor = rel_tol * s[0]
    if noise_sigma is not None:
        floor = max(floor, tau * noise_sigma * np.sqrt(max(shape)))
        return int(np.count_nonzero(s > floor))
    above = int(np.count_nonzero(s > floor))
    if above < s.size or s.size == 1 or shape[0] > shape[1]:
        # an exact (numerical) zero closes the signal block; when m > N the
        # full left spectrum carries m - N zeros after the last column
        return above
    return int(np.argmax(s[:-1] / s[1:])) + 1


def estimate_signal_subspace(y_noisy, noise_sigma: Optional[float] = None,
                             tau: float = NOISE_TAU,
                             rel_tol: float = DEFAULT_REL_TOL) -> NoisyEstimate:
    """Rank estimate plus the matching leading left singular basis of ``y_noisy``."""
    Y = as_matrix(y_noisy, "Y")
    if noise_sigma is not None and noise_sigma < 0:
        raise InvalidInputError("noise_sigma must be nonnegative")
    s = np.linalg.svd(Y, compute_uv=False)
    if s[0] == 0.0:
        raise InvalidInputError("Y is the zero matrix")
    r = estimate_rank(s, Y.shape, noise_sigma, tau, rel_tol)
    if r == 0:
        raise NoSignalError("no singular value exceeds the noise threshold")
    return NoisyEstimate(r, orthonormal_basis(Y, r, rel_tol), tuple(float(v) for v in s))


def noisy_epsilon(problem: JsrProblem, noise_sigma: Optional[float], cfg: SsMusicConfig,
                  factor: float = NOISE_EPSILON_FACTOR) -> float:
    """Fitness threshold for noisy data: ``factor * m * N * sigma^2``, floored at the noiseless rule."""
    base = cfg.threshold(problem.Y)
    if noise_sigma is None:
        return base
    return max(base, factor * problem.m * problem.N * noise_sigma**2)


def ss_music_noisy(problem: JsrProblem, cfg: Optional[SsMusicConfig] = None,
                   noise_sigma: Optional[float] = None,
                   epsilon_factor: float = NOISE_EPSILON_FACTOR) -> SolveResult:
    """SS-MUSIC driven by an estimated signal rank and subspace."""
    cfg = cfg or SsMusicConfig()
    est = estimate_signal_subspace(problem.Y, noise_sigma, rel_tol=cfg.rel_tol)
    eps = noisy_epsilon(problem, noise_sigma, cfg, epsilon_factor)
    run_cfg = replace(cfg, epsilon=eps, rank_override=est.rank_estimate)
    return ss_music(problem, run_cfg, signal_basis=est.signal_basis)
