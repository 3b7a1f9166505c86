import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import distance_ranking, exhaustive_support, gaussian_instance, normal_equations
from ssmusic.errors import DegenerateStateError, InvalidInputError
from ssmusic.harness import EnsembleSpec, generate_problem
from ssmusic.linalg import numerical_rank, span_basis
from ssmusic.model import JsrProblem, fitness_of_support
from ssmusic.solver import (
    SsMusicConfig,
    augmented_classify,
    candidate_step,
    music,
    refine_training_set,
    signal_basis_of,
    ss_music,
)


def test_music_on_standard_basis():
    A = np.eye(3)
    Y = np.column_stack([2 * A[:, 0], 5 * A[:, 1]])
    res = music(JsrProblem(A, Y, 2), r=2)
    assert res.support == (0, 1)
    assert res.iterations == 1 and res.converged


def test_music_full_rank_matches_exhaustive_oracle():
    spec = EnsembleSpec(m=6, K=2, N=3, n=8, trials=20, master_seed=11)
    for t in range(20):
        p = generate_problem(spec, t)
        best, val, second = exhaustive_support(p.A, p.Y, p.K)
        assert second > 1e-8  # oracle minimum is unique
        assert music(p, r=2).support == best


def test_music_rank_error():
    p = generate_problem(EnsembleSpec(m=6, K=3, N=1, n=8), 0)
    with pytest.raises(InvalidInputError):
        music(p, r=2)


def test_music_fails_when_rank_defective():
    spec = EnsembleSpec(m=10, K=4, N=1, n=20, trials=100, master_seed=5)
    hits = sum(music(generate_problem(spec, t), r=1).support == generate_problem(spec, t).true_support
               for t in range(100))
    assert hits < 10


def test_candidate_step_from_empty_positive_set():
    p = generate_problem(EnsembleSpec(m=6, K=3, N=2, n=8), 3)
    cand = candidate_step(p, (), 2)
    assert len(cand) == 1
    assert list(cand) == distance_ranking(p.A, p.Y, range(8))[:1]


def test_candidate_step_degenerate_at_true_support():
    p = generate_problem(EnsembleSpec(m=6, K=3, N=2, n=8), 3)
    with pytest.raises(DegenerateStateError):
        candidate_step(p, p.true_support, 2)


def test_candidate_step_ranks_like_brute_force():
    spec = EnsembleSpec(m=6, K=3, N=2, n=8, master_seed=2)
    for t in range(10):
        p = generate_problem(spec, t)
        forced = (p.true_support[0],)
        A_f = p.A[:, list(forced)]
        P = A_f @ np.linalg.solve(A_f.T @ A_f, A_f.T)
        Y_res = p.Y - P @ p.Y
        negatives = [i for i in range(8) if i not in forced]
        expected = distance_ranking(p.A, Y_res, negatives)[:1]
        assert candidate_step(p, forced, 2) == forced + tuple(expected)


def test_candidate_step_needs_rank_defect():
    p = generate_problem(EnsembleSpec(m=6, K=2, N=3, n=8), 0)
    with pytest.raises(InvalidInputError):
        candidate_step(p, (), 2)


def test_refine_keeps_everything_when_nothing_to_drop(rng):
    p = generate_problem(EnsembleSpec(m=6, K=3, N=2, n=8), 1)
    assert refine_training_set(p, (5, 2, 7), 3) == (5, 2, 7)


def test_refine_with_orthonormal_atoms():
    A = np.eye(6)
    X = np.zeros((6, 2))
    X[[0, 2, 3, 5]] = [[1.0, 2.0], [3.0, -1.0], [0.5, 0.5], [-2.0, 1.0]]
    p = JsrProblem(A, A @ X, 4)
    kept = refine_training_set(p, (0, 1, 2, 3, 4, 5), 4)
    assert sorted(kept) == [0, 2, 3, 5]


def test_refine_ranking_matches_normal_equations(rng):
    for _ in range(10):
        A, Y, _ = gaussian_instance(rng, 8, 12, 3, 2)
        p = JsrProblem(A, Y, 3)
        cands = tuple(int(i) for i in rng.choice(12, 5, replace=False))
        Xh = normal_equations(p.A[:, list(cands)], p.Y)
        order = np.argsort(-np.linalg.norm(Xh, axis=1))
        assert set(refine_training_set(p, cands, 2)) == {cands[i] for i in order[:2]}


def test_ss_music_full_rank_reduces_to_music():
    spec = EnsembleSpec(m=11, K=10, N=20, master_seed=4)
    for t in range(5):
        p = generate_problem(spec, t)
        res = ss_music(p)
        assert res.converged and res.iterations == 1
        assert res.support == p.true_support == music(p).support


def test_ss_music_tiny_matches_exhaustive_oracle():
    spec = EnsembleSpec(m=6, K=3, N=2, n=8, master_seed=9)
    converged = 0
    for t in range(30):
        p = generate_problem(spec, t)
        res = ss_music(p)
        if res.converged:
            converged += 1
            assert res.support == exhaustive_support(p.A, p.Y, p.K)[0]
    assert converged >= 25


def test_ss_music_rank_defective_paper_setting():
    spec = EnsembleSpec(m=40, K=30, N=20, trials=20, master_seed=1)
    for t in range(20):
        p = generate_problem(spec, t)
        res = ss_music(p)
        assert res.converged and res.support == p.true_support
        assert res.iterations <= 2


def test_result_bookkeeping():
    p = generate_problem(EnsembleSpec(m=35, K=30, N=20), 0)
    res = ss_music(p)
    assert len(res.fitness_trace) == res.iterations
    assert res.final_fitness == res.fitness_trace[-1]
    assert res.converged == (fitness_of_support(p, res.support) <= 1e-8 * np.sum(p.Y**2))


def test_non_convergence_is_reported_not_raised():
    # m < K: no K-support can be certified unique, MUSIC-type classification stalls
    p = generate_problem(EnsembleSpec(m=12, K=20, N=5), 0)
    res = ss_music(p, SsMusicConfig(t_max=7))
    assert res.iterations <= 7
    assert len(res.fitness_trace) == res.iterations
    assert len(res.support) == 20


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SsMusicConfig(t_max=0)
    with pytest.raises(InvalidInputError):
        SsMusicConfig(epsilon=-1.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), m=st.integers(24, 40), K=st.integers(12, 22), N=st.integers(2, 10))
def test_per_iteration_invariants(seed, m, K, N):
    p = generate_problem(EnsembleSpec(m=m, K=K, N=N, n=60, master_seed=seed), 0)
    r = numerical_rank(p.Y)
    U = signal_basis_of(p)[1]
    seen = []

    def check(t, training, labels):
        assert labels.sum() == K
        assert all(labels[i] == 1 for i in training)
        dim = span_basis(np.hstack([U.basis, p.A[:, list(training)]])).dim if training else r
        assert dim <= K
        seen.append(t)

    res = ss_music(p, SsMusicConfig(t_max=30), on_iteration=check)
    assert res.iterations <= 30
    assert len(res.support) == K
    if res.converged:
        assert fitness_of_support(p, res.support) <= 1e-8 * np.sum(p.Y**2)


def test_injected_training_set_gives_exact_classification():
    # with the K - r missing atoms supplied, the augmented classifier is exact
    spec = EnsembleSpec(m=20, K=12, N=4, n=50, master_seed=8)
    for t in range(10):
        p = generate_problem(spec, t)
        r, U = signal_basis_of(p)
        training = p.true_support[: p.K - r]
        labels = augmented_classify(p, U, training, 1e-10)
        assert tuple(np.flatnonzero(labels)) == p.true_support
