import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from varigame.exceptions import LPError
from varigame.matrix_game import (MixedStrategy, cycle_solution, expected_payoffs, simplex_max,
                                  solve_symmetric_game)

PAPER_M = np.array([[0, 34.994, -62.147], [-34.994, 0, 32.740], [62.147, -32.740, 0]])


def random_antisym(seed, n):
    a = np.random.default_rng(seed).normal(size=(n, n))
    return a - a.T


def test_paper_matrix():
    p = solve_symmetric_game(PAPER_M)
    assert np.allclose(p.probabilities, [0.252, 0.478, 0.269], atol=2e-3)
    assert np.all(expected_payoffs(PAPER_M, p) <= 1e-8)
    assert np.allclose(cycle_solution(PAPER_M).probabilities, p.probabilities, atol=1e-6)


def test_uniform_mixture_payoffs():
    e = expected_payoffs(PAPER_M, np.full(3, 1 / 3))
    assert np.allclose(e, [-9.051, -0.751, 9.802], atol=1e-3)


def test_trivial_games():
    assert solve_symmetric_game([[0.0]]).tolist() == [1.0]
    rps = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], dtype=float)
    assert np.allclose(solve_symmetric_game(rps).probabilities, 1 / 3, atol=1e-9)
    assert np.all(expected_payoffs(np.zeros((4, 4)), np.full(4, 0.25)) == 0.0)


def test_dominant_strategy_is_pure():
    # column 1 pays every opponent a negative amount
    M = np.array([[0, -1, -2], [1, 0, 0.5], [2, -0.5, 0]])
    assert solve_symmetric_game(M).tolist() == [0.0, 1.0, 0.0]


def test_rejects_non_antisymmetric():
    with pytest.raises(LPError, match="antisymmetric"):
        solve_symmetric_game([[0, 1], [1, 0]])
    with pytest.raises(LPError):
        solve_symmetric_game(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        expected_payoffs(np.zeros((2, 2)), [1.0])


def test_mixed_strategy_validation():
    with pytest.raises(ValueError):
        MixedStrategy([0.5, 0.6])
    with pytest.raises(ValueError):
        MixedStrategy([1.1, -0.1])
    p = MixedStrategy([1.0 - 1e-12, 1e-12 - 1e-13])
    assert p.support().tolist() == [0]


def test_simplex_against_linprog():
    rng = np.random.default_rng(1)
    for _ in range(20):
        A = rng.uniform(0.1, 2.0, size=(4, 5))
        b = rng.uniform(0.5, 2.0, size=4)
        c = rng.uniform(-1.0, 2.0, size=5)
        x, val, _ = simplex_max(c, A, b)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        assert abs(val + ref.fun) <= 1e-9 * (1 + abs(ref.fun))
        assert np.all(A @ x <= b + 1e-9)


def test_simplex_unbounded_and_cap():
    with pytest.raises(LPError, match="unbounded"):
        simplex_max([1.0], [[-1.0]], [1.0])
    with pytest.raises(LPError, match="within 0 pivots"):
        simplex_max([1.0], [[1.0]], [1.0], max_iter=0)


@given(st.integers(0, 2**31), st.integers(1, 8))
def test_complementary_slackness(seed, n):
    M = random_antisym(seed, n)
    p = solve_symmetric_game(M)
    e = expected_payoffs(M, p)
    on = p.probabilities > 1e-6
    assert np.all(e <= 1e-6)
    assert np.all(np.abs(e[on]) <= 1e-6)
    assert abs(p.probabilities.sum() - 1) <= 1e-10


@given(st.integers(0, 2**31), st.integers(2, 7))
def test_value_matches_linprog(seed, n):
    M = random_antisym(seed, n)
    p = solve_symmetric_game(M)
    # best reply value of the LP mixture equals the game value 0
    assert abs(expected_payoffs(M, p).max()) <= 1e-8
    ref = linprog(np.r_[np.zeros(n), 1.0], A_ub=np.c_[M, -np.ones(n)], b_ub=np.zeros(n),
                  A_eq=np.r_[np.ones(n), 0.0][None], b_eq=[1.0],
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    assert abs(ref.fun) <= 1e-8


@given(st.integers(0, 2**31), st.integers(2, 7))
def test_permutation_equivariance(seed, n):
    M = random_antisym(seed, n)
    perm = np.random.default_rng(seed + 1).permutation(n)
    p = solve_symmetric_game(M).probabilities
    q = solve_symmetric_game(M[np.ix_(perm, perm)]).probabilities
    # generic random games have a unique equilibrium
    assert np.allclose(q, p[perm], atol=1e-8)


def test_deterministic():
    M = random_antisym(7, 6)
    assert solve_symmetric_game(M).tolist() == solve_symmetric_game(M.copy()).tolist()


def test_cycle_solution_requires_cycle():
    with pytest.raises(ValueError):
        cycle_solution(np.array([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]], dtype=float))


@given(st.integers(0, 2**31), st.integers(4, 30), st.floats(0.0, 3.0))
def test_near_duplicate_strategies_stay_exact(seed, n, log_scale):
    # double-oracle matrices hold several near-copies of one function and
    # entries in the thousands; the LP must stay accurate on them
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) * 10 ** log_scale
    a[:, 1] = a[:, 0] + 1e-9 * rng.normal(size=n)
    a[1, :] = a[0, :] + 1e-9 * rng.normal(size=n)
    a[:, 3], a[3, :] = a[:, 2], a[2, :]
    M = a - a.T
    p = solve_symmetric_game(M, support_tol=0.0)
    assert expected_payoffs(M, p).max() <= 1e-8
