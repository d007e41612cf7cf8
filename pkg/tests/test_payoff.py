import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _shared import admissible
from varigame.exceptions import ConfigurationError, GridMismatchError
from varigame.grid import SampledFn, TimeGrid, integrate, quadratic, small_a_optimum
from varigame.kernel import linearized
from varigame.payoff import GameConfig, PayoffMatrix, expected_payoff, payoff, payoff_matrix

GRID = TimeGrid()
coeffs = st.lists(st.floats(-3, 3), min_size=1, max_size=5)


def test_game_config_validation():
    assert GameConfig(1.0, "sin3").kernel.name == "sin3"
    with pytest.raises(ConfigurationError):
        GameConfig(-1.0)
    with pytest.raises(ConfigurationError):
        GameConfig(1.0, quadrature="simpson")
    with pytest.raises(ConfigurationError):
        GameConfig(1.0, "cos")
    assert GameConfig(2.0).echo()["dt"] == 1e-4


def test_payoff_against_itself_is_zero():
    f = quadratic(GRID, 1.7)
    assert payoff(f, f, GameConfig(3.0)) == 0.0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
def test_linearized_closed_form(a):
    grid = TimeGrid(100_000)
    cfg = GameConfig(a, linearized(), grid=grid)
    val = payoff(small_a_optimum(a, grid), SampledFn.zero(grid), cfg)
    assert abs(val + a * a / 12) <= 1e-8


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
def test_linearized_trapezoid_error_is_exact(a):
    # the integrand is quadratic in t, so the trapezoid error is a^2 dt^2 / 12
    cfg = GameConfig(a, linearized())
    val = payoff(small_a_optimum(a, GRID), SampledFn.zero(GRID), cfg)
    assert abs(val - (-a * a / 12 + a * a * GRID.dt ** 2 / 12)) <= 1e-13


def test_sin_kernel_near_closed_form_at_a1():
    val = payoff(small_a_optimum(1, GRID), SampledFn.zero(GRID), GameConfig(1.0))
    assert abs(val + 1 / 12) <= 2e-3


def test_grid_mismatch():
    with pytest.raises(GridMismatchError):
        payoff(quadratic(TimeGrid(10), 1), quadratic(TimeGrid(20), 1), GameConfig(1))
    f = quadratic(TimeGrid(10), 1)
    with pytest.raises(GridMismatchError):
        payoff(f, f, GameConfig(1))


@given(coeffs, coeffs, st.floats(0, 200))
def test_antisymmetry_before_symmetrization(cf, cg, a):
    f, g = admissible(cf), admissible(cg)
    cfg = GameConfig(a)
    s = payoff(f, g, cfg)
    assert abs(s + payoff(g, f, cfg)) <= 1e-10 * (1 + abs(s))


@given(coeffs, coeffs)
def test_zero_coupling_is_kinetic_difference(cf, cg):
    f, g = admissible(cf), admissible(cg)
    kin = integrate(f.slope() ** 2) - integrate(g.slope() ** 2)
    assert abs(payoff(f, g, GameConfig(0.0)) - kin) <= 1e-12 * (1 + abs(kin))


@given(coeffs, coeffs, st.floats(0, 50), st.floats(0, 50), st.floats(0, 50))
def test_payoff_is_affine_in_a(cf, cg, a1, a2, a):
    f, g = admissible(cf), admissible(cg)
    s1, s2 = payoff(f, g, GameConfig(a1)), payoff(f, g, GameConfig(a2))
    s = payoff(f, g, GameConfig(a))
    if abs(a2 - a1) < 1e-3:
        return
    interp = s1 + (s2 - s1) * (a - a1) / (a2 - a1)
    assert abs(s - interp) <= 1e-10 * (1 + abs(s) + abs(s1) + abs(s2)) * (1 + abs(a - a1) / abs(a2 - a1))


def test_payoff_matrix_orientation_and_symmetry():
    cfg = GameConfig(10.0)
    fs = [quadratic(GRID, c) for c in (0.5, -1.0, 2.0)]
    M = payoff_matrix(fs, cfg)
    E = M.entries
    assert np.array_equal(E, -E.T)
    assert np.all(np.diag(E) == 0.0)
    # entries[i, j] = S(strategy j, strategy i)
    assert abs(E[0, 1] - payoff(fs[1], fs[0], cfg)) <= 1e-10
    assert abs(E[1, 0] - payoff(fs[0], fs[1], cfg)) <= 1e-10
    assert payoff_matrix(fs[:1], cfg).entries.tolist() == [[0.0]]
    with pytest.raises(ValueError):
        payoff_matrix([], cfg)


def test_payoff_matrix_serialization(tmp_path):
    M = payoff_matrix([quadratic(GRID, c) for c in (1.0, 2.0)], GameConfig(5.0))
    M.to_csv(tmp_path / "m.csv")
    assert np.array_equal(PayoffMatrix.from_csv(tmp_path / "m.csv").entries, M.entries)
    doc = json.loads(M.to_json())
    assert doc["schema_version"] == 1 and doc["strategies"] == [0, 1]
    assert doc["entries"] == M.entries.ravel().tolist()


def test_expected_payoff_is_weighted_sum():
    cfg = GameConfig(3.0)
    f = quadratic(GRID, 0.7)
    gs = [quadratic(GRID, c) for c in (0.0, 1.0)]
    want = 0.25 * payoff(f, gs[0], cfg) + 0.75 * payoff(f, gs[1], cfg)
    assert abs(expected_payoff(f, gs, [0.25, 0.75], cfg) - want) <= 1e-14
