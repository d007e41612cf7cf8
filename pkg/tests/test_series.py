import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from varigame import series
from varigame.exceptions import NoRootsError
from varigame.series import (TABLE1_A, percent_difference, recurrence, solve_k, table1_row)


def closed_forms(a, k):
    return {
        2: -a / 4,
        3: 0.0,
        4: a / 48 * k ** 2,
        5: -a ** 2 / 160 * k,
        6: a ** 3 / 1920,
        7: a ** 2 / 4032 * k ** 3,
        8: -11 * a ** 3 / 107520 * k ** 2,
        9: a ** 4 / 69120 * k,
        10: a ** 3 / 387072 * k ** 4 - a ** 5 / 1382400,
    }


@pytest.mark.parametrize("seed", range(5))
def test_recurrence_matches_closed_forms(seed):
    a, k = np.random.default_rng(seed).uniform(0.1, 5.0, size=2)
    b = recurrence(a, k, 10).coeffs
    assert b[0] == 0.0 and b[1] == k
    for n, want in closed_forms(a, k).items():
        assert abs(b[n] - want) <= 1e-12 * max(abs(want), 1e-300), n


@given(st.floats(0, 20), st.floats(-5, 5))
def test_low_coefficients(a, k):
    b = recurrence(a, k, 6).coeffs
    assert b[2] == -a / 4 and b[3] == 0.0


def test_recurrence_needs_two_terms():
    with pytest.raises(ValueError):
        recurrence(1.0, 0.5, 1)


def test_series_evaluation():
    s = recurrence(2.0, 0.7, 10)
    assert s(0.0) == 0.0
    assert abs(s(1.0) - s.coeffs.sum()) <= 1e-15
    assert abs(s(1.0, deriv=1) - s.slope_at_one) <= 1e-14


@pytest.mark.parametrize("a,lo,hi", [(0.5, 0.245, 0.253), (1.0, 0.487, 0.497)])
def test_solve_k_table_values(a, lo, hi):
    k = solve_k(a, 10)
    assert lo <= k <= hi
    assert abs(recurrence(a, k, 10).slope_at_one) <= 1e-9


def test_solve_k_small_a_limit():
    assert abs(solve_k(0.01) / 0.01 - 0.5) <= 0.01
    assert solve_k(0.0) == 0.0
    with pytest.raises(ValueError):
        solve_k(-1.0)


def test_solve_k_breakdown_is_reported(monkeypatch):
    # at large a the coefficients are huge and f'(1) cannot reach 1e-9
    with pytest.raises(NoRootsError, match="stalled"):
        solve_k(200.0, 10)
    monkeypatch.setattr(series, "recurrence",
                        lambda a, k, N: series.SeriesCoeffs(a, k, np.array([0.0, 1.0 + k])))
    with pytest.raises(NoRootsError, match="broken down"):
        series.solve_k(1.0)


def test_table_rows():
    r = table1_row(0.5)
    assert abs(r.series_f2 + 0.2481) <= 1e-3 and r.percent_difference <= 0.1
    assert table1_row(5.0).percent_difference > 20
    pct = [table1_row(a).percent_difference for a in TABLE1_A]
    assert all(x < y for x, y in zip(pct, pct[1:]))
    # the a = 2 reference value is negative like every other row
    assert table1_row(2.0).ode_f2 < 0


def test_table_reproduces_reference_digits():
    # k, series f''(1), -(a/2) cos f(1), percent difference as printed
    ref = {
        0.5: (0.249, -0.2481, -0.2481, 0.001),
        1.0: (0.492, -0.4850, -0.4851, 0.018),
        3.0: (1.334, -1.181, -1.207, 2.168),
        4.0: (1.665, -1.314, -1.437, 8.551),
        5.0: (1.942, -1.221, -1.625, 24.835),
    }
    for a, (k, s2, o2, pct) in ref.items():
        r = table1_row(a)
        assert abs(r.k - k) <= 1e-3
        assert abs(r.series_f2 - s2) <= 1e-3 and abs(r.ode_f2 - o2) <= 1e-3
        assert abs(r.percent_difference - pct) <= 0.01


def test_zero_coupling_row():
    r = table1_row(0.0)
    assert r.series_f2 == 0.0 and r.percent_difference == 0.0


def test_percent_difference_convention():
    assert percent_difference(0.0, 0.0) == 0.0
    assert percent_difference(1.0, 0.0) == math.inf
    assert percent_difference(-1.1, -1.0) == pytest.approx(10.0)


def test_shooting_cross_check_is_close_for_small_a():
    r = table1_row(0.5, shooting=True)
    assert abs(r.shooting_f2 - r.ode_f2) <= 1e-4
