"""Power-series approximation of the best response to ``g = 0``.

Replacing ``cos f`` by ``1 - f^2/2`` in ``f'' = -(a/2) cos f`` and matching
coefficients of ``f(t) = sum b_n t^n`` gives

    2 b_2 = -a/2 + (a/4) b_0^2
    (n+2)(n+1) b_{n+2} = (a/4) sum_{i+j=n} b_i b_j      (n >= 1)

with ``b_0 = 0`` and ``b_1 = k`` free.  ``k`` is then fixed by ``f'(1) = 0``.
The approximation is good for small ``a`` and degrades quickly past a ~ 3.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NoRootsError

__all__ = [
    "SeriesCoeffs",
    "recurrence",
    "solve_k",
    "table1_row",
    "TableRow",
    "percent_difference",
    "TABLE1_A",
]

TABLE1_A = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
K_TOL = 1e-9


@dataclass(frozen=True)
class SeriesCoeffs:
    a: float
    k: float
    coeffs: np.ndarray

    def __call__(self, t, deriv=0):
        """Evaluate the polynomial (or its ``deriv``-th derivative) at ``t``."""
        p = np.polynomial.Polynomial(self.coeffs)
        return p.deriv(deriv)(t) if deriv else p(t)

    @property
    def slope_at_one(self):
        """``f'(1) = sum n b_n``."""
        n = np.arange(self.coeffs.size)
        return float(n @ self.coeffs)


def recurrence(a, k, N=10):
    """Coefficients ``b_0 .. b_N`` for slope parameter ``k``."""
    if N < 2:
        raise ValueError("N must be at least 2")
    b = np.zeros(N + 1)
    b[1] = k
    b[2] = (-a / 2 + a / 4 * b[0] ** 2) / 2
    for n in range(1, N - 1):
        conv = sum(b[i] * b[n - i] for i in range(n + 1))
        b[n + 2] = a / 4 * conv / ((n + 2) * (n + 1))
    return SeriesCoeffs(float(a), float(k), b)


def solve_k(a, N=10, tol=K_TOL):
    """Slope ``k`` in ``[0, a]`` making ``f'(1) = 0``, by bisection.

    Raises:
      NoRootsError: if ``f'(1)`` does not change sign over the bracket,
        which happens when the truncated series stops being a usable model.
    """
    if a < 0:
        raise ValueError("a must be non-negative")
    if a == 0:
        return 0.0

    def slope(k):
        return recurrence(a, k, N).slope_at_one

    lo, hi = 0.0, float(a)
    flo, fhi = slope(lo), slope(hi)
    if flo == 0.0:
        return lo
    if np.sign(flo) == np.sign(fhi):
        raise NoRootsError(
            f"f'(1) has no sign change for k in [0, {a:g}] with N={N} "
            f"(f'(1) = {flo:.3g}, {fhi:.3g}); the series approximation has broken down, "
            "try a different N or a smaller a"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = slope(mid)
        if abs(fm) <= tol and hi - lo < 1e-12 * max(1.0, a):
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, a):
            break
    mid = 0.5 * (lo + hi)
    if abs(slope(mid)) > tol:
        raise NoRootsError(f"bisection stalled with |f'(1)| = {abs(slope(mid)):.3g} > {tol:g}")
    return mid


def percent_difference(approx, exact):
    """``|approx - exact| / |exact| * 100`` with 0/0 defined as 0."""
    if exact == 0.0:
        return 0.0 if approx == 0.0 else math.inf
    return abs(approx - exact) / abs(exact) * 100.0


@dataclass(frozen=True)
class TableRow:
    a: float
    k: float
    series_f2: float
    ode_f2: float
    percent_difference: float
    f1: float
    shooting_f2: float = math.nan

    def as_dict(self):
        return dict(self.__dict__)


def table1_row(a, N=10, shooting=False, cfg=None):
    """Compare the series ``f''(1)`` with ``-(a/2) cos f(1)``.

    ``f(1)`` is taken from the series itself.  With ``shooting=True`` the
    row also carries ``f''(1)`` of the numerically exact best response to
    ``g = 0`` (which is ``-(a/2) cos`` of its own endpoint).
    """
    k = solve_k(a, N)
    s = recurrence(a, k, N)
    f1 = float(s(1.0))
    series_f2 = float(s(1.0, deriv=2))
    ode_f2 = -a / 2 * math.cos(f1)
    shoot_f2 = math.nan
    if shooting:
        shoot_f2 = _shooting_f2(a, cfg)
    return TableRow(a, k, series_f2, ode_f2, percent_difference(series_f2, ode_f2), f1, shoot_f2)


def _shooting_f2(a, cfg=None):
    from .payoff import GameConfig
    from .shooting import MixtureTarget, admissible_roots, scan_roots
    from .grid import SampledFn

    cfg = GameConfig(a) if cfg is None else cfg.with_a(a)
    roots = admissible_roots(scan_roots(MixtureTarget.pure(SampledFn.zero(cfg.grid)), cfg,
                                        c_range=(-math.pi, math.pi)))
    if not roots:
        raise NoRootsError(f"no admissible best response to g = 0 at a={a:g}")
    # the minimizer against g = 0 is the root nearest the series endpoint a/4
    c = min((r.terminal_value for r in roots), key=lambda c: abs(c - a / 4))
    return -a / 2 * math.cos(c)
