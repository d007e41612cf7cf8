"""Numeric checks of the two inequalities behind the small-``a`` equilibrium.

* ``y - sin y <= y^2 / pi`` for all real ``y``, i.e. ``p(y) = (y - sin y) / y^2``
  never exceeds ``1/pi`` (attained at ``y = pi``).
* For ``f(t) = sum_m a_m sin(m pi t / 2)``,
  ``int_0^2 f'^2 >= (pi/2)^2 int_0^2 f^2``.

Together they show that ``(a/4) t (2 - t)`` is the unique equilibrium for
``a <= pi^3 / 4``.  These are regression checks on grids, not proofs.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LemmaVerdict",
    "p_func",
    "check_sin_inequality",
    "check_fourier_inequality",
    "fourier_integrals",
    "nash_bound",
    "run_all",
]

SIN_TOL = 1e-9
FOURIER_TOL = 1e-9


@dataclass(frozen=True)
class LemmaVerdict:
    name: str
    passed: bool
    witness: tuple = None
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "witness": list(self.witness) if self.witness is not None else None,
                "detail": self.detail}


def p_func(y):
    """``(y - sin y) / y^2``, extended by ``p(0) = 0``.  Works on arrays."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    small = np.abs(y) < 1e-4
    ys = y[small]
    # series y/6 - y^3/120 avoids cancellation near zero
    out[small] = ys / 6 - ys ** 3 / 120
    yl = y[~small]
    out[~small] = (yl - np.sin(yl)) / (yl * yl)
    return out[()] if out.ndim == 0 else out


def check_sin_inequality(y_grid):
    """Pass iff ``max p <= 1/pi + 1e-9`` over ``y_grid``; witness ``(argmax, margin)``.

    ``margin = 1/pi - max p`` (non-negative on success).
    """
    y = np.atleast_1d(np.asarray(y_grid, dtype=float))
    if y.size == 0 or not np.all(np.isfinite(y)):
        raise ValueError("y_grid must be a non-empty finite array")
    p = p_func(y)
    i = int(np.argmax(p))
    margin = 1 / math.pi - float(p[i])
    return LemmaVerdict(
        "sin_inequality",
        margin >= -SIN_TOL,
        (float(y[i]), margin),
        f"{y.size} points on [{y.min():.6g}, {y.max():.6g}], max p = {p[i]:.12g}",
    )


def fourier_integrals(coeffs):
    """``(int_0^2 f^2, int_0^2 f'^2)`` for ``f = sum a_m sin(m pi t / 2)``, by Parseval."""
    c = np.asarray(coeffs, dtype=float)
    m = np.arange(1, c.shape[-1] + 1)
    return np.sum(c * c, axis=-1), np.sum((m * math.pi / 2) ** 2 * c * c, axis=-1)


def check_fourier_inequality(modes=10, trials=1000, rng_seed=42):
    """Random coefficient vectors, uniform in ``[-1, 1]``; witness ``(trial, margin)``.

    The margin of a trial is ``int f'^2 - (pi/2)^2 int f^2`` divided by
    ``int f'^2`` so that it is scale free.
    """
    if modes < 1 or trials < 1:
        raise ValueError("modes and trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    c = rng.uniform(-1.0, 1.0, size=(trials, modes))
    lhs_f, lhs_d = fourier_integrals(c)
    margin = (lhs_d - (math.pi / 2) ** 2 * lhs_f) / np.maximum(lhs_d, np.finfo(float).tiny)
    i = int(np.argmin(margin))
    return LemmaVerdict(
        "fourier_inequality",
        bool(margin[i] >= -FOURIER_TOL),
        (i, float(margin[i])),
        f"{trials} trials, {modes} modes, seed {rng_seed}",
    )


def nash_bound():
    """``pi^3 / 4``: below this coupling the equilibrium is a single function."""
    return math.pi ** 3 / 4


def run_all(seed=42):
    """Default verdicts for the self check."""
    y = np.linspace(-100 * math.pi, 100 * math.pi, 1_000_000)
    sin_v = check_sin_inequality(y)
    near_pi = abs(abs(sin_v.witness[0]) - math.pi) <= 1e-3
    sin_v = LemmaVerdict(sin_v.name, sin_v.passed and near_pi, sin_v.witness, sin_v.detail)
    bound = nash_bound()
    return [
        sin_v,
        check_fourier_inequality(10, 1000, seed),
        LemmaVerdict("nash_bound", 7.751 < bound < 7.752, (bound, 0.0), "pi^3/4"),
    ]
