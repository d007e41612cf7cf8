"""The game functional ``S(f, g)`` and pairwise payoff matrices.

``S(f, g) = int_0^1 f'(t)^2 - g'(t)^2 - a phi(f(t) - g(t)) dt`` is what
player ``f`` pays player ``g``; ``f`` minimizes, ``g`` maximizes.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ConfigurationError, GridMismatchError
from .grid import QUADRATURE_RULES, TimeGrid, _check_same_grid, integrate
from .kernel import OddKernel, builtin_kernel

__all__ = ["GameConfig", "PayoffMatrix", "payoff", "payoff_matrix", "expected_payoff"]


@dataclass(frozen=True)
class GameConfig:
    a: float
    kernel: OddKernel = field(default_factory=lambda: builtin_kernel("sin"))
    quadrature: str = "trapezoid"
    grid: TimeGrid = field(default_factory=TimeGrid)

    def __post_init__(self):
        if isinstance(self.kernel, str):
            object.__setattr__(self, "kernel", builtin_kernel(self.kernel))
        if not np.isfinite(self.a) or self.a < 0:
            raise ConfigurationError(f"coupling a must be finite and non-negative, got {self.a}")
        object.__setattr__(self, "a", float(self.a))
        if self.quadrature not in QUADRATURE_RULES:
            raise ConfigurationError(
                f"unknown quadrature {self.quadrature!r}; use one of {QUADRATURE_RULES}"
            )

    def with_a(self, a):
        return replace(self, a=a)

    def echo(self):
        return {
            "a": self.a,
            "kernel": self.kernel.name,
            "quadrature": self.quadrature,
            "dt": self.grid.dt,
            "n_steps": self.grid.n_steps,
        }


def payoff(f, g, cfg):
    """Quadrature value of ``S(f, g)`` on ``cfg.grid``."""
    _check_same_grid(f, g)
    if f.grid.n_steps != cfg.grid.n_steps:
        raise GridMismatchError(
            f"strategies use {f.grid.n_steps} steps but the game grid has {cfg.grid.n_steps}"
        )
    fp, gp = f.slope(), g.slope()
    integrand = fp * fp - gp * gp - cfg.a * cfg.kernel.value(f.values - g.values)
    return integrate(integrand, cfg.quadrature)


def expected_payoff(f, strategies, weights, cfg):
    """``sum_k w_k S(f, g_k)``."""
    return float(sum(w * payoff(f, g, cfg) for w, g in zip(weights, strategies) if w != 0.0))


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Antisymmetric matrix of pairwise payoffs.

    ``entries[i, j] = S(strategies[j], strategies[i])``: the column is the
    minimizing player's function, the row is the opponent's.  A mixture
    ``p`` over columns is an equilibrium when ``entries @ p <= 0``.
    """

    strategies: tuple
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"payoff matrix must be square, got shape {e.shape}")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "strategies", tuple(self.strategies))

    def __len__(self):
        return self.entries.shape[0]

    def to_csv(self, path):
        np.savetxt(path, self.entries, delimiter=",", fmt="%.17g")

    def to_json(self):
        return json.dumps(
            {
                "schema_version": 1,
                "strategies": list(range(len(self))),
                "labels": [getattr(s, "label", "") for s in self.strategies],
                "entries": self.entries.ravel().tolist(),
                "shape": list(self.entries.shape),
            }
        )

    @classmethod
    def from_array(cls, entries):
        """Wrap a bare matrix (for example one read from CSV)."""
        e = np.asarray(entries, dtype=float)
        return cls((None,) * e.shape[0], e)

    @classmethod
    def from_csv(cls, path):
        return cls.from_array(np.atleast_2d(np.loadtxt(path, delimiter=",", ndmin=2)))


def payoff_matrix(strategies, cfg):
    """Build and antisymmetrize the payoff matrix over ``strategies``."""
    strategies = list(strategies)
    if not strategies:
        raise ValueError("payoff_matrix needs at least one strategy")
    _check_same_grid(*strategies)
    n = len(strategies)
    X = np.stack([s.values for s in strategies])
    slopes = np.stack([s.slope() for s in strategies])
    kinetic = integrate(slopes * slopes, cfg.quadrature)
    M = np.zeros((n, n))
    for i in range(n):
        # row i: opponent plays strategies[i]; column j plays strategies[j]
        coupling = integrate(cfg.a * cfg.kernel.value(X - X[i]), cfg.quadrature)
        M[i] = kinetic - kinetic[i] - coupling
    M = 0.5 * (M - M.T)
    return PayoffMatrix(strategies, M)
