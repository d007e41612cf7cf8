"""Cached expensive runs shared between test modules."""

from functools import lru_cache

import numpy as np

from varigame.double_oracle import alternative_seeds, default_seeds, find_equilibrium
from varigame.grid import SampledFn, TimeGrid
from varigame.payoff import GameConfig

GRID = TimeGrid()


@lru_cache(maxsize=None)
def equilibrium(a, kernel="sin", seeds="default", n_steps=10_000, max_iter=100):
    cfg = GameConfig(a, kernel, grid=TimeGrid(n_steps))
    s = alternative_seeds(cfg) if seeds == "alternative" else default_seeds(cfg)
    return find_equilibrium(cfg, s, max_iter=max_iter)


def admissible(coeffs, grid=GRID):
    """``sum c_m sin((m - 1/2) pi t)``: f(0) = 0 and f'(1) = 0 for any coefficients."""
    c = np.asarray(coeffs, dtype=float)
    w = (np.arange(1, c.size + 1) - 0.5) * np.pi
    t = grid.nodes
    return SampledFn(grid, np.sin(np.outer(t, w)) @ c, (np.cos(np.outer(t, w)) * w) @ c)
