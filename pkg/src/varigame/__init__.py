"""Optimal strategies and mixed equilibria of a variational zero-sum game.

Two players choose functions ``f, g`` on ``[0, 1]`` with ``f(0) = 0`` and
``f'(1) = 0``; player ``f`` pays

    S(f, g) = int_0^1 f'(t)^2 - g'(t)^2 - a phi(f(t) - g(t)) dt

for an odd kernel ``phi`` (``sin`` by default).
"""

from .double_oracle import (EquilibriumReport, alternative_seeds, cluster_functions,
                            default_seeds, find_equilibrium, group_branches)
from .exceptions import (ConfigurationError, DivergenceError, GridMismatchError, LPError,
                         NoRootsError, VarigameError)
from .grid import SampledFn, TimeGrid, derivative, integrate, quadratic, small_a_optimum
from .kernel import OddKernel, builtin_kernel, linearized, odd_polynomial
from .lemmas import (LemmaVerdict, check_fourier_inequality, check_sin_inequality, nash_bound,
                     p_func)
from .matrix_game import MixedStrategy, cycle_solution, expected_payoffs, solve_symmetric_game
from .payoff import GameConfig, PayoffMatrix, expected_payoff, payoff, payoff_matrix
from .series import SeriesCoeffs, recurrence, solve_k, table1_row
from .shooting import (MixtureTarget, PhasePortrait, ShotResult, admissible_roots,
                       best_response, integrate_backward, phase_portrait, root_count,
                       scan_roots)
from .sweep import SweepRecord, detect_transitions, sweep_equilibria

__version__ = "0.1.0"
