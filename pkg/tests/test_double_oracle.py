import numpy as np
import pytest

from _shared import equilibrium
from varigame.double_oracle import (alternative_seeds, cluster_functions, default_seeds,
                                    find_equilibrium, group_branches)
from varigame.exceptions import NoRootsError
from varigame.grid import SampledFn, TimeGrid, quadratic, small_a_optimum
from varigame.lemmas import nash_bound
from varigame.payoff import GameConfig
from varigame.shooting import best_response

GRID = TimeGrid()


def test_cluster_functions_examples():
    g = TimeGrid(10)
    f = quadratic(g, 1.0)
    assert cluster_functions([f, quadratic(g, 1.0)]) == [f]
    shifted = SampledFn(g, f.values + 2e-3)
    assert len(cluster_functions([f, shifted], 1e-3)) == 2
    # near copies at sup distance 2e-4, 4e-4 and 6e-4 from f; the distant one at 5
    near = [SampledFn(g, f.values + d) for d in (2e-4, 4e-4, 6e-4)]
    far = quadratic(g, -4.0)
    kept = cluster_functions([f] + near + [far], 1e-3)
    assert kept == [f, far]


def test_default_seeds():
    cfg = GameConfig(4.0)
    seeds = default_seeds(cfg)
    assert len(seeds) == 6
    for s in seeds:
        assert s.values[0] == 0.0 and s.slope()[-1] == 0.0
    opt = small_a_optimum(4.0, GRID)
    assert any(s.sup_distance(opt) == 0.0 for s in seeds)
    alt = alternative_seeds(cfg)
    assert len(alt) == 6 and all(s.is_admissible() for s in alt)


def test_group_branches():
    g = TimeGrid(10)
    fs = [quadratic(g, c) for c in (1.0, 1.01, 3.0, 1.02)]
    groups = group_branches(fs, [0.1, 0.2, 0.3, 0.4], tol=0.05)
    assert [grp["members"] for grp in groups] == [[0, 1, 3], [2]]
    assert groups[0]["probability"] == pytest.approx(0.7)
    assert groups[0]["representative"] == 3
    assert groups[0]["endpoint"] == pytest.approx((0.1 * 1.0 + 0.2 * 1.01 + 0.4 * 1.02) / 0.7)
    # chained neighbours join one branch
    chain = [quadratic(g, c) for c in (0.0, 0.04, 0.08)]
    assert len(group_branches(chain, [1 / 3] * 3, tol=0.05)) == 1
    with pytest.raises(ValueError):
        group_branches(fs, [1.0])


def test_small_a_equilibrium_is_the_parabola():
    rep = equilibrium(4.0)
    assert rep.converged and rep.support_size == 1
    assert rep.support[0].sup_distance(small_a_optimum(4.0, GRID)) <= 5e-3
    assert rep.improvement_history[-1] >= -1e-5


def test_small_a_seed_robust():
    rep = equilibrium(4.0, seeds="alternative")
    assert rep.converged and rep.support_size == 1
    assert rep.support[0].sup_distance(small_a_optimum(4.0, GRID)) <= 5e-3


@pytest.mark.parametrize("a", [2.0, 7.5])
def test_single_function_below_nash_bound(a):
    assert a <= nash_bound()
    rep = equilibrium(a)
    assert rep.converged and rep.support_size == 1


@pytest.mark.parametrize("a,size", [(10.0, 2), (25.0, 2), (50.0, 3), (100.0, 3)])
def test_support_sizes(a, size):
    rep = equilibrium(a)
    assert rep.converged
    assert rep.support_size == size


@pytest.mark.slow
@pytest.mark.parametrize("a", [175.0, 250.0])
def test_large_a_support_stays_three(a):
    rep = equilibrium(a)
    assert rep.converged and rep.support_size == 3
    assert all(s <= 1e-8 for s in rep.security_history)
    ends, probs = rep.branch_endpoints
    assert np.isclose(sum(probs), 1.0)
    # one branch below zero, one near pi/3 .. pi/2, one just above pi
    assert ends[0] < 0 < ends[1] < 1.6 and 3.0 < ends[2] < 3.5


@pytest.mark.parametrize("a", [4.0, 10.0, 50.0])
def test_report_invariants(a):
    rep = equilibrium(a)
    cfg = GameConfig(a)
    assert len(rep.support) == len(rep.probabilities)
    assert all(s <= 1e-8 for s in rep.security_history)
    for i, f in enumerate(rep.support):
        assert f.is_admissible()
        for g in rep.support[i + 1:]:
            assert f.sup_distance(g) > 1e-3
    # the fixed point certifies itself
    _, margin = best_response(rep.mixture, cfg)
    assert margin >= -1e-5
    d = rep.to_dict()
    assert d["support_size"] == rep.support_size and d["config"]["a"] == a
    assert d["schema_version"] == 1


def test_max_iter_gives_unconverged_report():
    rep = find_equilibrium(GameConfig(10.0), max_iter=2)
    assert not rep.converged and rep.iterations == 2
    assert len(rep.improvement_history) == 2


def test_input_validation():
    cfg = GameConfig(1.0)
    with pytest.raises(ValueError):
        find_equilibrium(cfg, threshold=0.0)
    with pytest.raises(ValueError):
        find_equilibrium(cfg, seeds=[])
    bad = SampledFn.from_callable(GRID, lambda t: t)
    with pytest.raises(ValueError, match="violates"):
        find_equilibrium(cfg, seeds=[bad])


def test_oracle_failure_carries_iteration_context():
    with pytest.raises(NoRootsError) as info:
        find_equilibrium(GameConfig(4.0), c_range=(50.0, 60.0))
    assert any("iteration 1" in n for n in info.value.__notes__)


def test_deterministic():
    a = find_equilibrium(GameConfig(3.0))
    b = find_equilibrium(GameConfig(3.0))
    assert a.iterations == b.iterations
    assert a.improvement_history == b.improvement_history
    assert np.array_equal(a.support[0].values, b.support[0].values)
