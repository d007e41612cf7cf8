"""Weak coupling: the equilibrium is the single parabola (a/4) t (2 - t).

The default seeds contain the parabola, so the loop would certify it in one
round; starting from c t (2 - t), c in {+-1, +-2, +-3}, it has to find it
(except at a = 4, where the seed c = 1 happens to be the parabola).

Run: python demos/small_coupling.py
"""

from varigame import GameConfig, TimeGrid, find_equilibrium, small_a_optimum
from varigame.double_oracle import alternative_seeds
from varigame.lemmas import nash_bound

grid = TimeGrid()
print(f"single-function regime guaranteed up to a = pi^3/4 = {nash_bound():.4f}")
for a in (1.0, 4.0, 7.5):
    cfg = GameConfig(a)
    rep = find_equilibrium(cfg, alternative_seeds(cfg))
    f = rep.support[0]
    gap = f.sup_distance(small_a_optimum(a, grid))
    print(f"a = {a:4.1f}: support size {rep.support_size}, f(1) = {f.values[-1]:.5f} "
          f"(parabola {a / 4:.5f}), sup gap {gap:.2e}, {rep.iterations} rounds")

# past the bound the parabola is no longer the whole story
rep = find_equilibrium(GameConfig(10.0))
ends, probs = rep.branch_endpoints
print("a = 10.0:", ", ".join(f"f(1) = {e:+.3f} w.p. {p:.3f}" for e, p in zip(ends, probs)))
