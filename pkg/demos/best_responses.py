"""How many best responses to g = 0 there are as the coupling grows.

Every root of the shooting residual c -> f(0) is a stationary point of
S(., 0); more roots appear as ``a`` grows and the terrain gets rougher.

Run: python demos/best_responses.py
"""

import math

from varigame import GameConfig, MixtureTarget, SampledFn, TimeGrid, root_count, scan_roots

zero = MixtureTarget.pure(SampledFn.zero(TimeGrid()))
for a, half in ((1, math.pi), (30, math.pi), (102, math.pi), (300, 2 * math.pi), (1000, 2 * math.pi)):
    roots = scan_roots(zero, GameConfig(a), (-half, half))
    # a tangency (double root) counts twice
    ends = ", ".join(f"{r.terminal_value:+.3f}" + (" (double)" if r.multiplicity == 2 else "")
                     for r in roots)
    print(f"a = {a:5d}: {root_count(roots):2d} roots in [-{half:.2f}, {half:.2f}]: {ends}")
