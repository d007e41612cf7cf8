"""Support size of the mixed equilibrium against the coupling strength.

A few values are enough to see the 1 -> 2 -> 3 growth; the full diagram is
``varigame sweep --a-min 1 --a-max 110 --step 1``.

Run: python demos/bifurcation.py [a ...]
"""

import sys

from varigame import GameConfig
from varigame.sweep import detect_transitions, sweep_values

values = [float(x) for x in sys.argv[1:]] or [4.0, 10.0, 25.0, 50.0]
records = sweep_values(values, GameConfig(1.0))
for r in records:
    mix = ", ".join(f"{e:+.3f} ({p:.2f})" for e, p in zip(r.endpoints, r.probabilities))
    print(f"a = {r.a:6.1f}: size {r.support_size}, endpoints (weights) {mix}")
print("transitions:", detect_transitions(records))
