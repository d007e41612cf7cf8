"""Power-series best response against g = 0 and where it breaks down.

The truncated series satisfies the linearized equation, so its f''(1)
drifts away from -(a/2) cos f(1) as a grows.

Run: python demos/series_table.py
"""

from varigame.series import TABLE1_A, table1_row

print(f"{'a':>4} {'k':>8} {'series f2':>10} {'ODE f2':>10} {'% diff':>8}")
for a in TABLE1_A:
    r = table1_row(a)
    print(f"{a:4.1f} {r.k:8.4f} {r.series_f2:10.4f} {r.ode_f2:10.4f} {r.percent_difference:8.3f}")
