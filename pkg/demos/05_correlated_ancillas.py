"""What the cheap stream mode throws away.

Two ways to score an n-ancilla stream:

* uncorrelated — track each ancilla's marginal state and add the per-ancilla
  Fisher matrices (the n-ancilla state is modeled as a product);
* correlated — simulate probes and ancillas jointly and only trace the
  probes out at the very end, keeping the ancilla-ancilla correlations that
  the probes mediate.

The first is exponentially cheaper and is exact for the first ancilla; from
the second ancilla on it is an approximation, because the probes remember
earlier collisions.  The comparison below (preset `fig4` configs at n = 2)
shows the two modes agree closely on the trace-based merit but can differ
visibly on the determinant-based one — and the joint simulation comes out
*better*: the discarded correlations carry usable information.
"""

import math

from colltherm.presets import get_preset
from colltherm.protocols import SweepGrid, sweep

preset = get_preset("fig4")
values = tuple(round(0.1 * i, 10) for i in range(1, 10))


def rows_for(n, mode):
    (s,) = [x for x in preset.series
            if x.labels["n_ancillas"] == n and x.labels["mode"] == mode]
    return sweep(SweepGrid(s.grid.axis_name, values, s.grid.fixed), s.scenario)


un, co = rows_for(2, "uncorrelated"), rows_for(2, "correlated")

print("n = 2 stream, T = (2, 1), g1 = pi/2, theta = pi/4")
print(f"{'g2/pi':>6}  {'eta_joint unc':>13}  {'eta_joint cor':>13}  "
      f"{'eta_acc unc':>11}  {'eta_acc cor':>11}")
worst = (0.0, None)
for ru, rc in zip(un, co):
    fu = f"{ru['eta_acc']:11.4f}" if math.isfinite(ru["eta_acc"]) else "       -inf"
    fc = f"{rc['eta_acc']:11.4f}" if math.isfinite(rc["eta_acc"]) else "       -inf"
    print(f"{ru['axis_value']:6.2f}  {ru['eta_joint']:13.4f}  {rc['eta_joint']:13.4f}  {fu}  {fc}")
    if math.isfinite(ru["eta_acc"]) and math.isfinite(rc["eta_acc"]):
        rel = abs(rc["eta_acc"] - ru["eta_acc"]) / abs(ru["eta_acc"])
        if rel > worst[0]:
            worst = (rel, ru["axis_value"])

print(f"\nlargest eta_acc disagreement: {worst[0]:.1%} at g2/pi = {worst[1]:.2f}")
print("(the correlated value is the less negative of the two: keeping the")
print("probe-mediated ancilla correlations can only add information)")
