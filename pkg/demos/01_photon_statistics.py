"""Photon-counting statistics of the two weak-field homodyne setups.

Run with ``python3 demos/01_photon_statistics.py``.
"""
import math

import numpy as np

from photonic_bell_lab import closed_form as cf
from photonic_bell_lab.fock import SourceSpec, probability_table
from photonic_bell_lab.lhv import GPY_SQUEEZE_PHASE

# A single photon is split between Alice and Bob; each mixes her half with a
# weak coherent local oscillator on a balanced beamsplitter.
alpha = math.sqrt(0.3025)
theta12 = math.pi / 2
table = probability_table(SourceSpec("single_photon", alpha, theta12, 0.0), 0.5, 6)

print("total weight up to 6 photons:", sum(table.values()))
print("analytic tail beyond 6:      ", cf.twc_tail(alpha, 6))

# the Fock-space result agrees with the closed form row by row
diff = max(abs(p - cf.p_twc(n, alpha, theta12)) for n, p in table.items())
print("max |oracle - closed form|:  ", diff)

# a few of the most likely events
for n, p in sorted(table.items(), key=lambda kv: -kv[1])[:6]:
    print(n, f"{p:.6f}")

# the conditional visibility of each event sets how strongly it depends on theta12
for n in [(1, 0, 1, 0), (2, 0, 1, 0), (1, 0, 0, 2)]:
    print("visibility", n, cf.visibility(n))

# (1,0,1,0) swings with the phase difference, (1,1,0,0) never changes
for th in np.linspace(0, math.pi, 5):
    print(f"theta12={th:.3f}  p(1,0,1,0)={cf.p_twc((1, 0, 1, 0), alpha, th):.6f}"
          f"  p(1,1,0,0)={cf.p_twc((1, 1, 0, 0), alpha, th):.6f}")

# Replacing the single photon by two-mode squeezed vacuum: some outcome classes
# have compact formulas, the rest come from the Fock-space oracle only.
gamma = 0.2
src = SourceSpec("squeezed", alpha, 0.4, 0.3, gamma, GPY_SQUEEZE_PHASE)
sq = probability_table(src, 0.5, 10)
covered = [n for n in sq if cf.is_class1(n) or cf.is_2and2(n)]
print(f"squeezed source: {len(covered)} of {len(sq)} events have closed forms")
print("vacuum probability", sq[(0, 0, 0, 0)], "vs", cf.gpy_vacuum_probability(alpha, gamma))
