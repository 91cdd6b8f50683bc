"""Four-outcome CGLMP test on two-photon events.

Run with ``python3 demos/04_cglmp.py``.
"""
import math

import numpy as np

from photonic_bell_lab import bell

# (0&2) events alone give a CGLMP value of 2/3, well inside the local bound 2
joint = bell.zero_and_two_joint()
print("(0&2) value:", bell.cglmp_value(joint, bell.DEFAULT_ASSIGNMENT).value)
assignment, best = bell.best_cglmp_assignment(joint)
print("best relabelling does no better:", best)

# mixing in (2&2) events with weight lambda gives at most (10/3) lambda + 2/3
for lam in (0.1, 0.3, 0.4, 0.6):
    r = bell.cglmp_mixing_bound(lam)
    print(f"lambda={lam:.1f}  bound={r:.4f}")

# lambda grows with squeezing; along alpha^2 = gamma it reaches 0.4 at sqrt(8/27)
print("gamma crossing:", bell.lambda_crossing(0.4), "exact", math.sqrt(8 / 27))
for g in np.linspace(0.1, 0.7, 4):
    print(f"gamma={g:.2f}  lambda={bell.lambda_mix(math.sqrt(g), g):.4f}")
