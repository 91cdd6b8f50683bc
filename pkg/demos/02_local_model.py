"""The explicit local hidden-variable model and where it stops working.

Run with ``python3 demos/02_local_model.py``.
"""
import math

import numpy as np

from photonic_bell_lab import lhv

alpha = math.sqrt(0.3025)
table = lhv.build_submodel_table_twc(alpha, cutoff=10)
print(len(table.submodels), "submodels, total weight", table.total_weight)

# biggest components of the mixture
for sub in sorted(table.submodels, key=lambda s: -s.weight)[:5]:
    print(f"  {sub.kind:8s} {tuple(sub.index)}  w={sub.weight:.6f}  V={sub.visibility:+.3f}")

# the model reproduces quantum statistics at any pair of local phases
worst = 0.0
for t1 in np.linspace(0, 2 * math.pi, 6, endpoint=False):
    for t2 in np.linspace(0, 2 * math.pi, 6, endpoint=False):
        worst = max(worst, lhv.verify_model(table, t1, t2).max_deviation)
print("max deviation from quantum predictions:", worst)

# Delta_(1,0) is the leftover weight for the single-click events. It turns
# negative once the local oscillator is too strong.
for x in (0.5, 0.8, 0.87, 0.9, 0.95):
    print(f"alpha^2={x:.2f}  Delta_10={lhv.delta_twc(1, 0, math.sqrt(x)):+.5f}"
          f"  bound={lhv.delta_twc_bound(math.sqrt(x)):+.5f}")
print("proven threshold alpha^2 =", lhv.alpha_threshold_twc())

try:
    lhv.build_submodel_table_twc(math.sqrt(0.9), cutoff=10)
except lhv.ModelValidityError as exc:
    print("refused:", exc)

# sampling the model: counts agree with the Born rule within statistical error
res = lhv.sample_twc(alpha, math.pi / 2, 0.0, seed=11, n=1_000_000, cutoff=10)
z = lhv.sample_z_scores(res, alpha, math.pi / 2, 10)
print(f"{len(z)} events tested, max |z| = {max(abs(v) for v in z.values()):.2f}")

# squeezed-vacuum version: its critical Delta changes sign near alpha^2 = 0.59
for x in (0.50, 0.57, 0.59, 0.62):
    print(f"alpha^2=gamma={x:.2f}  Delta_0001={lhv.delta_gpy_0001(math.sqrt(x), x):+.5f}")
