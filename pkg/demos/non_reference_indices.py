"""
Scoring without a clean reference
=================================

Real scenes have no ground truth.  Two indices then stand in: the inverse
coefficient of variation (mean over standard deviation) in flat striped
windows should rise after destriping, and the mean relative deviation in
stripe-free windows should stay small because good destriping leaves those
pixels alone.
"""

# %%
import numpy as np

from ovdestripe.metrics import NOISE_FREE, STRIPED, Window, icv, mrd
from ovdestripe.orientation import estimate_orientation
from ovdestripe.simulator import StripeSpec, line_offsets, make_oblique, rotation_margin, synthetic_base
from ovdestripe.solver import SolverParams, destripe

# %%
# Stripe only the left half of the scene, then rotate.
base = synthetic_base(rotation_margin(200), seed=31, texture=0.0)
field = np.zeros_like(base)
half = base.shape[1] // 2
field[:, :half] = line_offsets(base.shape[1], StripeSpec("random", seed=31))[None, :half]
y, truth = make_oblique(base + field, base, 17.0, 200)

# %%
# Windows are picked by hand, as one would on a real scene: two in the striped
# part, two in the untouched part.
striped = [Window(STRIPED, 20, 10), Window(STRIPED, 150, 20)]
clean = [Window(NOISE_FREE, 20, 170), Window(NOISE_FREE, 120, 180)]

res = destripe(y, SolverParams(estimate_orientation(y).chosen, lambda1=2.0, lambda2=0.3,
                               rho1=50.0, rho2=50.0, rho3=50.0))
for w, before, after in zip(striped, icv(y, striped).values, icv(res.X, striped).values):
    print(f"ICV at ({w.row0:3d},{w.col0:3d}): {before:7.2f} -> {after:7.2f}")
print(f"MRD over stripe-free windows: {mrd(y, res.X, clean).value:.3f} %")
