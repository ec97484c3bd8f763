"""Empirical ROC curves, exact arithmetic, and the concavity trichotomy.

Walks through the twelve-observation example with seven unique marker
values: builds the empirical curve, reads off exact vertices and AUC,
checks the three equivalent concavity criteria, and repairs the curve
with PAV calibration.

Run:  python demos/01_empirical_curves_and_concavity.py
"""

import numpy as np

from rocfit import (
    LabeledSample,
    auc_descriptor,
    concave_hull,
    concavity_diagnostics,
    empirical_auc,
    empirical_roc,
    eval_roc,
    natural_identification_cdf,
    pav_calibrate,
    recalibrated_sample,
)

# ordered marker values x1 < ... < x7 with outcomes
# 0; 1; 0,0; 0,0,1; 0,1,1; 1; 1
sample = LabeledSample(
    scores=np.array([1, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 7], dtype=float),
    labels=np.array([0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1]),
)

curve = empirical_roc(sample)
print("Empirical ROC vertices (exact):")
for far, hr in curve.vertices:
    print(f"  ({far}, {hr})")

auc = empirical_auc(curve)
print(f"\nAUC = {auc} = {float(auc):.5f}  ->  '{auc_descriptor(float(auc))}'")
print(f"Curve value at FAR=1/3: {eval_roc(curve, 1/3):.4f} (interpolated)")

diag = concavity_diagnostics(sample)
print(
    f"\nConcave curve? {diag.curve_concave} | "
    f"likelihood ratios monotone? {diag.lr_nondecreasing} | "
    f"event probabilities monotone? {diag.cep_nondecreasing}"
)
print("(the three criteria always agree)")

pav = pav_calibrate(sample)
print("\nPAV-calibrated event probabilities per threshold:")
print("  " + ", ".join(str(v) for v in pav.values))

hull = concave_hull(curve)
print("\nConcave hull vertices:")
for far, hr in hull.vertices:
    print(f"  ({far}, {hr})")

rescored = recalibrated_sample(sample, pav)
print(
    "\nRecalibrated sample is concave now?",
    concavity_diagnostics(rescored).curve_concave,
)

print("\nNatural identification: class-1 CDF realizing this curve")
for x in (0.25, 0.5, 0.75, 5 / 6):
    print(f"  F1({x:.3f}) = {float(natural_identification_cdf(curve, x)):.4f}")
