"""Inference: covariances, tests, ellipses, and confidence bands.

Fits a model, computes its asymptotic covariance, derives an AUC
standard error, runs the Monte Carlo goodness-of-fit test and the
two-sample equality tests, and builds a pointwise confidence band.

Run:  python demos/04_inference_tests_and_bands.py
"""

import warnings

import numpy as np

from rocfit import (
    BoundaryWarning,
    FitConfig,
    RandomStream,
    auc_equality_test,
    auc_inference,
    beta,
    confidence_band,
    confidence_ellipse,
    covariance_from_fit,
    curve_equality_test,
    empirical_roc,
    fit_mde,
    gof_test,
    roc_eval,
    sample_from_model,
)

warnings.filterwarnings("ignore", category=BoundaryWarning)

rng = RandomStream(seed=7)
truth = beta(0.8, 2.5)
n0 = n1 = 1500
sample = sample_from_model(truth, n0, n1, rng)
curve = empirical_roc(sample)
# lighter optimizer settings keep the demo fast; accuracy is plentiful here
cfg = FitConfig(family="beta2", restarts=2, tol=1e-6, nodes_per_panel=8, max_panels=512)

fit = fit_mde(curve, cfg)
cov = covariance_from_fit(fit, n0, n1)
print(f"fit: theta = {tuple(round(t, 3) for t in fit.theta)}, distance {fit.distance:.4f}")
print("estimator covariance (x 1e4):")
print(np.round(cov.theta_covariance * 1e4, 3))

auc, se = auc_inference(fit.model, cov)
print(f"\nAUC = {auc:.4f} +- {1.96 * se:.4f} (95%)")

ellipse = confidence_ellipse(fit.theta, cov, 0.5)
frac = ellipse.concave.mean()
print(f"50% parameter ellipse: {frac:.0%} of the contour is concave")

print("\nMonte Carlo goodness of fit (M = 49):")
res = gof_test(sample, cfg, M=49, rng=rng.substream(1))
print(f"  d_data = {res.statistic:.4f}, p = {res.p_value:.3f}")

print("\nTwo independent samples from the same model: equality tests")
sample_b = sample_from_model(truth, n0, n1, rng.substream(2))
fit_b = fit_mde(empirical_roc(sample_b), cfg)
cov_b = covariance_from_fit(fit_b, n0, n1)
curve_res = curve_equality_test(fit, cov, fit_b, cov_b)
auc_res = auc_equality_test(fit, cov, fit_b, cov_b)
print(f"  curve equality: chi2({curve_res.dof}) = {curve_res.statistic:.3f}, "
      f"p = {curve_res.p_value:.3f}")
print(f"  auc equality:   z = {auc_res.statistic:.3f}, p = {auc_res.p_value:.3f}")

print("\nPointwise 95% confidence band (parameter-draw envelope):")
grid = np.linspace(0.05, 0.95, 7)
lo, hi = confidence_band(fit.model, cov, grid, 0.95, draws=2000, rng=rng.substream(3))
fitted = roc_eval(fit.model, grid)
for p, a, f, b in zip(grid, lo, fitted, hi):
    print(f"  p={p:.2f}: [{a:.3f}, {f:.3f}, {b:.3f}]")
