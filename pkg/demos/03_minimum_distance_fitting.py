"""Fitting ROC models by minimum L2 distance, free and concave.

Simulates a dataset, fits binormal and beta models with and without the
concavity constraint, and compares the achieved distances; then shows
the straight-edge families improving the fit on data with a vertical
edge.

Run:  python demos/03_minimum_distance_fitting.py
"""

from rocfit import (
    FitConfig,
    RandomStream,
    beta_gamma,
    empirical_roc,
    fit_mde,
    is_concave,
    l2_distance,
    sample_from_model,
)


def show(fit):
    theta = tuple(round(t, 3) for t in fit.theta)
    flags = f" boundary={list(fit.boundary)}" if fit.boundary else ""
    print(
        f"  {fit.family:<12} {fit.constraint:<13} theta={theta!s:<24} "
        f"fit={fit.distance:.4f} concave={is_concave(fit.model)}{flags}"
    )


rng = RandomStream(seed=20240811)
sample = sample_from_model(beta_gamma(0.9, 1.6, 0.0), 1500, 1500, rng)
curve = empirical_roc(sample)

print("Fits on a simulated dataset (n = 3000):")
for family in ("binormal", "beta2"):
    for constraint in ("unrestricted", "concave"):
        show(fit_mde(curve, FitConfig(family=family, constraint=constraint)))
print("(the constrained distance can never beat the unrestricted one)")

print("\nData with a vertical straight edge (some class-1 certainty):")
edge_sample = sample_from_model(beta_gamma(0.9, 1.6, 0.25), 1200, 1200, rng.substream(1))
edge_curve = empirical_roc(edge_sample)
for family in ("beta2", "beta3_gamma"):
    show(fit_mde(edge_curve, FitConfig(family=family)))
print("(the three-parameter family absorbs the edge and fits better)")

print("\nDistance is honest: evaluating other candidates")
fit = fit_mde(edge_curve, FitConfig(family="beta3_gamma"))
for gamma in (0.0, 0.1, 0.25, 0.4):
    model = beta_gamma(fit.theta[0], fit.theta[1], gamma)
    print(f"  gamma={gamma:.2f}: distance {l2_distance(edge_curve, model):.4f}")
