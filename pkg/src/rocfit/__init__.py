"""ROC curve analysis: empirical diagnostics, parametric fitting, inference.

The package builds empirical ROC curves in exact rational arithmetic,
diagnoses and enforces concavity (PAV calibration / concave hull), fits
binormal and beta-family models by constrained minimum-distance
estimation, and provides asymptotic and Monte Carlo inference:
goodness-of-fit, curve- and AUC-equality tests, confidence ellipses and
pointwise confidence bands.

Quick start::

    import numpy as np
    from rocfit import (LabeledSample, empirical_roc, empirical_auc,
                        FitConfig, fit_mde)

    sample = LabeledSample(scores=np.array([0.2, 0.7, 0.4, 0.9]),
                           labels=np.array([0, 1, 0, 1]))
    curve = empirical_roc(sample)
    print(float(empirical_auc(curve)))
    fit = fit_mde(curve, FitConfig(family="beta2", constraint="concave"))
    print(fit.theta, fit.distance)
"""

from .empirical import (
    ConcavityDiagnostics,
    EmpiricalRoc,
    LabeledSample,
    PavResult,
    ThresholdTable,
    concave_hull,
    concavity_diagnostics,
    empirical_auc,
    empirical_roc,
    eval_roc,
    natural_identification_cdf,
    pav_calibrate,
    recalibrated_sample,
    simplify_vertices,
)
from .errors import BoundaryWarning, DataError, NumericalError
from .fitting import FitConfig, FitResult, fit_mde, l2_distance
from .inference import (
    ConfidenceEllipse,
    CovarianceEstimate,
    TestResult,
    asymptotic_covariance,
    auc_equality_test,
    auc_inference,
    confidence_band,
    confidence_ellipse,
    covariance_from_fit,
    curve_equality_test,
    gof_test,
    kernel_K,
)
from .models import (
    RocModel,
    auc_descriptor,
    bernstein_mixture,
    beta,
    beta4,
    beta_delta,
    beta_gamma,
    beta_mixture,
    binormal,
    is_concave,
    model_auc,
    model_from_dict,
    model_to_dict,
    param_gradient,
    roc_eval,
    roc_slope,
    sample_from_model,
)
from .numerics import (
    QuadratureRule,
    RandomStream,
    beta_quantile,
    gauss_legendre_01,
    graded_gauss_legendre,
    integrate,
    reg_inc_beta,
    std_normal,
)

__version__ = "0.1.0"
