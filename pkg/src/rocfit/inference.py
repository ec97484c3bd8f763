"""Asymptotic and Monte Carlo inference for minimum-distance ROC fits.

Large-sample theory
-------------------
With n0 class-0 and n1 class-1 observations, the scaled difference
between the empirical and the true model curve converges to the
Gaussian process sqrt(lambda) B1(R(p)) + R'(p) B2(p), where B1, B2 are
independent Brownian bridges and lambda = n0/n1.  Its covariance
function K drives the sandwich covariance C^{-1} A C^{-1} of the
minimum-distance estimator.

Normalization: the hit-rate bridge enters the difference process at
rate 1/sqrt(n1) = sqrt(lambda)/sqrt(n0) and the threshold bridge at
1/sqrt(n0), so C^{-1} A C^{-1} is the covariance of
sqrt(n0) * (estimate - truth).  The estimator covariance is therefore
C^{-1} A C^{-1} / n0; every downstream quantity (standard errors,
ellipses, bands, equality tests) uses that scaling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.stats import chi2 as chi2_dist

from .empirical import LabeledSample, empirical_roc
from .errors import DataError, NumericalError, BoundaryWarning
from .fitting import FitConfig, FitResult, fit_mde
from .models import (
    RocModel,
    model_auc,
    param_gradient,
    roc_eval,
    roc_slope,
    sample_from_model,
)
from .numerics import (
    QuadratureRule,
    RandomStream,
    gauss_legendre_01,
    norm_cdf,
    norm_pdf,
)

__all__ = [
    "CovarianceEstimate",
    "TestResult",
    "ConfidenceEllipse",
    "kernel_K",
    "a_matrix",
    "c_matrix",
    "asymptotic_covariance",
    "covariance_from_fit",
    "auc_inference",
    "confidence_ellipse",
    "confidence_band",
    "gof_test",
    "rank_p_value",
    "curve_equality_test",
    "auc_equality_test",
]

_P_FLOOR = 1e-300  # keep p-values inside (0, 1]


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovarianceEstimate:
    """Sandwich covariance of a minimum-distance fit.

    ``sigma`` is C^{-1} A C^{-1}, the covariance of
    sqrt(n0) * (estimate - truth); ``theta_covariance`` rescales it to
    the covariance of the estimate itself.
    """

    family: str
    theta: tuple[float, ...]
    a_matrix: np.ndarray
    c_matrix: np.ndarray
    sigma: np.ndarray
    lam: float
    n0: int
    n1: int
    nodes_1d: int
    nodes_2d: int

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @property
    def k(self) -> int:
        return self.sigma.shape[0]

    @property
    def theta_covariance(self) -> np.ndarray:
        """Covariance matrix of the parameter estimate."""
        return self.sigma / self.n0

    @property
    def scaled_sigma(self) -> np.ndarray:
        """Covariance of sqrt(n0 + n1) * (estimate - truth)."""
        return self.sigma * (self.n / self.n0)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "theta": list(self.theta),
            "a": self.a_matrix.tolist(),
            "c": self.c_matrix.tolist(),
            "sigma": self.sigma.tolist(),
            "lambda": self.lam,
            "n0": self.n0,
            "n1": self.n1,
            "nodes_1d": self.nodes_1d,
            "nodes_2d": self.nodes_2d,
        }


@dataclass(frozen=True)
class TestResult:
    """Outcome of a hypothesis test.

    ``null`` names the reference distribution: ``chi_square`` (with
    ``dof``), ``normal``, or ``monte_carlo_rank`` (with the replicate
    distances attached when kept).
    """

    statistic: float
    null: str
    p_value: float
    dof: int | None = None
    replicates: tuple[float, ...] | None = None
    warnings: int = 0

    def to_dict(self) -> dict:
        out = {
            "statistic": self.statistic,
            "null": self.null,
            "p_value": self.p_value,
            "warnings": self.warnings,
        }
        if self.dof is not None:
            out["dof"] = self.dof
        if self.replicates is not None:
            out["replicates"] = list(self.replicates)
        return out


@dataclass(frozen=True)
class ConfidenceEllipse:
    """Closed elliptical contour in parameter space with concavity flags."""

    points: np.ndarray        # (n, 2) parameter points
    concave: np.ndarray       # (n,) True where the point is a concave model
    level: float


# ---------------------------------------------------------------------------
# Covariance kernel and sandwich matrices
# ---------------------------------------------------------------------------

def kernel_K(model: RocModel, lam: float, s, t):
    """Covariance function of the limiting difference process.

    K(s,t) = lam * (min(R(s), R(t)) - R(s) R(t))
             + R'(s) R'(t) * (min(s, t) - s t),
    for s, t strictly inside (0, 1) and lam = n0/n1 > 0.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    rs, rt = roc_eval(model, s), roc_eval(model, t)
    ds, dt = roc_slope(model, s), roc_slope(model, t)
    out = lam * (np.minimum(rs, rt) - rs * rt) + ds * dt * (np.minimum(s, t) - s * t)
    return float(out) if np.ndim(out) == 0 else out


def _gradient_rows(model: RocModel, constraint: str, p: np.ndarray) -> np.ndarray:
    grad = param_gradient(model, p)
    if model.family == "binormal" and constraint == "concave":
        return grad[:1]  # sigma fixed at 1: only mu varies
    return grad


def _check_interior(model: RocModel, constraint: str) -> None:
    eps = 1e-8
    if model.family == "binormal":
        mu, sigma = model.theta
        if constraint == "concave" and abs(sigma - 1.0) > 1e-12:
            raise ValueError("a concavity-constrained binormal fit must have sigma = 1")
        if mu < eps:
            raise NumericalError(
                "estimate sits on the boundary mu = 0; interior asymptotics "
                "do not apply (use the Monte Carlo goodness-of-fit test)"
            )
        return
    if model.family == "beta2":
        alpha, beta_ = model.theta
        if alpha < eps or beta_ < eps:
            raise NumericalError(
                "estimate sits on the edge of the positive quadrant; interior "
                "asymptotics do not apply"
            )
        if constraint == "concave":
            if alpha > 1.0 or beta_ < 2.0 - alpha:
                raise ValueError("estimate violates the concavity constraint")
            if 1.0 - alpha < eps or beta_ - (2.0 - alpha) < eps:
                raise NumericalError(
                    "concavity-constrained estimate is boundary-active "
                    "(alpha = 1 or beta = 2 - alpha); interior asymptotics do "
                    "not apply - use the Monte Carlo goodness-of-fit test"
                )
        return
    raise ValueError(
        f"asymptotic covariance supports binormal and beta2 fits, not {model.family!r}"
    )


def c_matrix(
    model: RocModel,
    *,
    constraint: str = "unrestricted",
    rule: QuadratureRule | None = None,
) -> np.ndarray:
    """Gram matrix of the parameter gradients, C_ij = int R_i R_j dp."""
    r = rule if rule is not None else gauss_legendre_01(256)
    g = _gradient_rows(model, constraint, r.nodes)
    out = (g * r.weights) @ g.T
    return 0.5 * (out + out.T)


def a_matrix(
    model: RocModel,
    lam: float,
    *,
    constraint: str = "unrestricted",
    rule: QuadratureRule | None = None,
) -> np.ndarray:
    """Kernel-weighted gradient matrix A_ij = int int R_i K R_j ds dt.

    Uses the tensor product of ``rule`` with itself.
    """
    r = rule if rule is not None else gauss_legendre_01(64)
    g = _gradient_rows(model, constraint, r.nodes)
    s_mesh, t_mesh = np.meshgrid(r.nodes, r.nodes, indexing="ij")
    k_mesh = kernel_K(model, lam, s_mesh, t_mesh)
    wg = (r.weights[None, :] * g).T            # (nodes, k)
    out = wg.T @ k_mesh @ wg
    return 0.5 * (out + out.T)


def asymptotic_covariance(
    model: RocModel,
    n0: int,
    n1: int,
    *,
    constraint: str = "unrestricted",
    rule_1d: QuadratureRule | None = None,
    rule_2d: QuadratureRule | None = None,
) -> CovarianceEstimate:
    """Sandwich covariance C^{-1} A C^{-1} at the fitted parameters.

    C is the Gram matrix of the parameter gradients; A adds the kernel
    K between them (2-D tensor quadrature).  The class ratio
    lam = n0/n1 is plugged in as given; a warning is attached when it
    is >= 1, where the classical asymptotic scenario is stretched but
    every formula remains well defined.

    Raises
    ------
    NumericalError
        If the estimate is boundary-active (interior asymptotics do not
        apply) or C is not positive definite.
    """
    if n0 < 1 or n1 < 1:
        raise DataError("both class counts must be positive")
    _check_interior(model, constraint)
    lam = n0 / n1
    if lam >= 1.0:
        warnings.warn(
            f"class ratio n0/n1 = {lam:.3g} >= 1: the asymptotic scenario "
            "assumes more class-1 than class-0 observations; results remain "
            "well defined",
            BoundaryWarning,
            stacklevel=2,
        )
    r1 = rule_1d if rule_1d is not None else gauss_legendre_01(256)
    r2 = rule_2d if rule_2d is not None else gauss_legendre_01(64)

    c_mat = c_matrix(model, constraint=constraint, rule=r1)
    a_mat = a_matrix(model, lam, constraint=constraint, rule=r2)

    try:
        cho = linalg.cho_factor(c_mat)
    except linalg.LinAlgError as err:
        raise NumericalError(f"C matrix is not positive definite: {err}") from err
    sigma = linalg.cho_solve(cho, linalg.cho_solve(cho, a_mat).T)
    sigma = 0.5 * (sigma + sigma.T)

    return CovarianceEstimate(
        family=model.family,
        theta=model.theta,
        a_matrix=a_mat,
        c_matrix=c_mat,
        sigma=sigma,
        lam=lam,
        n0=int(n0),
        n1=int(n1),
        nodes_1d=r1.n,
        nodes_2d=r2.n,
    )


def covariance_from_fit(fit: FitResult, n0: int, n1: int, **kwargs) -> CovarianceEstimate:
    """Covariance for a finished fit, refusing boundary-active estimates."""
    if fit.boundary:
        raise NumericalError(
            f"fit is boundary-active ({', '.join(fit.boundary)}); interior "
            "asymptotics do not apply - use the Monte Carlo goodness-of-fit test"
        )
    return asymptotic_covariance(fit.model, n0, n1, constraint=fit.constraint, **kwargs)


# ---------------------------------------------------------------------------
# Delta-method AUC inference
# ---------------------------------------------------------------------------

def _auc_gradient(model: RocModel, k: int) -> np.ndarray:
    if model.family == "binormal":
        mu, sigma = model.theta
        h = np.hypot(1.0, sigma)
        phi = norm_pdf(mu / h)
        g = np.array([phi / h, -mu * sigma * phi / h**3])
        return g[:k]
    if model.family == "beta2":
        a, b = model.theta
        return np.array([-b / (a + b) ** 2, a / (a + b) ** 2])
    raise ValueError(f"closed-form AUC gradient needs binormal or beta2, not {model.family!r}")


def auc_inference(model: RocModel, cov: CovarianceEstimate) -> tuple[float, float]:
    """AUC of the fitted model and its delta-method standard error."""
    g = _auc_gradient(model, cov.k)
    se = float(np.sqrt(g @ cov.theta_covariance @ g))
    return model_auc(model), se


# ---------------------------------------------------------------------------
# Confidence sets
# ---------------------------------------------------------------------------

def _concave_region_flag(family: str, pts: np.ndarray) -> np.ndarray:
    """Concavity (and domain validity) of raw parameter points."""
    if family == "binormal":
        return (pts[:, 0] >= 0) & (np.abs(pts[:, 1] - 1.0) <= 1e-12)
    a, b = pts[:, 0], pts[:, 1]
    return (a > 0) & (a <= 1.0) & (b >= 1.0)


def confidence_ellipse(
    theta_hat,
    cov: CovarianceEstimate,
    level: float,
    *,
    n_points: int = 360,
) -> ConfidenceEllipse:
    """Elliptical parameter contour at the given confidence level.

    The contour collects the points theta with
    (theta - theta_hat)' V^{-1} (theta - theta_hat) = q, where V is the
    estimator covariance and q the chi-square(2) quantile of ``level``.
    Each point carries a flag marking whether it corresponds to a
    concave (and domain-valid) model.
    """
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if cov.k != 2 or theta_hat.shape != (2,):
        raise ValueError("confidence ellipses are defined for two-parameter fits")
    if not 0.0 <= level < 1.0:
        raise ValueError("level must lie in [0, 1)")
    try:
        chol = np.linalg.cholesky(cov.theta_covariance)
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"covariance is singular: {err}") from err
    q = chi2_dist.ppf(level, df=2)
    angles = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    circle = np.stack([np.cos(angles), np.sin(angles)])
    pts = theta_hat[None, :] + np.sqrt(q) * (chol @ circle).T
    return ConfidenceEllipse(
        points=pts,
        concave=_concave_region_flag(cov.family, pts),
        level=level,
    )


def _domain_mask(family: str, pts: np.ndarray) -> np.ndarray:
    if family == "binormal":
        return (pts[:, 0] >= 0.0) & (pts[:, 1] > 0.0)
    ok = (pts[:, 0] > 0.0) & (pts[:, 1] > 0.0)
    if family in ("beta3_gamma", "beta4"):
        ok &= (pts[:, 2] >= 0.0) & (pts[:, 2] <= 1.0)
    if family == "beta3_delta":
        ok &= (pts[:, 2] > 0.0) & (pts[:, 2] <= 1.0)
    if family == "beta4":
        ok &= (pts[:, 3] > 0.0) & (pts[:, 3] <= 1.0)
    return ok


def confidence_band(
    model: RocModel,
    cov: CovarianceEstimate,
    grid,
    level: float,
    draws: int,
    rng: RandomStream,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise confidence band for the fitted curve.

    Samples parameter vectors from the normal approximation around the
    estimate, rejects draws outside the family domain, and returns the
    pointwise (1 -+ level)/2 quantile envelope of the sampled curves on
    the grid.  Aborts if more than half of the draws get rejected.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if draws < 2:
        raise ValueError("need at least two draws")
    grid = np.asarray(grid, dtype=np.float64)
    theta_hat = np.asarray(model.theta)
    k = theta_hat.shape[0]
    if cov.k != k:
        raise ValueError("covariance dimension does not match the model")
    chol = np.linalg.cholesky(cov.theta_covariance + 1e-30 * np.eye(k))
    gen = rng.generator()
    accepted: list[np.ndarray] = []
    total = 0
    while len(accepted) < draws:
        z = gen.standard_normal((draws, k))
        cand = theta_hat[None, :] + z @ chol.T
        keep = _domain_mask(model.family, cand)
        accepted.extend(cand[keep])
        total += draws
        if total - len(accepted) > 0.5 * total:
            raise NumericalError(
                "more than half of the parameter draws fall outside the family "
                "domain; the estimate is too close to a boundary for a "
                "normal-approximation band"
            )
    thetas = np.asarray(accepted[:draws])
    curves = np.empty((draws, grid.size))
    for i in range(draws):
        curves[i] = roc_eval(RocModel(model.family, tuple(thetas[i])), grid)
    lo, hi = np.quantile(curves, [(1.0 - level) / 2.0, (1.0 + level) / 2.0], axis=0)
    return lo, hi


# ---------------------------------------------------------------------------
# Monte Carlo goodness of fit
# ---------------------------------------------------------------------------

def rank_p_value(d_data: float, replicates) -> float:
    """Rank-based Monte Carlo p-value.

    p = (#{replicates >= d_data} + 1) / (M + 1); equals 1/(M+1) when the
    data distance exceeds every replicate and 1 when it is below all of
    them.
    """
    replicates = list(replicates)
    count = sum(1 for d in replicates if d_data <= d)
    return (count + 1) / (len(replicates) + 1)


def _gof_replicate(
    m: int,
    rng: RandomStream,
    model_data: RocModel,
    theta_data: tuple[float, ...],
    n0: int,
    n1: int,
    config: FitConfig,
) -> tuple[float, int]:
    stream = rng.substream(m)
    sim = sample_from_model(model_data, n0, n1, stream)
    fit = fit_mde(empirical_roc(sim), config, extra_starts=(theta_data,))
    if fit.converged:
        return fit.distance, 0
    sim = sample_from_model(model_data, n0, n1, stream.substream(1))
    fit = fit_mde(empirical_roc(sim), config, extra_starts=(theta_data,))
    return fit.distance, 1


def gof_test(
    sample: LabeledSample,
    config: FitConfig,
    M: int,
    rng: RandomStream,
    *,
    n_jobs: int = 1,
    keep_replicates: bool = True,
) -> TestResult:
    """Monte Carlo goodness-of-fit test for a parametric model class.

    Fits the model to the data, then for each of M replicates draws a
    sample of the same class sizes from the fitted model, refits within
    the same class, and records the replicate's achieved distance.  The
    p-value is rank-based:

        p = (#{replicates with d_data <= d_m} + 1) / (M + 1).

    A replicate whose refit fails to converge is redrawn once and then
    counted with its best achieved distance; such events are tallied in
    ``warnings``.  Replicates own independent substreams of ``rng``, so
    the result does not depend on the execution schedule or ``n_jobs``.
    """
    sample.require_both_classes()
    if M < 19:
        raise DataError("at least 19 Monte Carlo replicates are required")
    curve = empirical_roc(sample)
    fit_data = fit_mde(curve, config)
    d_data = fit_data.distance
    args = (rng, fit_data.model, fit_data.theta, curve.n0, curve.n1, config)
    if n_jobs == 1:
        results = [_gof_replicate(m, *args) for m in range(1, M + 1)]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(_gof_replicate)(m, *args) for m in range(1, M + 1)
        )
    distances = [d for d, _ in results]
    redraws = sum(r for _, r in results)
    p = rank_p_value(d_data, distances)
    return TestResult(
        statistic=d_data,
        null="monte_carlo_rank",
        p_value=p,
        replicates=tuple(distances) if keep_replicates else None,
        warnings=redraws,
    )


# ---------------------------------------------------------------------------
# Two-sample equality tests (independent samples)
# ---------------------------------------------------------------------------

def curve_equality_test(
    fit_a: FitResult,
    cov_a: CovarianceEstimate,
    fit_b: FitResult,
    cov_b: CovarianceEstimate,
) -> TestResult:
    """Chi-square test of equal ROC curves from two independent samples.

    Under an identifiable family, equal curves mean equal parameters;
    the statistic is the squared norm of the covariance-normalized
    difference of the two estimates, referred to chi-square(k).
    """
    if fit_a.family != fit_b.family:
        raise ValueError("curve equality requires fits from the same family")
    if fit_a.constraint != fit_b.constraint:
        raise ValueError("curve equality requires the same constraint mode")
    delta = np.asarray(fit_a.theta) - np.asarray(fit_b.theta)
    pooled = cov_a.theta_covariance + cov_b.theta_covariance
    try:
        stat = float(delta @ linalg.solve(pooled, delta, assume_a="pos"))
    except linalg.LinAlgError as err:
        raise NumericalError(f"pooled covariance is singular: {err}") from err
    k = delta.shape[0]
    p = max(float(chi2_dist.sf(stat, df=k)), _P_FLOOR)
    return TestResult(statistic=stat, null="chi_square", p_value=p, dof=k)


def auc_equality_test(
    fit_a: FitResult,
    cov_a: CovarianceEstimate,
    fit_b: FitResult,
    cov_b: CovarianceEstimate,
) -> TestResult:
    """Two-sided z-test of equal AUC values from two independent samples.

    The families may differ; AUC values are comparable across them.
    """
    auc_a, se_a = auc_inference(fit_a.model, cov_a)
    auc_b, se_b = auc_inference(fit_b.model, cov_b)
    denom = np.hypot(se_a, se_b)
    diff = auc_a - auc_b
    if denom == 0.0:
        z = 0.0 if diff == 0.0 else np.inf * np.sign(diff)
    else:
        z = diff / denom
    p = max(float(2.0 * norm_cdf(-abs(z))), _P_FLOOR)
    return TestResult(statistic=float(z), null="normal", p_value=p)
