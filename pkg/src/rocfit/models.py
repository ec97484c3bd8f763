"""Parametric ROC curve families.

Families
--------
``binormal``      R(p) = Phi(mu + sigma * Phi^{-1}(p)),  mu >= 0, sigma > 0
``beta2``         R(p) = I_p(alpha, beta) (regularized incomplete beta CDF)
``beta3_gamma``   vertical straight edge of height gamma added to beta2
``beta3_delta``   horizontal straight edge from FAR = delta
``beta4``         both edges: R(p) = gamma + (1-gamma) * I_{p/delta}(alpha, beta)
``beta_mixture``  convex combination of beta2 curves

All models are immutable values; every operation except sampling is a
pure function.  The sampling realization puts class-0 scores on the
standard uniform and class-1 scores on the natural-identification CDF
(binormal models use the obvious two-normal realization instead).
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass

import numpy as np

from .empirical import LabeledSample
from .errors import BoundaryWarning
from .numerics import (
    RandomStream,
    beta_pdf,
    beta_quantile,
    graded_gauss_legendre,
    norm_cdf,
    norm_pdf,
    norm_quantile,
    reg_inc_beta,
)

__all__ = [
    "RocModel",
    "FAMILIES",
    "binormal",
    "beta",
    "beta_gamma",
    "beta_delta",
    "beta4",
    "beta_mixture",
    "roc_eval",
    "roc_slope",
    "model_auc",
    "auc_descriptor",
    "is_concave",
    "sample_from_model",
    "param_gradient",
    "bernstein_mixture",
    "model_to_dict",
    "model_from_dict",
]

FAMILIES = ("binormal", "beta2", "beta3_gamma", "beta3_delta", "beta4", "beta_mixture")

# parameter names per family, in theta order
PARAM_NAMES = {
    "binormal": ("mu", "sigma"),
    "beta2": ("alpha", "beta"),
    "beta3_gamma": ("alpha", "beta", "gamma"),
    "beta3_delta": ("alpha", "beta", "delta"),
    "beta4": ("alpha", "beta", "gamma", "delta"),
}


@dataclass(frozen=True)
class RocModel:
    """A model family tag plus its parameter vector.

    For ``beta_mixture`` the vector holds the flattened component pairs
    (alpha_1, beta_1, alpha_2, beta_2, ...) and ``weights`` carries the
    mixture weights; ``weights`` is None for every other family.
    """

    family: str
    theta: tuple[float, ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        _validate(self)

    @property
    def k(self) -> int:
        """Dimension of the parameter vector."""
        return len(self.theta)

    @property
    def components(self) -> tuple[tuple[float, float], ...]:
        if self.family != "beta_mixture":
            raise ValueError("components are defined for beta_mixture only")
        it = iter(self.theta)
        return tuple(zip(it, it))


def _validate(model: RocModel) -> None:
    fam, th = model.family, model.theta
    if fam not in FAMILIES:
        raise ValueError(f"unknown family {fam!r}; expected one of {FAMILIES}")
    if fam == "beta_mixture":
        if model.weights is None or len(model.weights) == 0:
            raise ValueError("beta_mixture requires weights")
        if len(th) != 2 * len(model.weights):
            raise ValueError("theta must hold one (alpha, beta) pair per weight")
        if any(w < 0 for w in model.weights):
            raise ValueError("mixture weights must be nonnegative")
        if abs(sum(model.weights) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        if any(a <= 0 or b <= 0 for a, b in model.components):
            raise ValueError("mixture component shapes must be positive")
        return
    if model.weights is not None:
        raise ValueError(f"weights are only valid for beta_mixture, not {fam!r}")
    if len(th) != len(PARAM_NAMES[fam]):
        raise ValueError(
            f"{fam} expects {len(PARAM_NAMES[fam])} parameters, got {len(th)}"
        )
    if fam == "binormal":
        mu, sigma = th
        if mu < 0:
            raise ValueError("binormal requires mu >= 0")
        if sigma <= 0:
            raise ValueError("binormal requires sigma > 0")
        return
    alpha, beta_ = th[0], th[1]
    if alpha <= 0 or beta_ <= 0:
        raise ValueError("beta families require alpha > 0 and beta > 0")
    if fam in ("beta3_gamma", "beta4"):
        gamma = th[2]
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
    if fam == "beta3_delta":
        delta = th[2]
        if not 0.0 < delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")
    if fam == "beta4":
        delta = th[3]
        if not 0.0 < delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")


# -- factories ---------------------------------------------------------------

def binormal(mu: float, sigma: float) -> RocModel:
    return RocModel("binormal", (mu, sigma))


def beta(alpha: float, beta_: float) -> RocModel:
    return RocModel("beta2", (alpha, beta_))


def beta_gamma(alpha: float, beta_: float, gamma: float) -> RocModel:
    return RocModel("beta3_gamma", (alpha, beta_, gamma))


def beta_delta(alpha: float, beta_: float, delta: float) -> RocModel:
    return RocModel("beta3_delta", (alpha, beta_, delta))


def beta4(alpha: float, beta_: float, gamma: float, delta: float) -> RocModel:
    return RocModel("beta4", (alpha, beta_, gamma, delta))


def beta_mixture(weights, components) -> RocModel:
    theta = tuple(float(x) for pair in components for x in pair)
    return RocModel("beta_mixture", theta, weights=tuple(float(w) for w in weights))


def _edges(model: RocModel) -> tuple[float, float, float, float]:
    """Return (alpha, beta, gamma, delta) with edge defaults filled in."""
    th = model.theta
    if model.family == "beta2":
        return th[0], th[1], 0.0, 1.0
    if model.family == "beta3_gamma":
        return th[0], th[1], th[2], 1.0
    if model.family == "beta3_delta":
        return th[0], th[1], 0.0, th[2]
    return th[0], th[1], th[2], th[3]


# ---------------------------------------------------------------------------
# Curve evaluation
# ---------------------------------------------------------------------------

def roc_eval(model: RocModel, p):
    """Evaluate the model ROC curve at p in [0, 1] (scalar or array).

    Endpoint conventions R(0) = 0 and R(1) = 1 are applied explicitly;
    straight-edge families return 1 for p >= delta.
    """
    p_arr = np.asarray(p, dtype=np.float64)
    scalar = p_arr.ndim == 0
    p_arr = np.atleast_1d(p_arr)
    if np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
        raise ValueError("p must lie in [0, 1]")
    out = np.empty_like(p_arr)
    inner = (p_arr > 0.0) & (p_arr < 1.0)
    out[p_arr == 0.0] = 0.0
    out[p_arr == 1.0] = 1.0
    q = p_arr[inner]
    if model.family == "binormal":
        mu, sigma = model.theta
        out[inner] = norm_cdf(mu + sigma * norm_quantile(q))
    elif model.family == "beta_mixture":
        acc = np.zeros_like(q)
        for w, (a, b) in zip(model.weights, model.components):
            acc += w * reg_inc_beta(a, b, q)
        out[inner] = acc
    else:
        a, b, gamma, delta = _edges(model)
        vals = np.full_like(q, 1.0)
        below = q < delta
        vals[below] = gamma + (1.0 - gamma) * reg_inc_beta(a, b, q[below] / delta)
        out[inner] = vals
    return float(out[0]) if scalar else out


def roc_slope(model: RocModel, p):
    """Derivative of the model curve in p, for p strictly inside (0, 1).

    May diverge as p -> 0 when alpha < 1; callers integrate against
    factors that vanish there.  Straight-edge families return 0 on the
    horizontal edge p >= delta.
    """
    p_arr = np.asarray(p, dtype=np.float64)
    scalar = p_arr.ndim == 0
    p_arr = np.atleast_1d(p_arr)
    if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise ValueError("slope is defined for p strictly inside (0, 1)")
    if model.family == "binormal":
        mu, sigma = model.theta
        z = norm_quantile(p_arr)
        out = sigma * norm_pdf(mu + sigma * z) / norm_pdf(z)
    elif model.family == "beta_mixture":
        out = np.zeros_like(p_arr)
        for w, (a, b) in zip(model.weights, model.components):
            out += w * beta_pdf(a, b, p_arr)
    else:
        a, b, gamma, delta = _edges(model)
        out = np.zeros_like(p_arr)
        below = p_arr < delta
        out[below] = (1.0 - gamma) / delta * beta_pdf(a, b, p_arr[below] / delta)
    return float(out[0]) if scalar else out


def model_auc(model: RocModel) -> float:
    """Area under the model curve.

    Closed form for binormal, beta2, and mixtures; the straight-edge
    families are integrated numerically (a graded rule keeps the
    endpoint behaviour accurate for small alpha).
    """
    if model.family == "binormal":
        mu, sigma = model.theta
        return float(norm_cdf(mu / np.hypot(1.0, sigma)))
    if model.family == "beta2":
        a, b = model.theta
        return b / (a + b)
    if model.family == "beta_mixture":
        return float(sum(w * b / (a + b) for w, (a, b) in zip(model.weights, model.components)))
    rule = graded_gauss_legendre()
    _, _, _, delta = _edges(model)
    if delta < 1.0:
        # kink at p = delta: integrate the curved part on (0, delta) only
        return float(roc_eval(model, delta * rule.nodes) @ rule.weights) * delta + (1.0 - delta)
    return float(roc_eval(model, rule.nodes) @ rule.weights)


_AUC_BOUNDS = (0.50, 0.65, 0.75, 0.85, 0.95, 0.99)
_AUC_LABELS = (
    "abysmal", "weak", "moderate", "substantial", "strong",
    "very strong", "nearly perfect",
)


def auc_descriptor(auc: float) -> str:
    """Verbal label for the potential predictive strength of an AUC value.

    Intervals are read as (low, high]; values of 0.50 or below are
    "abysmal", values strictly above 0.99 "nearly perfect".
    """
    return _AUC_LABELS[bisect.bisect_left(_AUC_BOUNDS, auc)]


def is_concave(model: RocModel) -> bool:
    """Whether the model curve is concave (exact geometric condition).

    Binormal curves are concave only for sigma = 1 (within 1e-12).  A
    beta curve is concave exactly when its density is nonincreasing:
    the log-density slope has the sign of (alpha-1) + (2-alpha-beta)x,
    linear in x with endpoint values alpha-1 and 1-beta, so the
    condition is alpha <= 1 and beta >= 1 on the core shape (straight
    edges preserve concavity).  For mixtures the component condition is
    checked component-wise, which is sufficient.

    Note the concavity-constrained *fitting* subfamily is the smaller
    published region beta >= 2 - alpha; see :class:`rocfit.FitConfig`.
    """
    if model.family == "binormal":
        return abs(model.theta[1] - 1.0) <= 1e-12
    if model.family == "beta_mixture":
        return all(a <= 1.0 and b >= 1.0 for a, b in model.components)
    a, b = model.theta[0], model.theta[1]
    return a <= 1.0 and b >= 1.0


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_from_model(model: RocModel, n0: int, n1: int, rng: RandomStream) -> LabeledSample:
    """Draw a labeled sample whose population ROC curve is the model curve.

    Binormal: class 0 is standard normal and class 1 is
    normal(mu/sigma, 1/sigma^2).  Beta families use the natural
    identification: class 0 standard uniform, class 1 by inverse
    transform of 1 - R(1 - x), with the gamma edge realized as an atom
    at x = 1 and the delta edge compressing class-1 support to
    [1 - delta, 1].
    """
    if n0 < 1 or n1 < 1:
        raise ValueError("both class sizes must be at least 1")
    gen = rng.generator()
    if model.family == "binormal":
        mu, sigma = model.theta
        x0 = gen.standard_normal(n0)
        x1 = mu / sigma + gen.standard_normal(n1) / sigma
    else:
        x0 = gen.uniform(size=n0)
        u = gen.uniform(size=n1)
        x1 = _class1_quantile(model, u, gen)
    scores = np.concatenate([x0, x1])
    labels = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    return LabeledSample(scores=scores, labels=labels)


def _class1_quantile(model: RocModel, u: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Inverse of the natural-identification class-1 CDF at u in (0, 1)."""
    if model.family == "beta_mixture":
        comp = gen.choice(len(model.weights), size=u.shape[0], p=np.asarray(model.weights))
        out = np.empty_like(u)
        for k, (a, b) in enumerate(model.components):
            mask = comp == k
            out[mask] = 1.0 - beta_quantile(a, b, 1.0 - u[mask])
        return out
    a, b, gamma, delta = _edges(model)
    v = 1.0 - u
    out = np.ones_like(u)             # the gamma edge is an atom at x = 1
    body = v > gamma
    core = (v[body] - gamma) / (1.0 - gamma) if gamma > 0.0 else v[body]
    out[body] = 1.0 - delta * beta_quantile(a, b, core)
    return out


# ---------------------------------------------------------------------------
# Parameter gradients
# ---------------------------------------------------------------------------

# relative step for finite differences in theta
_FD_SCALE = 1e-5

# lower domain bounds per parameter (upper bounds: gamma <= 1, delta <= 1)
_LOWER_BOUNDS = {"mu": 0.0, "sigma": 0.0, "alpha": 0.0, "beta": 0.0, "gamma": 0.0, "delta": 0.0}
_UPPER_BOUNDS = {"gamma": 1.0, "delta": 1.0}


def param_gradient(model: RocModel, p) -> np.ndarray:
    """Partial derivatives of the curve with respect to theta at p.

    Returns an array of shape (k,) for scalar p, else (k, len(p)).
    Binormal partials are closed form; beta-family partials use central
    finite differences with step 1e-5 * max(1, |theta_i|), shrunk to a
    one-sided difference (with a warning) near a domain boundary.
    Requires p strictly inside (0, 1) and theta strictly interior.
    """
    p_arr = np.asarray(p, dtype=np.float64)
    scalar = p_arr.ndim == 0
    p_arr = np.atleast_1d(p_arr)
    if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise ValueError("gradients are defined for p strictly inside (0, 1)")
    if model.family == "binormal":
        mu, sigma = model.theta
        z = norm_quantile(p_arr)
        phi = norm_pdf(mu + sigma * z)
        grad = np.stack([phi, z * phi])
        return grad[:, 0] if scalar else grad
    if model.family == "beta_mixture":
        raise ValueError("parameter gradients are not defined for beta_mixture")
    names = PARAM_NAMES[model.family]
    grad = np.empty((model.k, p_arr.shape[0]))
    for i, name in enumerate(names):
        ti = model.theta[i]
        h = _FD_SCALE * max(1.0, abs(ti))
        lo_ok = ti - h > _LOWER_BOUNDS[name]
        hi_ok = name not in _UPPER_BOUNDS or ti + h < _UPPER_BOUNDS[name]
        if lo_ok and hi_ok:
            up = _shift(model, i, ti + h)
            dn = _shift(model, i, ti - h)
            grad[i] = (roc_eval(up, p_arr) - roc_eval(dn, p_arr)) / (2.0 * h)
        else:
            warnings.warn(
                f"{name}={ti} within {h} of its domain boundary; "
                "using a one-sided difference",
                BoundaryWarning,
                stacklevel=2,
            )
            if lo_ok:
                dn = _shift(model, i, ti - h)
                grad[i] = (roc_eval(model, p_arr) - roc_eval(dn, p_arr)) / h
            else:
                up = _shift(model, i, ti + h)
                grad[i] = (roc_eval(up, p_arr) - roc_eval(model, p_arr)) / h
    return grad[:, 0] if scalar else grad


def _shift(model: RocModel, i: int, value: float) -> RocModel:
    theta = list(model.theta)
    theta[i] = value
    return RocModel(model.family, tuple(theta))


# ---------------------------------------------------------------------------
# Bernstein beta mixtures
# ---------------------------------------------------------------------------

def bernstein_mixture(slope, n: int) -> RocModel:
    """Order-n beta-mixture approximation built from curve slope samples.

    ``slope(q)`` must return the curve derivative at 1 - q (equivalently
    the natural-identification density at q), finite on [0, 1].  The
    sampled weights, normalized, put mass slope(k/n) on the component
    for k = 0..n; the raw construction approximates the
    natural-identification CDF, and the returned mixture is its exact
    reflection (component shapes swapped to Beta(n-k+1, k+1), using
    I_x(a,b) = 1 - I_{1-x}(b,a)), so the mixture curve converges
    uniformly to the target ROC curve as n grows.  Order 0 yields the
    single component Beta(1, 1), i.e. the diagonal.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    nodes = np.array([0.0]) if n == 0 else np.arange(n + 1) / n
    f = np.asarray([float(slope(q)) for q in nodes])
    if not np.all(np.isfinite(f)):
        q_bad = nodes[~np.isfinite(f)][0]
        raise ValueError(f"slope sample at q={q_bad} is not finite")
    if np.any(f < 0.0):
        raise ValueError("slope samples must be nonnegative")
    if n == 0:
        weights = np.array([1.0])
    else:
        total = float(f.sum())
        if total <= 0.0:
            raise ValueError("slope samples are identically zero")
        weights = f / total
    components = [(n - k + 1.0, k + 1.0) for k in range(n + 1)]
    return beta_mixture(weights, components)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def model_to_dict(model: RocModel) -> dict:
    out = {"family": model.family, "theta": list(model.theta)}
    if model.weights is not None:
        out["weights"] = list(model.weights)
    return out


def model_from_dict(d: dict) -> RocModel:
    weights = d.get("weights")
    return RocModel(
        d["family"],
        tuple(d["theta"]),
        weights=None if weights is None else tuple(weights),
    )
