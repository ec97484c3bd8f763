"""Tests for covariance estimation, confidence sets, and hypothesis tests."""

import warnings

import numpy as np
import pytest

from rocfit import (
    BoundaryWarning,
    CovarianceEstimate,
    DataError,
    FitConfig,
    FitResult,
    NumericalError,
    RandomStream,
    asymptotic_covariance,
    auc_equality_test,
    auc_inference,
    beta,
    binormal,
    confidence_band,
    confidence_ellipse,
    covariance_from_fit,
    curve_equality_test,
    gof_test,
    kernel_K,
    sample_from_model,
)
from rocfit.inference import _auc_gradient, c_matrix, rank_p_value
from rocfit.models import roc_eval

C_MUMU_01 = 0.091888149236965342   # 1/(2*pi*sqrt(3))
CHI2_2_95 = 5.991464547107982
G_MU_01 = 0.28209479177387814      # phi(0)/sqrt(2)


def make_fit(family, theta, constraint="unrestricted", distance=0.02):
    return FitResult(
        family=family, constraint=constraint, theta=tuple(theta),
        distance=distance, converged=True, boundary=(),
        iterations=10, nfev=50, restarts=1,
    )


def make_cov(family, theta, sigma, n0, n1):
    sigma = np.asarray(sigma, dtype=float)
    k = sigma.shape[0]
    return CovarianceEstimate(
        family=family, theta=tuple(theta), a_matrix=sigma, c_matrix=np.eye(k),
        sigma=sigma, lam=n0 / n1, n0=n0, n1=n1, nodes_1d=256, nodes_2d=64,
    )


class TestKernel:
    def test_identity_model_value(self):
        model = beta(1.0, 1.0)
        assert kernel_K(model, 1.0, 0.5, 0.5) == pytest.approx(0.5, abs=1e-14)
        s, t = 0.3, 0.7
        expected = 2.0 * (min(s, t) - s * t)
        assert kernel_K(model, 1.0, s, t) == pytest.approx(expected, abs=1e-14)

    def test_symmetry_and_nonnegative_diagonal(self):
        model = beta(0.8, 2.5)
        rng = np.random.default_rng(0)
        s = rng.uniform(0.01, 0.99, 25)
        t = rng.uniform(0.01, 0.99, 25)
        assert np.allclose(kernel_K(model, 0.7, s, t), kernel_K(model, 0.7, t, s))
        assert np.all(kernel_K(model, 0.7, s, s) >= 0.0)

    def test_vanishes_toward_origin(self):
        model = binormal(1.0, 1.2)
        vals = [kernel_K(model, 1.0, s, s) for s in (1e-3, 1e-5, 1e-7)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-4

    def test_gram_positive_semidefinite(self):
        rng = np.random.default_rng(1)
        for model in (beta(0.8, 2.5), binormal(1.0, 1.2)):
            s = np.sort(rng.uniform(0.02, 0.98, 40))
            gram = kernel_K(model, 0.5, s[:, None], s[None, :])
            eigs = np.linalg.eigvalsh(0.5 * (gram + gram.T))
            assert eigs.min() >= -1e-9


class TestCovariance:
    def test_binormal_gram_closed_forms(self):
        # at (mu, sigma) = (0, 1): C_mumu = 1/(2 pi sqrt 3), C_musigma = 0
        c = c_matrix(binormal(0.0, 1.0))
        assert c[0, 0] == pytest.approx(C_MUMU_01, abs=1e-9)
        assert c[0, 1] == pytest.approx(0.0, abs=1e-9)

    def test_matrix_invariants(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            cov = asymptotic_covariance(beta(0.8, 2.5), 1000, 1000)
        assert np.allclose(cov.a_matrix, cov.a_matrix.T)
        assert np.allclose(cov.c_matrix, cov.c_matrix.T)
        assert np.linalg.eigvalsh(cov.c_matrix).min() > 0
        assert np.linalg.eigvalsh(cov.sigma).min() >= -1e-12
        assert cov.lam == 1.0 and cov.n == 2000

    def test_scaling_relations(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            cov = asymptotic_covariance(binormal(1.0, 1.2), 600, 400)
        assert np.allclose(cov.theta_covariance, cov.sigma / 600)
        assert np.allclose(cov.scaled_sigma, cov.sigma * 1000 / 600)

    def test_lambda_warning(self):
        with pytest.warns(BoundaryWarning, match="n0/n1"):
            asymptotic_covariance(beta(0.8, 2.5), 500, 500)

    def test_boundary_refusals(self):
        with pytest.raises(NumericalError, match="boundary"):
            asymptotic_covariance(binormal(0.0, 1.0), 100, 200)
        with pytest.raises(NumericalError, match="boundary-active"):
            asymptotic_covariance(beta(0.4, 1.6), 100, 200, constraint="concave")
        fit = make_fit("beta2", (0.4, 1.6), constraint="concave")
        flagged = FitResult(**{**fit.__dict__, "boundary": ("beta=2-alpha",)})
        with pytest.raises(NumericalError, match="boundary-active"):
            covariance_from_fit(flagged, 100, 200)

    def test_unsupported_family(self):
        from rocfit import beta_gamma
        with pytest.raises(ValueError, match="binormal and beta2"):
            asymptotic_covariance(beta_gamma(0.7, 1.3, 0.2), 100, 200)

    def test_concave_binormal_is_one_dimensional(self):
        cov = asymptotic_covariance(binormal(1.2, 1.0), 100, 300, constraint="concave")
        assert cov.k == 1
        assert cov.sigma.shape == (1, 1)
        assert cov.sigma[0, 0] > 0


class TestAucInference:
    def test_beta_gradient(self):
        assert np.allclose(_auc_gradient(beta(1.0, 1.0), 2), [-0.25, 0.25])

    def test_binormal_gradient_at_origin(self):
        g = _auc_gradient(binormal(0.0, 1.0), 2)
        assert g[0] == pytest.approx(G_MU_01, abs=1e-12)
        assert g[1] == pytest.approx(0.0, abs=1e-15)

    def test_se_scales_inverse_sqrt_n(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            cov1 = asymptotic_covariance(beta(0.8, 2.5), 1000, 1000)
            cov2 = asymptotic_covariance(beta(0.8, 2.5), 2000, 2000)
        _, se1 = auc_inference(beta(0.8, 2.5), cov1)
        _, se2 = auc_inference(beta(0.8, 2.5), cov2)
        assert se1 / se2 == pytest.approx(np.sqrt(2.0), rel=1e-10)


class TestConfidenceEllipse:
    def test_identity_covariance_circle(self):
        n0 = n1 = 50
        cov = make_cov("beta2", (2.0, 2.0), np.eye(2) * n0, n0, n1)
        ell = confidence_ellipse((2.0, 2.0), cov, 0.95)
        radii = np.linalg.norm(ell.points - np.array([2.0, 2.0]), axis=1)
        assert np.allclose(radii, np.sqrt(CHI2_2_95), atol=1e-12)
        assert ell.points.shape == (360, 2)

    def test_level_zero_collapses(self):
        cov = make_cov("beta2", (2.0, 2.0), np.eye(2) * 10, 10, 10)
        ell = confidence_ellipse((2.0, 2.0), cov, 0.0)
        assert np.allclose(ell.points, [2.0, 2.0])

    def test_diagonal_covariance_axis_aligned(self):
        n0 = 100
        diag = np.diag([4.0, 0.25]) * n0
        cov = make_cov("beta2", (1.0, 3.0), diag, n0, n0)
        ell = confidence_ellipse((1.0, 3.0), cov, 0.5)
        q = 1.3862943611198906  # chi-square(2) median = 2 ln 2
        dev = ell.points - np.array([1.0, 3.0])
        assert np.max(np.abs(dev[:, 0])) == pytest.approx(np.sqrt(q * 4.0), rel=1e-6)
        assert np.max(np.abs(dev[:, 1])) == pytest.approx(np.sqrt(q * 0.25), rel=1e-6)

    def test_concavity_flags(self):
        n0 = 10**6  # tiny covariance: the whole contour stays near the center
        cov = make_cov("beta2", (0.8, 2.5), np.eye(2), n0, n0)
        assert confidence_ellipse((0.8, 2.5), cov, 0.95).concave.all()
        assert not confidence_ellipse((2.0, 0.5), cov, 0.95).concave.any()


class TestConfidenceBand:
    def grid(self):
        return np.linspace(0.0, 1.0, 41)

    def test_tiny_covariance_collapses_to_curve(self):
        model = beta(0.8, 2.5)
        cov = make_cov("beta2", model.theta, np.eye(2) * 1e-16, 1000, 1000)
        lo, hi = confidence_band(model, cov, self.grid(), 0.95, 200, RandomStream(1))
        fitted = roc_eval(model, self.grid())
        assert np.max(hi - lo) < 1e-6
        assert np.max(np.abs(0.5 * (hi + lo) - fitted)) < 1e-6

    def test_fitted_curve_inside_band(self):
        model = beta(0.8, 2.5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            cov = asymptotic_covariance(model, 500, 500)
        lo, hi = confidence_band(model, cov, self.grid(), 0.6, 1000, RandomStream(2))
        fitted = roc_eval(model, self.grid())
        assert np.all(lo <= fitted + 1e-9)
        assert np.all(fitted <= hi + 1e-9)

    def test_bands_nest_with_level(self):
        model = beta(0.8, 2.5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            cov = asymptotic_covariance(model, 500, 500)
        lo95, hi95 = confidence_band(model, cov, self.grid(), 0.95, 800, RandomStream(3))
        lo99, hi99 = confidence_band(model, cov, self.grid(), 0.99, 800, RandomStream(3))
        assert np.all(lo99 <= lo95 + 1e-12)
        assert np.all(hi95 <= hi99 + 1e-12)

    def test_excessive_rejection_aborts(self):
        model = beta(0.05, 2.5)  # huge covariance pushes draws out of the domain
        cov = make_cov("beta2", model.theta, np.eye(2) * 1e6, 10, 10)
        with pytest.raises(NumericalError, match="outside the family domain"):
            confidence_band(model, cov, self.grid(), 0.95, 200, RandomStream(4))


class TestRankPValue:
    def test_data_beats_all_replicates(self):
        assert rank_p_value(0.5, [0.1] * 999) == pytest.approx(1.0 / 1000.0)

    def test_data_below_all_replicates(self):
        assert rank_p_value(0.05, [0.1] * 999) == 1.0

    def test_ties_count_toward_upper_tail(self):
        assert rank_p_value(0.1, [0.1, 0.2, 0.3]) == 1.0


class TestGofTest:
    def test_requires_enough_replicates(self, toy_sample):
        with pytest.raises(DataError, match="19"):
            gof_test(toy_sample, FitConfig(family="beta2"), 5, RandomStream(0))

    def test_deterministic_and_schedule_invariant(self):
        sample = sample_from_model(beta(0.8, 2.5), 120, 120, RandomStream(8))
        cfg = FitConfig(family="beta2", restarts=1, tol=1e-5,
                        nodes_per_panel=4, max_panels=256)
        a = gof_test(sample, cfg, 19, RandomStream(9))
        b = gof_test(sample, cfg, 19, RandomStream(9), n_jobs=2)
        assert a.p_value == b.p_value
        assert a.replicates == b.replicates
        assert 0.0 < a.p_value <= 1.0
        assert a.null == "monte_carlo_rank"
        assert len(a.replicates) == 19


class TestEqualityTests:
    def test_equal_estimates_give_p_one(self):
        fit = make_fit("beta2", (0.8, 2.5))
        cov = make_cov("beta2", (0.8, 2.5), np.eye(2), 100, 100)
        res = curve_equality_test(fit, cov, fit, cov)
        assert res.statistic == pytest.approx(0.0, abs=1e-15)
        assert res.p_value == 1.0
        res2 = auc_equality_test(fit, cov, fit, cov)
        assert res2.statistic == 0.0 and res2.p_value == 1.0

    def test_chi_square_reference_value(self):
        # pooled covariance = identity, delta = (1, 0): stat 1, p = exp(-1/2)
        n0 = 100
        fit_a = make_fit("beta2", (1.5, 2.5))
        fit_b = make_fit("beta2", (0.5, 2.5))
        cov_a = make_cov("beta2", fit_a.theta, np.eye(2) * (n0 / 2.0), n0, n0)
        cov_b = make_cov("beta2", fit_b.theta, np.eye(2) * (n0 / 2.0), n0, n0)
        res = curve_equality_test(fit_a, cov_a, fit_b, cov_b)
        assert res.statistic == pytest.approx(1.0, rel=1e-12)
        assert res.dof == 2
        assert res.p_value == pytest.approx(np.exp(-0.5), rel=1e-12)

    def test_z_reference_value(self):
        # aucs differing by 1.96 pooled standard errors give p close to 0.05
        fit_a = make_fit("beta2", (1.0, 1.0))        # auc 0.5
        fit_b = make_fit("beta2", (1.0, 2.331196))   # auc chosen for z = 1.96
        auc_b = 2.331196 / 3.331196
        se_unit = abs(0.5 - auc_b) / 1.96
        # sigma scaled so each se is se_unit/sqrt(2)
        g = _auc_gradient(beta(1.0, 1.0), 2)
        n0 = 1000
        sig_a = np.eye(2) * (se_unit**2 / 2.0) / (g @ g) * n0
        g_b = _auc_gradient(beta(1.0, 2.331196), 2)
        sig_b = np.eye(2) * (se_unit**2 / 2.0) / (g_b @ g_b) * n0
        cov_a = make_cov("beta2", fit_a.theta, sig_a, n0, n0)
        cov_b = make_cov("beta2", fit_b.theta, sig_b, n0, n0)
        res = auc_equality_test(fit_a, cov_a, fit_b, cov_b)
        assert abs(res.statistic) == pytest.approx(1.96, rel=1e-9)
        assert res.p_value == pytest.approx(0.0499958, abs=1e-5)

    def test_mismatched_families_rejected(self):
        fit_a = make_fit("beta2", (0.8, 2.5))
        fit_b = make_fit("binormal", (1.0, 1.2))
        cov_a = make_cov("beta2", fit_a.theta, np.eye(2), 100, 100)
        cov_b = make_cov("binormal", fit_b.theta, np.eye(2), 100, 100)
        with pytest.raises(ValueError, match="family"):
            curve_equality_test(fit_a, cov_a, fit_b, cov_b)
        # AUC comparison across families is allowed
        res = auc_equality_test(fit_a, cov_a, fit_b, cov_b)
        assert 0.0 < res.p_value <= 1.0
