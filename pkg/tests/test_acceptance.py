"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.  The simulation-heavy criteria (7, 8, 11) take
several minutes each; the whole suite is sized for roughly a
quarter-hour on two cores.

Criterion 10 (reference-dataset reproduction) is conditional: it runs
only if ``tests/data/asah_s100b.csv`` exists (columns ``score,label``:
S100-beta concentration and poor-outcome indicator for the 113-subject
aSAH cohort shipped with the pROC R package).  Without the file it is
skipped, waived in favour of criteria 7 and 8.  The same applies to the
Sahel forecast examples (``sahel_west.csv`` / ``sahel_east.csv``).
"""

import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from joblib import Parallel, delayed
from scipy import stats

import rocfit
from rocfit import (
    FitConfig,
    LabeledSample,
    RandomStream,
    asymptotic_covariance,
    auc_equality_test,
    bernstein_mixture,
    beta,
    binormal,
    concave_hull,
    concavity_diagnostics,
    covariance_from_fit,
    curve_equality_test,
    empirical_auc,
    empirical_roc,
    fit_mde,
    gof_test,
    graded_gauss_legendre,
    is_concave,
    model_auc,
    param_gradient,
    pav_calibrate,
    recalibrated_sample,
    roc_eval,
    roc_slope,
    sample_from_model,
    simplify_vertices,
)

pytestmark = pytest.mark.filterwarnings("ignore::rocfit.errors.BoundaryWarning")

DATA_DIR = Path(__file__).parent / "data"

# simulation configs sized for the two-core budget; tolerances are the
# criteria's own
SIM_CFG_BETA = FitConfig(family="beta2", restarts=2, tol=1e-6,
                         nodes_per_panel=8, max_panels=512)
SIM_CFG_BINORMAL = FitConfig(family="binormal", restarts=2, tol=1e-6,
                             nodes_per_panel=8, max_panels=512)
GOF_CFG = FitConfig(family="beta2", restarts=1, tol=1e-5,
                    nodes_per_panel=4, max_panels=512)


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion:>2}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {criterion}: {detail}"


def toy_sample() -> LabeledSample:
    scores = [1, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 7]
    labels = [0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1]
    return LabeledSample(scores=np.asarray(scores, float), labels=np.asarray(labels))


def test_criterion_1_toy_table_exactness():
    start = time.perf_counter()
    curve = empirical_roc(toy_sample())
    expected = (
        (F(0), F(0)), (F(0), F(1, 6)), (F(0), F(1, 3)), (F(1, 6), F(2, 3)),
        (F(1, 2), F(5, 6)), (F(5, 6), F(5, 6)), (F(5, 6), F(1)), (F(1), F(1)),
    )
    ok = curve.vertices == expected and empirical_auc(curve) == F(7, 9)
    elapsed = time.perf_counter() - start
    report(1, ok and elapsed < 1.0,
           f"toy vertices and AUC exact in rationals ({elapsed:.3f}s)")


def test_criterion_2_pav_exactness():
    sample = toy_sample()
    pav = pav_calibrate(sample)
    values_ok = pav.values == (F(0), F(1, 3), F(1, 3), F(1, 3), F(2, 3), F(1), F(1))
    hull = concave_hull(empirical_roc(sample))
    rescored = empirical_roc(recalibrated_sample(sample, pav))
    grid = [F(i, 60) for i in range(61)]
    hull_ok = simplify_vertices(hull) == simplify_vertices(rescored) and all(
        rocfit.eval_roc(hull, p) == rocfit.eval_roc(rescored, p) for p in grid
    )
    report(2, values_ok and hull_ok,
           "calibrated values exact; hull equals recalibrated-sample curve")


def test_criterion_3_concavity_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(314159)
    agree = True
    for _ in range(1000):
        while True:
            n = int(rng.integers(2, 31))
            scores = rng.integers(0, 6, size=n).astype(float)
            labels = rng.integers(0, 2, size=n)
            if 0 < labels.sum() < n:
                break
        d = concavity_diagnostics(LabeledSample(scores=scores, labels=labels))
        if not (d.curve_concave == d.lr_nondecreasing == d.cep_nondecreasing):
            agree = False
            break
    elapsed = time.perf_counter() - start
    report(3, agree and elapsed < 10.0,
           f"three concavity criteria agree on 1000 samples ({elapsed:.2f}s)")


def test_criterion_4_auc_formulas():
    start = time.perf_counter()
    rng = np.random.default_rng(271828)
    rule = graded_gauss_legendre()
    worst = 0.0
    for _ in range(100):
        model = beta(rng.uniform(0.1, 6.0), rng.uniform(0.1, 6.0))
        quad = float(roc_eval(model, rule.nodes) @ rule.weights)
        worst = max(worst, abs(model_auc(model) - quad))
    for _ in range(100):
        model = binormal(rng.uniform(0.0, 3.0), rng.uniform(0.3, 3.0))
        quad = float(roc_eval(model, rule.nodes) @ rule.weights)
        worst = max(worst, abs(model_auc(model) - quad))
    elapsed = time.perf_counter() - start
    report(4, worst <= 1e-8 and elapsed < 5.0,
           f"closed-form vs quadrature AUC, max |diff| = {worst:.2e} ({elapsed:.2f}s)")


def test_criterion_5_concavity_region():
    rng = np.random.default_rng(161803)
    grid = np.linspace(0.0, 1.0, 1001)
    checked = 0
    ok = True
    while checked < 100:
        a = rng.uniform(0.05, 3.0)
        b = rng.uniform(0.05, 4.0)
        # stay clear of every boundary of the concavity region
        if min(abs(b - (2.0 - a)), abs(a - 1.0), abs(b - 1.0)) <= 1e-6:
            continue
        model = beta(a, b)
        slopes = np.diff(roc_eval(model, grid)) / np.diff(grid)
        chord_concave = bool(np.all(np.diff(slopes) <= 1e-9))
        if is_concave(model) != chord_concave:
            ok = False
            break
        checked += 1
    report(5, ok, "is_concave matches 1001-point chord test on 100 draws")


def _bernstein_sup_errors(target, orders, grid):
    def slope(q):
        q = min(max(q, 1e-12), 1.0 - 1e-12)
        return roc_slope(target, 1.0 - q)

    return {
        n: float(np.max(np.abs(
            roc_eval(bernstein_mixture(slope, n), grid) - roc_eval(target, grid)
        )))
        for n in orders
    }


def test_criterion_6_bernstein_mixture():
    grid = np.linspace(0.0, 1.0, 1001)
    mix10 = bernstein_mixture(lambda q: 1.0, 10)
    identity_err = float(np.max(np.abs(roc_eval(mix10, grid) - grid)))

    # the quadratic-density target is reproduced exactly at every order
    # (the order-n error of the density is proportional to the density
    # itself, so it cancels in the normalization): both sup errors sit
    # at roundoff, satisfying the bounds with an equality cushion
    sup = _bernstein_sup_errors(beta(2.0, 2.0), (10, 50), grid)
    ok = identity_err <= 1e-12 and sup[50] <= sup[10] + 1e-12 and sup[50] < 0.05

    # a generic target shows the actual strict convergence
    sup_g = _bernstein_sup_errors(beta(2.0, 3.0), (10, 50), grid)
    ok = ok and sup_g[50] < sup_g[10] and sup_g[50] < 0.05
    report(6, ok,
           f"identity exact ({identity_err:.1e}); beta(2,2) sup errors "
           f"n10={sup[10]:.2e}, n50={sup[50]:.2e} (exactly representable); "
           f"beta(2,3) n10={sup_g[10]:.4f} > n50={sup_g[50]:.4f} < 0.05")


def _sim_fit(m: int, seed: int, model, cfg):
    samp = sample_from_model(model, 10000, 10000, RandomStream(seed, m))
    return fit_mde(empirical_roc(samp), cfg).theta


def _covariance_ratio_ok(truth, cfg, seed, reps=1000):
    theta0 = np.asarray(truth.theta)
    thetas = Parallel(n_jobs=2)(
        delayed(_sim_fit)(m, seed, truth, cfg) for m in range(reps)
    )
    scaled = np.sqrt(20000.0) * (np.asarray(thetas) - theta0)
    emp = np.cov(scaled.T)
    cov = asymptotic_covariance(truth, 10000, 10000)
    ratio = emp / cov.scaled_sigma
    return ratio, bool(np.all(ratio >= 0.7) and np.all(ratio <= 1.4))


def test_criterion_7_estimator_asymptotics():
    start = time.perf_counter()
    ratio_b, ok_b = _covariance_ratio_ok(beta(0.8, 2.5), SIM_CFG_BETA, seed=424242)
    ratio_n, ok_n = _covariance_ratio_ok(binormal(1.0, 1.2), SIM_CFG_BINORMAL, seed=515151)
    elapsed = time.perf_counter() - start
    report(
        7, ok_b and ok_n,
        "cov(sqrt(n) error) vs sandwich, entrywise ratios "
        f"beta={np.round(ratio_b, 3).tolist()}, "
        f"binormal={np.round(ratio_n, 3).tolist()} ({elapsed:.0f}s)",
    )


def _gof_p(i: int) -> float:
    truth = beta(0.8, 2.5)
    samp = sample_from_model(truth, 250, 250, RandomStream(606060, i))
    return gof_test(samp, GOF_CFG, M=99, rng=RandomStream(707070, i)).p_value


def test_criterion_8_gof_null_uniformity():
    start = time.perf_counter()
    pvals = np.asarray(Parallel(n_jobs=2)(delayed(_gof_p)(i) for i in range(200)))
    ks = stats.kstest(pvals, "uniform")
    elapsed = time.perf_counter() - start
    report(
        8, ks.pvalue > 0.01,
        f"200 null p-values: KS stat {ks.statistic:.3f}, p {ks.pvalue:.3f} "
        f"(reject at 1%? {'no' if ks.pvalue > 0.01 else 'yes'}; {elapsed:.0f}s)",
    )


def test_criterion_9_binormal_gradient_oracle():
    h = 1e-6
    worst = 0.0
    p = np.linspace(0.02, 0.98, 17)
    for mu in (0.3, 0.75, 1.5, 2.5):
        for sigma in (0.5, 0.8, 1.0, 1.5, 2.5):
            grad = param_gradient(binormal(mu, sigma), p)
            fd_mu = (roc_eval(binormal(mu + h, sigma), p)
                     - roc_eval(binormal(mu - h, sigma), p)) / (2 * h)
            fd_sg = (roc_eval(binormal(mu, sigma + h), p)
                     - roc_eval(binormal(mu, sigma - h), p)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(grad[0] - fd_mu))),
                        float(np.max(np.abs(grad[1] - fd_sg))))
    report(9, worst <= 1e-6, f"closed-form vs finite-difference gradients, "
                             f"max |diff| = {worst:.2e}")


def test_criterion_10_reference_dataset():
    path = DATA_DIR / "asah_s100b.csv"
    if not path.exists():
        print("ACCEPTANCE 10: SKIP - reference dataset not available in this "
              "environment; waived in favour of criteria 7-8", flush=True)
        pytest.skip("aSAH dataset unavailable; criterion waived per its own terms")
    from rocfit.cli import parse_dataset

    sample = parse_dataset(path)
    curve = empirical_roc(sample)
    checks = []
    fit_b = fit_mde(curve, FitConfig(family="beta2"))
    checks.append(np.allclose(fit_b.theta, (0.36, 0.96), atol=0.05)
                  and abs(fit_b.distance - 0.032) <= 0.005)
    fit_n = fit_mde(curve, FitConfig(family="binormal"))
    checks.append(np.allclose(fit_n.theta, (0.75, 0.72), atol=0.05)
                  and abs(fit_n.distance - 0.033) <= 0.005)
    fit_c = fit_mde(curve, FitConfig(family="beta2", constraint="concave"))
    checks.append(np.allclose(fit_c.theta, (0.51, 1.49), atol=0.05)
                  and abs(fit_c.distance - 0.050) <= 0.005)
    fit_g = fit_mde(curve, FitConfig(family="beta3_gamma", constraint="concave"))
    checks.append(np.allclose(fit_g.theta, (0.70, 1.30, 0.24), atol=0.07)
                  and abs(fit_g.distance - 0.029) <= 0.005)
    report(10, all(checks),
           f"reference fits beta={fit_b.theta}, binormal={fit_n.theta}, "
           f"concave={fit_c.theta}, edge={fit_g.theta}")


def _equality_pair(i: int) -> tuple[float, float]:
    truth = beta(0.8, 2.5)
    fits, covs = [], []
    for j in (0, 1):
        samp = sample_from_model(truth, 1000, 1000, RandomStream(808080, (i, j)))
        fit = fit_mde(empirical_roc(samp), SIM_CFG_BETA)
        fits.append(fit)
        covs.append(covariance_from_fit(fit, 1000, 1000))
    curve_p = curve_equality_test(fits[0], covs[0], fits[1], covs[1]).p_value
    auc_p = auc_equality_test(fits[0], covs[0], fits[1], covs[1]).p_value
    return curve_p, auc_p


def test_criterion_11_test_size():
    start = time.perf_counter()
    results = Parallel(n_jobs=2)(delayed(_equality_pair)(i) for i in range(400))
    curve_rate = float(np.mean([c < 0.05 for c, _ in results]))
    auc_rate = float(np.mean([a < 0.05 for _, a in results]))
    elapsed = time.perf_counter() - start
    ok = 0.025 <= curve_rate <= 0.075 and 0.025 <= auc_rate <= 0.075
    report(11, ok,
           f"empirical type-I at nominal 5%: curve {curve_rate:.3f}, "
           f"auc {auc_rate:.3f} ({elapsed:.0f}s)")


def test_conditional_sahel_examples():
    west = DATA_DIR / "sahel_west.csv"
    east = DATA_DIR / "sahel_east.csv"
    if not (west.exists() and east.exists()):
        pytest.skip("Sahel forecast datasets unavailable; reference p-values "
                    "(gof 0.17, auc-eq 0.633, curve-eq 0.015) not checkable")
    from rocfit.cli import parse_dataset

    sample_w = parse_dataset(west)
    cfg = FitConfig(family="beta2", constraint="concave")
    gof = gof_test(sample_w, cfg, M=999, rng=RandomStream(1))
    assert abs(gof.p_value - 0.17) <= 0.05
    sample_e = parse_dataset(east)
    fw = fit_mde(empirical_roc(sample_w), cfg)
    fe = fit_mde(empirical_roc(sample_e), cfg)
    cw = covariance_from_fit(fw, sample_w.n0, sample_w.n1)
    ce = covariance_from_fit(fe, sample_e.n0, sample_e.n1)
    assert abs(auc_equality_test(fw, cw, fe, ce).p_value - 0.633) <= 0.1
    assert abs(curve_equality_test(fw, cw, fe, ce).p_value - 0.015) <= 0.05
