import math

import numpy as np
import pytest
from scipy import special
from scipy import stats as sps

from treekummer.errors import LengthMismatch, NonMonotoneCdf, TooFewSamples
from treekummer.scalar import GammaParams, gamma_cdf
from treekummer.stats import (
    TestReport,
    chi2_independence_test,
    dcor_statistic,
    distance_correlation,
    hv15_check,
    independence_battery,
    kolmogorov_sf,
    ks_2samp_test,
    ks_statistic,
    ks_test,
    permutations_for_level,
)
from treekummer.transform import involution_T


def expcdf(t):
    return 1 - np.exp(-np.asarray(t))


def test_single_point_gap():
    assert ks_statistic([0.5], lambda t: np.asarray(t)) == 0.5


def test_ks_statistic_matches_scipy(rng):
    x = rng.gamma(1.3, size=500)
    cdf = lambda t: gamma_cdf(GammaParams(1.3, 1), t)
    assert ks_statistic(x, cdf) == pytest.approx(sps.kstest(x, sps.gamma(1.3).cdf).statistic, abs=1e-14)


def test_kolmogorov_sf_matches_scipy():
    t = np.linspace(0.05, 4, 300)
    ours = np.array([kolmogorov_sf(v) for v in t])
    np.testing.assert_allclose(ours, special.kolmogorov(t), atol=1e-12)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        ks_test(np.ones(9), expcdf)


def test_non_monotone_cdf(rng):
    with pytest.raises(NonMonotoneCdf):
        ks_test(rng.random(50), lambda t: 1 - np.asarray(t))


def test_ks_under_null_one_percent():
    n = 100_000
    x = np.random.default_rng(1).exponential(size=n)
    assert ks_statistic(x, expcdf) < 1.628 / math.sqrt(n)


def test_ks_power():
    x = np.random.default_rng(2).exponential(size=100_000)
    rep = ks_test(x, lambda t: gamma_cdf(GammaParams(1.2, 1), t))
    assert rep.p_value < 1e-6 and rep.reject


def test_ks_calibration_one_percent():
    rng = np.random.default_rng(3)
    reps = 500
    rejects = sum(ks_test(rng.exponential(size=2000), expcdf, level=0.01).reject for _ in range(reps))
    se = math.sqrt(0.01 * 0.99 / reps)
    assert abs(rejects / reps - 0.01) <= 3 * se


def test_ks_invariant_under_log(rng):
    x = rng.exponential(size=1000)
    a = ks_statistic(x, expcdf)
    b = ks_statistic(np.log(x), lambda t: expcdf(np.exp(t)))
    assert a == pytest.approx(b, abs=1e-15)


def test_ks2_matches_scipy(rng):
    x, y = rng.normal(size=700), rng.normal(0.1, size=900)
    ours = ks_2samp_test(x, y)
    ref = sps.ks_2samp(x, y, method="asymp")
    assert ours.statistic == pytest.approx(ref.statistic, abs=1e-15)
    # scipy's "asymp" uses the finite-n law; ours is the Kolmogorov limit at n_eff
    n_eff = 700 * 900 / 1600
    assert ours.p_value == pytest.approx(special.kolmogorov(math.sqrt(n_eff) * ref.statistic), rel=1e-9)


def _dcor_oracle(x, y):
    # dCov^2 = S1 + S2 - 2 S3 (Szekely-Rizzo-Bakirov V-statistic)
    def dcov2(u, v):
        a = np.abs(u[:, None] - u[None, :])
        b = np.abs(v[:, None] - v[None, :])
        return (a * b).mean() + a.mean() * b.mean() - 2 * (a.mean(axis=1) * b.mean(axis=1)).mean()

    return math.sqrt(dcov2(x, y) / math.sqrt(dcov2(x, x) * dcov2(y, y)))


def test_dcor_matches_oracle(rng):
    x = rng.normal(size=300)
    y = x**2 + rng.normal(size=300)
    assert dcor_statistic(x, y) == pytest.approx(_dcor_oracle(x, y), rel=1e-12)
    rep = distance_correlation(x, y, permutations=10, rng=0)
    assert rep.statistic == pytest.approx(_dcor_oracle(x, y), rel=1e-12)


def test_dcor_identical_columns(rng):
    x = rng.normal(size=200)
    assert dcor_statistic(x, x) == pytest.approx(1.0, abs=1e-15)


def test_dcor_symmetric(rng):
    x, y = rng.normal(size=200), rng.exponential(size=200)
    assert dcor_statistic(x, y) == dcor_statistic(y, x)


def test_dcor_scale_shift_invariant(rng):
    x, y = rng.normal(size=200), rng.exponential(size=200)
    assert dcor_statistic(3.7 * x - 11, y) == pytest.approx(dcor_statistic(x, y), rel=1e-12)


def test_dcor_errors(rng):
    with pytest.raises(LengthMismatch):
        distance_correlation(rng.random(60), rng.random(61))
    with pytest.raises(LengthMismatch):
        dcor_statistic(rng.random(60), rng.random(61))
    with pytest.raises(TooFewSamples):
        distance_correlation(rng.random(20), rng.random(20))


def test_dcor_power_hits_minimum_p_value(rng):
    x = rng.normal(size=500)
    rep = distance_correlation(x, x + 0.01 * rng.normal(size=500), permutations=200, rng=1, early_stop=False)
    assert rep.p_value == 1 / 201


def test_early_stopping_keeps_the_decision():
    rng = np.random.default_rng(12)
    for k in range(20):
        x = rng.normal(size=80)
        y = rng.normal(size=80) + (0.3 * x if k % 2 else 0)
        a = distance_correlation(x, y, permutations=199, rng=k, level=0.05, early_stop=True)
        b = distance_correlation(x, y, permutations=199, rng=k, level=0.05, early_stop=False)
        assert a.reject == b.reject
        assert a.details["permutations_run"] <= b.details["permutations_run"] == 199


def test_dcor_calibration():
    rng = np.random.default_rng(4)
    reps = 200
    rej = 0
    for k in range(reps):
        x, y = rng.exponential(size=(2, 100))
        rej += distance_correlation(x, y, permutations=99, rng=k, level=0.05).reject
    assert 0.02 <= rej / reps <= 0.09


def test_permutations_for_level():
    assert permutations_for_level(0.05) == 200
    assert permutations_for_level(1e-3) == 1999
    # smallest attainable p-value 1/(B+1) must fall below level/2
    for level in (1e-2, 1e-3, 1e-4 / 3):
        assert 1 / (permutations_for_level(level) + 1) <= level / 2 * (1 + 1e-12)


def test_battery_on_copies_rejects():
    x = np.random.default_rng(5).exponential(size=(3000, 1))
    reps = independence_battery(np.hstack([x, x]), level=1e-3, rng=0)
    dc = reps[0]
    assert dc.reject
    assert dc.p_value <= 1 / (dc.details["permutations"] + 1)
    assert reps[-1].method == "chi2" and reps[-1].reject


def test_battery_on_independent_columns_accepts():
    m = np.random.default_rng(6).gamma(2.0, size=(20_000, 4))
    reps = independence_battery(m, level=1e-3, rng=1)
    assert len(reps) == 6 + 1
    assert not any(r.reject for r in reps)
    assert all(r.level == pytest.approx(1e-3 / 7) for r in reps)


def test_battery_skips_chi2_above_six_columns(rng):
    m = rng.exponential(size=(200, 7))
    reps = independence_battery(m, level=0.05, rng=0, permutations=20)
    assert len(reps) == 21 and all(r.method == "dcor" for r in reps)


def test_chi2_on_simple_dependence(rng):
    x = rng.normal(size=5000)
    assert chi2_independence_test(np.c_[x, x + rng.normal(size=5000)], level=1e-3).reject
    assert chi2_independence_test(rng.normal(size=(5000, 3)), level=1e-3).details["df"] == 4


def test_report_json():
    rep = TestReport("ks", 0.1, 0.2, 0.05, "lbl", seed=3)
    js = rep.to_json()
    assert js["decision"] == "accept" and js["seed"] == 3
    assert set(js) >= {"method", "statistic", "p_value", "level", "decision", "seed"}
    assert TestReport("x", 1.0, None, 0.05, details={"reject": True}).reject


def test_hv15_passes():
    reps = hv15_check(2, 1, 1, 100_000, rng=7, level=1e-3)
    assert [r.method for r in reps] == ["ks", "ks", "dcor"]
    assert not any(r.reject for r in reps)


def test_hv15_applying_T_again_recovers_inputs(rng):
    x = rng.exponential(size=100)
    y = rng.gamma(2, size=100)
    u, v = involution_T(x, y)
    xx, yy = involution_T(u, v)
    np.testing.assert_allclose(xx, x, rtol=1e-14)
    np.testing.assert_allclose(yy, y, rtol=1e-14)
