import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from tafnoise import DegenerateFitError, GaussianMixture, HeatingRateSeries, InputError, TafModelConfig
from tafnoise.constants import K_B_EV
from tafnoise.regression import (
    GaussianBasisSpec,
    Loess,
    alpha_two_point,
    basis_shift_sweep,
    fit_arrhenius,
    fit_frequency_scaling,
    fit_gaussian_basis,
    fit_heating_rate,
    fit_power_law,
    fit_single_gaussian,
    loess_smooth,
    model_heating_rate,
    t_test_delta_alpha,
    weighted_mean_std,
)

W1 = 2 * np.pi * 1e6
T = np.linspace(295.0, 530.0, 12)


def series(y, err=None, temps=T, omega=W1):
    return HeatingRateSeries.from_arrays("x", temps, omega, y, err)


# ---------------------------------------------------------------- LOESS

def test_loess_constant_and_line():
    x = np.linspace(0, 1, 30)
    assert np.allclose(loess_smooth(x, np.full(30, 3.0))(x), 3.0, rtol=1e-12)
    y = 2.0 + 5.0 * x
    for deg in (1, 2):
        np.testing.assert_allclose(loess_smooth(x, y, degree=deg)(np.linspace(0, 1, 7)), 2.0 + 5.0 * np.linspace(0, 1, 7),
                                   rtol=1e-9)


def test_loess_reproduces_quadratic_with_weights():
    x = np.linspace(-1, 1, 25)
    y = 1 - x + 3 * x**2
    sm = Loess(x, y, sigma=np.linspace(0.1, 1, 25), span=0.4, degree=2)
    np.testing.assert_allclose(sm(x), y, rtol=1e-9, atol=1e-12)


def test_loess_noisy_power_law():
    Tg = np.linspace(295, 530, 200)
    truth = Tg**1.8
    y = truth * (1 + 0.05 * np.random.default_rng(0).standard_normal(Tg.size))
    sm = loess_smooth(Tg, y, None, 0.6, 2)
    inner = slice(20, -20)
    assert np.max(np.abs(sm(Tg[inner]) / truth[inner] - 1)) < 0.03


def test_loess_stderr_tracks_noise():
    x = np.linspace(0, 1, 200)
    sm = Loess(x, np.zeros_like(x), sigma=np.full(200, 0.1), span=0.5, degree=1)
    se = sm.stderr(0.5)
    assert 0.0 < se < 0.1


def test_loess_rejects_bad_input():
    with pytest.raises(InputError):
        Loess([0, 1, 2], [0, 1, 2], span=0.5, degree=2)
    with pytest.raises(InputError):
        Loess(np.arange(10.0), np.arange(10.0), span=1.5)


# ---------------------------------------------------------------- heating-rate line

def test_heating_rate_line():
    t = np.linspace(0, 10, 11)
    rep = fit_heating_rate(t, 3 + 2 * t)
    assert rep.value("heating_rate") == pytest.approx(2.0, rel=1e-12)
    assert rep.chi2 == pytest.approx(0.0, abs=1e-20)


def test_pooled_cycles_equal_concatenation():
    rng = np.random.default_rng(1)
    t = np.tile(np.linspace(0, 5, 6), 10)
    n = 1 + 1.5 * t + rng.normal(0, 0.3, t.size)
    pooled = fit_heating_rate(t, n, 0.3)
    manual = np.polyfit(t, n, 1)
    assert pooled.value("heating_rate") == pytest.approx(manual[0], rel=1e-10)


def test_heating_rate_recovery_within_3_sigma():
    rng = np.random.default_rng(11)
    t = np.linspace(0, 10, 21)  # ms
    rep = fit_heating_rate(t, 2 + 1.5 * t + rng.normal(0, 0.5, t.size), 0.5)
    assert abs(rep.value("heating_rate") - 1.5) < 3 * rep.error("heating_rate")


# ---------------------------------------------------------------- power law / Arrhenius

def test_power_law_noiseless():
    rep = fit_power_law(series(2e-3 * T**1.5))
    assert rep.value("gamma") == pytest.approx(1.5, rel=1e-6)
    assert rep.value("ndot0") == pytest.approx(2e-3, rel=1e-6)
    assert rep.reduced_chi2 < 1e-12


def test_arrhenius_noiseless():
    rep = fit_arrhenius(series(40.0 * np.exp(-550.0 / T)))
    assert rep.value("T0") == pytest.approx(550.0, rel=1e-6)
    assert rep.value("ndot0") == pytest.approx(40.0, rel=1e-6)
    assert rep.value("E_b_eV") == pytest.approx(0.0474, abs=5e-5)
    assert rep.value("E_b_eV") == pytest.approx(550 * K_B_EV, rel=1e-6)


def test_arrhenius_constant_data():
    rep = fit_arrhenius(series(np.full(T.size, 7.0), np.full(T.size, 0.1)))
    assert abs(rep.value("T0")) <= max(rep.error("T0"), 1e-6)
    assert rep.value("E_b_eV") == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_noisy_fits_within_3_sigma(seed):
    rng = np.random.default_rng(seed)
    y0 = 2e-3 * T**1.5
    pl = fit_power_law(series(y0 * (1 + 0.05 * rng.standard_normal(T.size)), 0.05 * y0))
    assert abs(pl.value("gamma") - 1.5) < 3 * pl.error("gamma")
    y0 = 40.0 * np.exp(-550.0 / T)
    ar = fit_arrhenius(series(y0 * (1 + 0.05 * rng.standard_normal(T.size)), 0.05 * y0))
    assert abs(ar.value("T0") - 550.0) < 3 * ar.error("T0")


def test_power_law_p_values_are_uniform():
    y0 = 2e-3 * T**1.5
    sig = 0.05 * y0
    p = []
    for seed in range(1000):
        y = y0 + sig * np.random.default_rng(seed).standard_normal(T.size)
        p.append(fit_power_law(series(y, sig)).p_value)
    assert stats.kstest(p, "uniform").pvalue > 0.01


def test_fit_report_schema_fields():
    rep = fit_power_law(series(2e-3 * T**1.5, 1e-3 * T))
    d = rep.as_dict()
    assert set(d) >= {"model_name", "parameters", "chi2", "dof", "reduced_chi2", "p_value"}
    assert d["parameters"]["gamma"].keys() == {"value", "error"}
    assert d["dof"] == T.size - 2


# ---------------------------------------------------------------- frequency scaling

def test_frequency_scaling_exact():
    w = W1 * np.array([0.8, 1.0, 1.3])
    est, rep = fit_frequency_scaling(series(5.0 / w**2, temps=[295.0] * 3, omega=w))
    assert est.alpha == pytest.approx(1.0, abs=1e-9)


def test_frequency_scaling_two_points_matches_closed_form():
    w = W1 * np.array([1.0, 1.4])
    y = 3.0 / w**1.85
    est, _ = fit_frequency_scaling(series(y, 0.05 * y, temps=[300.0, 300.0], omega=w))
    a, e = alpha_two_point(w[0], y[0], 0.05 * y[0], w[1], y[1], 0.05 * y[1])
    assert est.alpha == pytest.approx(0.85, rel=1e-9)
    assert est.alpha == pytest.approx(a, rel=1e-12)
    assert est.alpha_err == pytest.approx(e, rel=1e-9)


def test_two_point_alpha_coverage():
    rng = np.random.default_rng(3)
    w = W1 * np.array([1.0, 1.4])
    inside = 0
    n = 2000
    for _ in range(n):
        y = 3.0 / w**1.85 * (1 + 0.05 * rng.standard_normal(2))
        est, _ = fit_frequency_scaling(series(y, 0.05 * y, temps=[300.0, 300.0], omega=w))
        inside += abs(est.alpha - 0.85) < 2 * est.alpha_err
    # about 95% of estimates fall within 2 sigma
    assert inside / n > 0.93


# ---------------------------------------------------------------- Gaussian basis

TRUTH = GaussianMixture.from_arrays(np.linspace(0.3, 0.65, 5), 0.0875, [0.3, 0.6, 1.0, 1.2, 0.8])
T24 = np.linspace(295, 530, 24)


def _basis_data(seed=0):
    s = series(np.ones(T24.size), temps=T24)
    y0 = model_heating_rate(TRUTH, s, TafModelConfig())
    y = y0 * (1 + 0.03 * np.random.default_rng(seed).standard_normal(T24.size))
    return series(y, 0.03 * y0, temps=T24)


def test_gaussian_basis_recovers_mixture():
    D, rep = fit_gaussian_basis(_basis_data(), GaussianBasisSpec())
    assert rep.reduced_chi2 < 2
    assert all(a >= 0 for a in D.amplitudes)


def test_basis_shift_sweep_non_unique():
    data = _basis_data()
    fits = basis_shift_sweep(data, GaussianBasisSpec(), [0.0, 0.0175, 0.035, 0.0525, 0.07])
    rms = [np.sqrt(np.mean(r.residuals**2)) for _, r in fits]
    assert max(rms) / min(rms) < 1.5
    E = np.linspace(0.3, 0.7, 200)
    d0 = fits[0][0](E)
    assert np.max(np.abs(fits[-1][0](E) - d0)) > 0.1 * d0.max()


def test_reference_basis_spec():
    spec = GaussianBasisSpec.reference()
    assert spec.centers == pytest.approx(np.linspace(0.3, 0.65, 5))
    assert spec.width == pytest.approx(0.07)
    assert spec.shifted(0.02).centers[0] == pytest.approx(0.32)


def test_single_gaussian_fit_converges():
    D, rep = fit_single_gaussian(_basis_data())
    assert rep.reduced_chi2 < 3
    assert 0.3 < rep.value("center_eV") < 0.8


def test_gaussian_basis_needs_enough_points():
    with pytest.raises(InputError):
        fit_gaussian_basis(series(np.ones(3), temps=[300.0, 310.0, 320.0]), GaussianBasisSpec())


# ---------------------------------------------------------------- delta-alpha t-test

PAIRS = [((1.02, 0.07), (0.88, 0.06)), ((1.05, 0.08), (0.95, 0.07)), ((0.89, 0.09), (0.80, 0.08)),
         ((1.10, 0.05), (0.93, 0.06)), ((0.97, 0.06), (0.86, 0.05)), ((1.01, 0.07), (0.95, 0.09))]


def test_t_test_matches_hand_computation():
    d = [lo[0] - hi[0] for lo, hi in PAIRS]
    s = [math.sqrt(lo[1] ** 2 + hi[1] ** 2) for lo, hi in PAIRS]
    w = [1 / x**2 for x in s]
    V1 = sum(w)
    V2 = sum(x * x for x in w)
    mean = sum(wi * di for wi, di in zip(w, d)) / V1
    var = sum(wi * (di - mean) ** 2 for wi, di in zip(w, d)) / (V1 - V2 / V1)
    t_hand = mean / (math.sqrt(var) / math.sqrt(6))
    res = t_test_delta_alpha(PAIRS)
    assert res.t_value == pytest.approx(t_hand, rel=1e-9)
    assert res.mean_delta == pytest.approx(mean, rel=1e-9)
    assert res.n_samples == 6


def test_t_test_reference_confidence():
    # t = 3.95 with 5 degrees of freedom is the reference 99.5% (one-sided)
    assert 1 - stats.t.sf(3.95, 5) == pytest.approx(0.995, abs=1e-3)


def test_t_test_zero_and_degenerate():
    zero = t_test_delta_alpha([((1.0, 0.1), (1.0, 0.1))] * 6)
    assert zero.t_value == 0.0
    with pytest.raises(DegenerateFitError):
        t_test_delta_alpha([((1.1, 0.1), (1.0, 0.1))] * 6)
    with pytest.raises(InputError):
        t_test_delta_alpha([((1.1, 0.1), (1.0, 0.1))])


def test_t_statistic_distribution():
    # equal errors reduce the weighted test to Student's t; the statistic is noncentral t
    ts = []
    for seed in range(2000):
        d = np.random.default_rng(seed).normal(0.12, 0.07, 6)
        ts.append(t_test_delta_alpha([((1 + x, 0.03), (1.0, 0.03)) for x in d]).t_value)
    ts = np.array(ts)
    nct = stats.nct(5, 0.12 / 0.07 * np.sqrt(6))
    assert np.mean(ts >= 1) >= 0.99
    p = nct.cdf(8) - nct.cdf(1)
    frac = np.mean((ts >= 1) & (ts <= 8))
    assert abs(frac - p) < 3 * np.sqrt(p * (1 - p) / ts.size)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=10), st.floats(0.01, 1))
def test_weighted_mean_equal_weights(x, s):
    m, sd = weighted_mean_std(x, np.full(len(x), s))
    assert m == pytest.approx(np.mean(x), abs=1e-12)
    assert sd == pytest.approx(np.std(x, ddof=1), abs=1e-9)
