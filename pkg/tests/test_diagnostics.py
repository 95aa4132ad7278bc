"""Stylized-facts battery: moments, JB, ADF, ARCH-LM, BDS, ACF and QQ data."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from _oracles import correlation_integral_brute

from ttvar.diagnostics import (
    DiagnosticError,
    acf,
    adf_test,
    arch_lm,
    bds_test,
    correlation_integral,
    default_adf_lag,
    descriptive_stats,
    diagnose_panel,
    jarque_bera,
    jarque_bera_from_moments,
    mackinnon_p,
    qq_points,
)
from ttvar.simulation import DgpSpec, gen_logistic_map, simulate
from ttvar.timeseries import ReturnPanel


class TestDescriptive:
    def test_small_example(self):
        s = descriptive_stats([1.0, 2.0, 3.0, 4.0])
        assert s.mean == 2.5
        assert s.std_dev == pytest.approx(math.sqrt(1.25))
        assert s.skewness == pytest.approx(0.0, abs=1e-15)
        assert s.excess_kurtosis == pytest.approx(1.64 - 3.0)
        assert (s.min, s.max) == (1.0, 4.0)

    def test_matches_scipy(self, rng):
        x = rng.standard_t(5, 500)
        s = descriptive_stats(x)
        assert s.skewness == pytest.approx(stats.skew(x), rel=1e-12)
        assert s.excess_kurtosis == pytest.approx(stats.kurtosis(x), rel=1e-12)

    def test_raw_convention(self, rng):
        x = rng.standard_normal(100)
        assert descriptive_stats(x, "raw").kurtosis == pytest.approx(
            descriptive_stats(x).kurtosis + 3.0)

    def test_constant_series(self):
        with pytest.raises(DiagnosticError):
            descriptive_stats([1.0] * 10)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-5, 5), st.floats(0.1, 10), st.integers(0, 1000))
    def test_affine_invariance(self, a, b, seed):
        """Skewness and kurtosis are invariant to positive affine maps."""
        x = np.random.default_rng(seed).standard_normal(50)
        s1, s2 = descriptive_stats(x), descriptive_stats(a + b * x)
        assert s2.skewness == pytest.approx(s1.skewness, abs=1e-8)
        assert s2.excess_kurtosis == pytest.approx(s1.excess_kurtosis, abs=1e-8)


class TestJarqueBera:
    def test_formula(self):
        r = jarque_bera_from_moments(600, 0.5, 1.0)
        assert r.statistic == pytest.approx(100 * (0.25 + 0.25))
        assert r.p_value == pytest.approx(math.exp(-25.0))

    def test_matches_scipy(self, rng):
        x = rng.standard_t(4, 1000)
        ref = stats.jarque_bera(x)
        r = jarque_bera(x)
        assert r.statistic == pytest.approx(ref.statistic, rel=1e-10)
        assert r.p_value == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-300)

    def test_normal_not_rejected(self):
        x = np.random.default_rng(1).standard_normal(2000)
        assert jarque_bera(x).p_value > 0.01


class TestAdf:
    @pytest.mark.parametrize("reg,sm", [("constant", "c"), ("constant+trend", "ct"), ("none", "n")])
    def test_matches_statsmodels(self, reg, sm):
        from statsmodels.tsa.stattools import adfuller

        x = np.cumsum(np.random.default_rng(7).standard_normal(400)) * 0.1
        x = x + 0.3 * np.random.default_rng(8).standard_normal(400)
        ref = adfuller(x, maxlag=8, regression=sm, autolag="AIC")
        r = adf_test(x, max_lag=8, regression=reg)
        assert r.statistic == pytest.approx(ref[0], rel=1e-9)
        assert r.p_value == pytest.approx(ref[1], rel=1e-6)
        assert r.detail["lag"] == ref[2]

    def test_fixed_lag_matches_statsmodels(self):
        from statsmodels.tsa.stattools import adfuller

        x = np.random.default_rng(3).standard_normal(300)
        ref = adfuller(x, maxlag=3, regression="c", autolag=None)
        assert adf_test(x, 3, autolag=False).statistic == pytest.approx(ref[0], rel=1e-9)

    def test_white_noise_stationary_random_walk_not(self):
        rng = np.random.default_rng(0)
        e = rng.standard_normal(1000)
        assert adf_test(e).p_value < 0.01
        assert adf_test(np.cumsum(e)).p_value > 0.05

    def test_default_lag(self):
        assert default_adf_lag(100) == 12
        assert default_adf_lag(3000) == int(math.floor(12 * 30 ** 0.25))

    def test_mackinnon_limits(self):
        assert mackinnon_p(-30.0) == 0.0
        assert mackinnon_p(5.0) == 1.0
        # -2.86 is the classical 5% critical value with a constant
        assert mackinnon_p(-2.86) == pytest.approx(0.05, abs=0.005)

    def test_short_series(self):
        with pytest.raises(DiagnosticError):
            adf_test(np.arange(8.0))


def _arch_oracle(x, lags):
    """Textbook auxiliary regression by normal equations."""
    e2 = (x - x.mean()) ** 2
    rows = np.array([[1.0, *e2[t - lags:t][::-1]] for t in range(lags, len(e2))])
    y = e2[lags:]
    beta = np.linalg.solve(rows.T @ rows, rows.T @ y)
    r = y - rows @ beta
    r2 = 1 - (r @ r) / ((y - y.mean()) @ (y - y.mean()))
    return len(y) * r2


class TestArchLm:
    def test_matches_oracle(self, rng):
        x = rng.standard_normal(300)
        assert arch_lm(x, 5).lm_statistic == pytest.approx(_arch_oracle(x, 5), rel=1e-9)

    def test_matches_statsmodels_on_demeaned_input(self, rng):
        from statsmodels.stats.diagnostic import het_arch

        x = rng.standard_t(6, 800)
        ref = het_arch(x - x.mean(), nlags=10)
        r = arch_lm(x, 10)
        assert r.lm_statistic == pytest.approx(ref[0], rel=1e-9)
        assert r.f_statistic == pytest.approx(ref[2], rel=1e-9)
        assert r.f_p_value == pytest.approx(ref[3], rel=1e-7)

    def test_detects_garch(self):
        x = simulate(DgpSpec(kind="garch11", T=2000, seed=3))
        assert arch_lm(x).lm_p_value < 1e-3

    def test_constant_series(self):
        with pytest.raises(DiagnosticError):
            arch_lm(np.ones(100), 5)


class TestBds:
    def test_correlation_integral_brute_force(self, rng):
        x = rng.standard_normal(60)
        for m in (1, 2, 3):
            assert correlation_integral(x, 0.8, m) == pytest.approx(
                correlation_integral_brute(x, 0.8, m), abs=1e-15)

    def test_matches_statsmodels(self, rng):
        from statsmodels.tsa.stattools import bds

        x = rng.standard_normal(400)
        ref, _ = bds(x, max_dim=5, epsilon=0.7 * np.std(x, ddof=1))
        np.testing.assert_allclose(bds_test(x, m_max=5).statistics, ref, rtol=1e-9)

    def test_logistic_map_strongly_rejects(self):
        assert np.all(bds_test(gen_logistic_map(500)).statistics > 10)

    def test_argument_checks(self, rng):
        with pytest.raises(DiagnosticError):
            bds_test(rng.standard_normal(100))
        with pytest.raises(ValueError):
            bds_test(rng.standard_normal(300), m_max=7)


class TestAcf:
    def test_alternating_series(self):
        rho, band = acf(np.tile([1.0, -1.0], 50), 2)
        assert rho[0] == pytest.approx(-0.99)
        assert rho[1] == pytest.approx(0.98)
        assert band == pytest.approx(1.96 / 10)

    def test_matches_statsmodels(self, rng):
        from statsmodels.tsa.stattools import acf as sm_acf

        x = rng.standard_normal(300)
        np.testing.assert_allclose(acf(x, 10)[0], sm_acf(x, nlags=10, fft=False)[1:], atol=1e-12)

    def test_squared(self, rng):
        x = rng.standard_normal(200)
        np.testing.assert_allclose(acf(x, 5, squared=True)[0], acf(x * x, 5)[0])


class TestQq:
    def test_gaussian_sample_hugs_diagonal(self):
        q = qq_points(np.random.default_rng(2).standard_normal(5000))
        mid = slice(250, 4750)
        assert np.max(np.abs(q.empirical[mid] - q.theoretical[mid])) < 0.1

    def test_student_fit_on_heavy_tails(self):
        """A t(4) sample gets a fitted nu near 4 and tracks the fitted quantiles centrally."""
        x = np.random.default_rng(5).standard_t(4, 5000)
        q = qq_points(x, "student_t")
        assert 3.0 < q.nu < 5.5
        mid = slice(250, 4750)
        assert np.max(np.abs(q.empirical[mid] - q.theoretical[mid])) < 0.1

    def test_plotting_positions(self):
        q = qq_points(np.arange(20.0))
        assert q.theoretical[0] == pytest.approx(stats.norm.ppf(0.025))
        assert np.all(np.diff(q.empirical) > 0)

    def test_bad_distribution(self, rng):
        with pytest.raises(ValueError):
            qq_points(rng.standard_normal(50), "cauchy")


def test_diagnose_panel_keys(rng):
    panel = ReturnPanel.from_array(rng.standard_normal((250, 2)) * 0.01, symbols=["A", "B"])
    out = diagnose_panel(panel, arch_lags=5, bds_m=3)
    assert list(out) == ["A", "B"]
    assert set(out["A"]) == {"stats", "adf", "jb", "arch", "bds"}
    assert out["A"]["bds"].embedding_dims == [2, 3]
