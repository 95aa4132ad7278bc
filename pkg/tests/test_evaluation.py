"""Accuracy metrics, Diebold-Mariano test, ranking, improvement and regime splits."""

import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import _reference as REF

from ttvar.evaluation import (
    FULL_SAMPLE,
    NORMAL_PERIODS,
    EvaluationError,
    IndistinguishableForecasts,
    MetricTable,
    Regime,
    RegimeCalendar,
    auto_bandwidth,
    default_calendar,
    dm_test,
    improvement_pct,
    mae,
    metric_table,
    newey_west,
    rank_models,
    regime_split,
    rmse,
)
from ttvar.hybrid import ForecastRecordSet, ModelForecasts
from ttvar.timeseries import business_days


def _nw_oracle(d, L):
    """Long-run variance from explicit autocovariances with Bartlett weights."""
    d = np.asarray(d, float)
    T = len(d)
    u = d - d.mean()
    gam = [sum(u[t] * u[t - j] for t in range(j, T)) / T for j in range(L + 1)]
    return gam[0] + 2 * sum((1 - j / (L + 1)) * gam[j] for j in range(1, L + 1))


class TestMetrics:
    def test_examples(self):
        assert rmse([3.0, -4.0]) == pytest.approx(math.sqrt(12.5))
        assert mae([3.0, -4.0]) == 3.5

    def test_empty(self):
        with pytest.raises(EvaluationError):
            rmse([])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=40))
    def test_mae_le_rmse(self, e):
        assert mae(e) <= rmse(e) + 1e-12


class TestNeweyWest:
    def test_bandwidth_zero_is_population_variance(self, rng):
        d = rng.standard_normal(50)
        assert newey_west(d, 0) == pytest.approx(np.var(d), rel=1e-14)

    @pytest.mark.parametrize("L", [1, 3, 7])
    def test_matches_oracle(self, rng, L):
        d = rng.standard_normal(60)
        assert newey_west(d, L) == pytest.approx(_nw_oracle(d, L), rel=1e-12)

    def test_auto_bandwidth(self):
        assert auto_bandwidth(100) == 4
        assert auto_bandwidth(1000) == int(math.floor(4 * 10 ** (2 / 9)))

    def test_bandwidth_range(self):
        with pytest.raises(EvaluationError):
            newey_west(np.ones(5), 5)


class TestDm:
    def test_hand_example(self):
        a = np.array([1.0, 2, 1, 2, 1, 2, 1, 2, 1, 3])
        b = np.ones(10)
        d = a ** 2 - 1
        stat = d.mean() / math.sqrt(np.var(d) / 10)
        r = dm_test(a, b)
        assert r.statistic == pytest.approx(stat)
        assert r.p_value == pytest.approx(2 * stats.norm.sf(abs(stat)))
        assert r.statistic > 0     # b is more accurate

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(["squared", "absolute"]),
           st.sampled_from([0, 2, "auto"]))
    def test_antisymmetry(self, seed, loss, bw):
        rng = np.random.default_rng(seed)
        a, b = rng.standard_normal(40), rng.standard_normal(40)
        assert dm_test(a, b, loss, bw).statistic == pytest.approx(
            -dm_test(b, a, loss, bw).statistic, rel=1e-12)

    def test_identical_forecasts(self, rng):
        e = rng.standard_normal(30)
        with pytest.raises(IndistinguishableForecasts):
            dm_test(e, e.copy())

    def test_shape_and_length(self, rng):
        with pytest.raises(EvaluationError):
            dm_test(rng.standard_normal(20), rng.standard_normal(21))
        with pytest.raises(EvaluationError):
            dm_test(rng.standard_normal(9), rng.standard_normal(9))

    def test_panel_uses_mean_loss_across_assets(self, rng):
        a, b = rng.standard_normal((50, 3)), rng.standard_normal((50, 3))
        ref = dm_test((a ** 2).mean(1) ** 0.5, (b ** 2).mean(1) ** 0.5)
        assert dm_test(a, b).statistic == pytest.approx(ref.statistic, rel=1e-12)

    def test_detects_better_forecast(self, rng):
        truth_noise = rng.standard_normal(500)
        assert dm_test(truth_noise * 1.5, truth_noise).p_value < 1e-6


def _table(models, rmse_rows, mae_rows=None):
    mae_rows = rmse_rows if mae_rows is None else mae_rows
    return MetricTable(models, ["A", "B"], np.array(rmse_rows), np.array(mae_rows))


class TestRanking:
    def test_ties_get_average_rank(self):
        r = rank_models(_table(["x", "y", "z"], [[1, 1], [1, 2], [3, 3]]))
        assert r.avg_rmse_rank == {"x": 1.25, "y": 1.75, "z": 3.0}
        assert r.models == ["x", "y", "z"]

    def test_order_independent_of_input_order(self):
        a = rank_models(_table(["x", "y"], [[1, 2], [2, 1]]))
        b = rank_models(_table(["y", "x"], [[2, 1], [1, 2]]))
        assert a.models == b.models == ["x", "y"]

    def test_reference_top_three(self):
        names = list(REF.RMSE)
        t = MetricTable(names, list(REF.ASSETS), np.array([REF.RMSE[m] for m in names]),
                        np.array([REF.MAE[m] for m in names]))
        r = rank_models(t)
        assert tuple(r.top(3)) == REF.TOP3
        for i, m in enumerate(REF.TOP3):
            assert round(r.avg_rmse_rank[m], 2) == REF.TOP3_AVG_RMSE_RANK[i]
            assert round(r.overall[m], 2) == pytest.approx(REF.TOP3_OVERALL[i], abs=0.05)

    def test_nan_rejected(self):
        with pytest.raises(EvaluationError):
            rank_models(_table(["x"], [[np.nan, 1.0]]))


class TestImprovement:
    def test_icln_example(self):
        assert improvement_pct([0.0223], [0.0148])[0] == pytest.approx(33.63, abs=0.005)

    def test_sign(self):
        assert improvement_pct([1.0, 1.0], [0.5, 2.0]).tolist() == [50.0, -100.0]

    def test_nonpositive_baseline(self):
        with pytest.raises(EvaluationError):
            improvement_pct([0.0], [1.0])


def _records(dates):
    rng = np.random.default_rng(0)
    n = len(dates)
    mk = lambda name, s: ModelForecasts(name, list(dates), rng.standard_normal((n, 2)) * s,
                                        np.zeros((n, 2)))
    return ForecastRecordSet(("A", "B"), {"VAR": mk("VAR", 1.0), "VAR-t-LSTM": mk("VAR-t-LSTM", 0.5)})


class TestRegimes:
    def test_split_counts(self):
        dates = business_days(date(2020, 1, 1), 400)
        rs = _records(dates)
        cal = default_calendar()
        split = regime_split(rs, cal)
        assert list(split) == [FULL_SAMPLE, *cal.labels(), NORMAL_PERIODS]
        assert split[FULL_SAMPLE].n == 400
        inside = sum(any(r.contains(d) for r in cal.regimes) for d in dates)
        assert split[NORMAL_PERIODS].n == 400 - inside

    def test_regime_metrics_equal_masked_metrics(self):
        dates = business_days(date(2020, 1, 1), 300)
        rs = _records(dates)
        cal = RegimeCalendar([Regime("R", date(2020, 3, 1), date(2020, 6, 30))])
        t = regime_split(rs, cal)["R"]
        keep = np.array([cal.regimes[0].contains(d) for d in dates])
        e = rs.errors("VAR")[keep]
        np.testing.assert_allclose(t.get("VAR"), np.sqrt((e ** 2).mean(0)))

    def test_empty_regime_gives_nan(self):
        rs = _records(business_days(date(2020, 1, 1), 20))
        cal = RegimeCalendar([Regime("Later", date(2030, 1, 1), date(2030, 2, 1))])
        assert np.all(np.isnan(regime_split(rs, cal)["Later"].rmse))

    def test_calendar_validation(self):
        with pytest.raises(EvaluationError):
            RegimeCalendar([Regime("x", date(2021, 1, 2), date(2021, 1, 1))])
        with pytest.raises(EvaluationError):
            RegimeCalendar([Regime("x", date(2021, 1, 1), date(2021, 1, 2))] * 2)

    def test_default_calendar_flagged_approximate(self):
        assert "approximate" in default_calendar().note


def test_metric_table_shape():
    rs = _records(business_days(date(2020, 1, 1), 30))
    t = metric_table(rs)
    assert t.rmse.shape == (2, 2) and t.n == 30
