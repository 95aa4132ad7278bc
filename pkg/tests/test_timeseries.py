"""Price/return panels, CSV ingestion and window plans."""

from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ttvar.timeseries import (
    DataError,
    PricePanel,
    ReturnPanel,
    WindowPlan,
    business_days,
    load_price_csv,
    load_return_csv,
    to_log_returns,
    write_return_csv,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLogReturns:
    def test_two_day_example(self):
        """Prices 100 -> 110 give a single log return ln(1.1)."""
        p = PricePanel([date(2020, 1, 1), date(2020, 1, 2)], ["A"], np.array([[100.0], [110.0]]))
        r = to_log_returns(p)
        assert r.T == 1
        assert r.returns[0, 0] == pytest.approx(np.log(1.1), abs=1e-15)
        assert r.dates == (date(2020, 1, 2),)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (12, 2), elements=st.floats(0.5, 500.0)))
    def test_cumulative_sum_recovers_log_price(self, prices):
        """Summed log returns telescope to log(P_t / P_0)."""
        p = PricePanel(business_days(date(2020, 1, 1), 12), ["A", "B"], prices)
        r = to_log_returns(p).returns
        np.testing.assert_allclose(r.sum(axis=0), np.log(prices[-1] / prices[0]), atol=1e-12)

    def test_scale_invariance(self):
        """Multiplying a price column by a constant leaves its returns unchanged."""
        d = business_days(date(2021, 3, 1), 5)
        P = np.array([[1.0, 2.0], [1.1, 2.2], [1.05, 2.5], [1.2, 2.4], [1.3, 2.6]])
        a = to_log_returns(PricePanel(d, ["A", "B"], P)).returns
        b = to_log_returns(PricePanel(d, ["A", "B"], P * [7.0, 1.0])).returns
        np.testing.assert_allclose(a, b, atol=1e-14)


class TestPanelValidation:
    def test_non_positive_price_rejected(self):
        with pytest.raises(DataError):
            PricePanel(business_days(date(2020, 1, 1), 2), ["A"], np.array([[1.0], [0.0]]))

    def test_dates_must_increase(self):
        with pytest.raises(DataError):
            ReturnPanel([date(2020, 1, 2), date(2020, 1, 1)], ["A"], np.zeros((2, 1)))

    def test_returns_are_read_only(self):
        r = ReturnPanel.from_array(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            r.returns[0, 0] = 1.0

    def test_unknown_symbol(self):
        r = ReturnPanel.from_array(np.zeros((3, 2)), symbols=["A", "B"])
        with pytest.raises(DataError):
            r.select(["C"])

    def test_slice_and_select(self):
        r = ReturnPanel.from_array(np.arange(12.0).reshape(6, 2), symbols=["A", "B"])
        s = r.slice(1, 4).select(["B"])
        assert s.T == 3 and s.K == 1
        np.testing.assert_array_equal(s.returns[:, 0], [3.0, 5.0, 7.0])


class TestCsv:
    def test_rows_with_gaps_dropped(self, tmp_path):
        """Rows with a blank or non-positive price are removed and counted."""
        f = _write(tmp_path / "p.csv", "date,A,B\n2020-01-01,1,2\n2020-01-02,,2\n"
                                       "2020-01-03,1.1,-1\n2020-01-06,1.2,2.1\n")
        p = load_price_csv(f)
        assert p.dropped_rows == 2
        assert p.dates == (date(2020, 1, 1), date(2020, 1, 6))

    def test_unsorted_input_is_sorted(self, tmp_path):
        f = _write(tmp_path / "p.csv", "date,A\n2020-01-03,3\n2020-01-01,1\n2020-01-02,2\n")
        np.testing.assert_array_equal(load_price_csv(f).prices[:, 0], [1.0, 2.0, 3.0])

    def test_duplicate_dates(self, tmp_path):
        f = _write(tmp_path / "p.csv", "date,A\n2020-01-01,1\n2020-01-01,2\n")
        with pytest.raises(DataError):
            load_price_csv(f)

    def test_bad_date(self, tmp_path):
        f = _write(tmp_path / "p.csv", "date,A\n01/02/2020,1\n")
        with pytest.raises(DataError):
            load_price_csv(f)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_price_csv(tmp_path / "nope.csv")

    def test_return_round_trip_exact(self, tmp_path):
        """Writing then reading a return panel reproduces every float exactly."""
        rng = np.random.default_rng(3)
        r = ReturnPanel.from_array(rng.standard_normal((20, 3)) * 0.01, symbols=["X", "Y", "Z"])
        write_return_csv(r, tmp_path / "r.csv")
        back = load_return_csv(tmp_path / "r.csv")
        assert back.dates == r.dates and back.symbols == r.symbols
        np.testing.assert_array_equal(back.returns, r.returns)

    def test_symbol_subset(self, tmp_path):
        f = _write(tmp_path / "p.csv", "date,A,B\n2020-01-01,1,5\n2020-01-02,2,6\n")
        assert load_price_csv(f, ["B"]).prices[:, 0].tolist() == [5.0, 6.0]


class TestWindowPlan:
    def test_short_training_rejected(self):
        with pytest.raises(DataError):
            WindowPlan(20, 5).validate(p_max=10, K=3)

    def test_bad_strides(self):
        with pytest.raises(DataError):
            WindowPlan(500, 5, refit_stride_var=0).validate(p_max=2, K=2)

    def test_valid(self):
        WindowPlan(500, 50).validate(p_max=10, K=6)


def test_business_days_skip_weekends():
    d = business_days(date(2021, 1, 1), 3)   # Friday
    assert d == (date(2021, 1, 1), date(2021, 1, 4), date(2021, 1, 5))
