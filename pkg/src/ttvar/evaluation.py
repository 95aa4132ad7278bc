"""Forecast scoring: RMSE/MAE tables, Diebold-Mariano tests, rankings and regime splits."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)


class EvaluationError(ValueError):
    pass


class IndistinguishableForecasts(EvaluationError):
    """Raised when two error streams yield an identically zero loss differential."""


def _errors(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.size == 0:
        raise EvaluationError("empty error vector")
    return e


def rmse(errors) -> float:
    e = _errors(errors)
    return float(np.sqrt(np.mean(e * e)))


def mae(errors) -> float:
    return float(np.mean(np.abs(_errors(errors))))


def newey_west(d, bandwidth: int) -> float:
    """Bartlett-kernel long-run variance of ``d`` (autocovariances divided by ``T``)."""
    d = np.asarray(d, dtype=float)
    T = d.size
    if bandwidth < 0 or bandwidth >= T:
        raise EvaluationError(f"bandwidth {bandwidth} outside 0..{T - 1}")
    u = d - d.mean()
    omega = float(u @ u) / T
    for j in range(1, bandwidth + 1):
        omega += 2.0 * (1.0 - j / (bandwidth + 1.0)) * float(u[j:] @ u[:-j]) / T
    return omega


def auto_bandwidth(T: int) -> int:
    return int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True)
class DmResult:
    statistic: float
    p_value: float
    mean_diff: float
    hac_variance: float
    bandwidth: int
    n: int


def _loss(e: np.ndarray, loss: str) -> np.ndarray:
    if loss == "squared":
        L = e * e
    elif loss == "absolute":
        L = np.abs(e)
    else:
        raise ValueError("loss must be 'squared' or 'absolute'")
    return L.mean(axis=1) if L.ndim == 2 else L


def dm_test(errors_a, errors_b, loss: str = "squared", bandwidth: int | str = 0) -> DmResult:
    """Diebold-Mariano test of equal predictive accuracy.

    ``d_t = L(e_a,t) - L(e_b,t)``, so a positive statistic means ``b`` is
    more accurate.  2-D inputs (dates x assets) are reduced to the per-date
    mean loss across assets before differencing.

    Parameters
    ----------
    errors_a, errors_b : array_like
        Date-aligned forecast errors of equal shape, at least 10 dates.
    loss : {"squared", "absolute"}
    bandwidth : int or "auto"
        Bartlett lag truncation; ``"auto"`` uses ``floor(4 (T/100)^(2/9))``.
    """
    a = np.asarray(errors_a, dtype=float)
    b = np.asarray(errors_b, dtype=float)
    if a.shape != b.shape:
        raise EvaluationError(f"error shapes differ: {a.shape} vs {b.shape}")
    d = _loss(a, loss) - _loss(b, loss)
    T = d.size
    if T < 10:
        raise EvaluationError("dm_test needs at least 10 aligned observations")
    if not np.all(np.isfinite(d)):
        raise EvaluationError("non-finite loss differential")
    L = auto_bandwidth(T) if bandwidth == "auto" else int(bandwidth)
    if np.all(d == 0.0):
        raise IndistinguishableForecasts("forecasts are indistinguishable (zero loss differential)")
    omega = newey_west(d, L)
    if not omega > 0:
        raise EvaluationError(f"non-positive HAC variance {omega:.3g} at bandwidth {L}")
    dbar = float(d.mean())
    stat = dbar / math.sqrt(omega / T)
    return DmResult(stat, float(2.0 * stats.norm.sf(abs(stat))), dbar, omega, L, T)


@dataclass
class MetricTable:
    models: list
    assets: list
    rmse: np.ndarray    # models x assets
    mae: np.ndarray
    n: int = 0

    def __post_init__(self):
        self.rmse = np.asarray(self.rmse, dtype=float)
        self.mae = np.asarray(self.mae, dtype=float)
        shape = (len(self.models), len(self.assets))
        if self.rmse.shape != shape or self.mae.shape != shape:
            raise EvaluationError(f"metric arrays must have shape {shape}")

    def get(self, model: str, metric: str = "rmse") -> np.ndarray:
        return getattr(self, metric)[self.models.index(model)]


@dataclass(frozen=True)
class Ranking:
    models: list         # in final-rank order
    avg_rmse_rank: dict
    avg_mae_rank: dict
    overall: dict

    def top(self, n: int) -> list:
        return self.models[:n]


def rank_models(table: MetricTable) -> Ranking:
    """Average per-asset ranks (1 = best, ties averaged) of RMSE and MAE.

    Overall score is the mean of the two averages; models are ordered by
    overall score, then by name so the result does not depend on input order.
    """
    if np.isnan(table.rmse).any() or np.isnan(table.mae).any():
        raise EvaluationError("every model must be scored on every asset")
    r_rmse = np.apply_along_axis(stats.rankdata, 0, table.rmse).mean(axis=1)
    r_mae = np.apply_along_axis(stats.rankdata, 0, table.mae).mean(axis=1)
    overall = (r_rmse + r_mae) / 2.0
    order = sorted(range(len(table.models)), key=lambda i: (overall[i], table.models[i]))
    m = table.models
    return Ranking([m[i] for i in order],
                   {m[i]: float(r_rmse[i]) for i in range(len(m))},
                   {m[i]: float(r_mae[i]) for i in range(len(m))},
                   {m[i]: float(overall[i]) for i in range(len(m))})


def improvement_pct(baseline_rmse, candidate_rmse) -> np.ndarray:
    """``100 (baseline - candidate) / baseline`` per asset."""
    b = np.asarray(baseline_rmse, dtype=float)
    c = np.asarray(candidate_rmse, dtype=float)
    if np.any(b <= 0):
        raise EvaluationError("baseline RMSE must be positive")
    return 100.0 * (b - c) / b


def metric_table(records, models=None, mask=None) -> MetricTable:
    """RMSE/MAE per (model, asset) from a :class:`~ttvar.hybrid.ForecastRecordSet`.

    ``mask`` maps a date to ``True`` to keep it.
    """
    models = list(models or records.models)
    assets = list(records.symbols)
    R = np.full((len(models), len(assets)), np.nan)
    M = np.full_like(R, np.nan)
    n = 0
    for i, name in enumerate(models):
        mf = records.models[name]
        keep = np.ones(len(mf.dates), bool) if mask is None else np.array(
            [mask(d) for d in mf.dates], dtype=bool)
        e = mf.errors[keep]
        n = max(n, int(keep.sum()))
        if e.shape[0] == 0:
            continue
        R[i] = np.sqrt(np.mean(e * e, axis=0))
        M[i] = np.mean(np.abs(e), axis=0)
    return MetricTable(models, assets, R, M, n)


@dataclass(frozen=True)
class Regime:
    label: str
    start: date
    end: date

    def contains(self, d: date) -> bool:
        return self.start <= d <= self.end


@dataclass
class RegimeCalendar:
    regimes: list = field(default_factory=list)
    note: str = ""

    def __post_init__(self):
        labels = [r.label for r in self.regimes]
        if len(set(labels)) != len(labels):
            raise EvaluationError("regime labels must be unique")
        for r in self.regimes:
            if r.start > r.end:
                raise EvaluationError(f"regime {r.label}: start after end")

    def labels(self) -> list:
        return [r.label for r in self.regimes]


FULL_SAMPLE = "Full Sample"
NORMAL_PERIODS = "Normal Periods"


def default_calendar() -> RegimeCalendar:
    """Approximate stress regimes (approximate: tune to your data).

    These boundaries are educated guesses sized to plausible test-day counts;
    they are not authoritative windows.
    """
    return RegimeCalendar([
        Regime("COVID Crisis", date(2020, 2, 20), date(2020, 7, 17)),
        Regime("Post-COVID Recovery", date(2020, 7, 20), date(2022, 1, 21)),
        Regime("Ukraine Energy Shock", date(2022, 2, 24), date(2022, 12, 23)),
        Regime("Inflation Tightening", date(2022, 3, 16), date(2024, 2, 9)),
    ], note="approximate: tune to your data")


def regime_split(records, calendar: RegimeCalendar, models=None) -> dict:
    """Metric tables for the full sample, each regime and the uncovered remainder.

    Keys are ``"Full Sample"``, the regime labels in calendar order and
    ``"Normal Periods"``.  Empty buckets yield all-NaN tables with ``n = 0``.
    """
    out = {FULL_SAMPLE: metric_table(records, models)}
    for r in calendar.regimes:
        t = metric_table(records, models, mask=r.contains)
        if t.n == 0:
            logger.warning("regime %s has no test dates", r.label)
        out[r.label] = t
    def normal(d):
        return not any(r.contains(d) for r in calendar.regimes)

    out[NORMAL_PERIODS] = metric_table(records, models, mask=normal)
    if out[NORMAL_PERIODS].n == 0:
        logger.info("no test dates outside the regime calendar")
    return out
