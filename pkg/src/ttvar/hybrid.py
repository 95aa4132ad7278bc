"""Strictly recursive walk-forward backtests of econometric, ML and hybrid models.

For every test row ``t`` only rows ``< t`` enter any estimate:

1. the econometric base (Gaussian or Student-t VAR) is refitted every
   ``refit_stride_var`` steps;
2. its in-sample residual stream is rebuilt over the training span;
3. the residual learner is refitted every ``refit_stride_learner`` steps
   (hyperparameters tuned once, on the first window, when a budget is set);
4. the forecast is ``base + learner(last q residuals)``.

Standalone learners see the last ``q`` raw returns instead of residuals.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date

import numpy as np

from .learners import LearnerConfig, lag_matrix, predict, train, tune
from .learners.data import SupervisedSet
from .rng import child_seed
from .timeseries import DataError, ReturnPanel, WindowPlan
from .var_gaussian import fit_var, forecast_one_step, residual_matrix, select_lag
from .var_student_t import TVarOptions, fit_t_var

logger = logging.getLogger(__name__)

BASE_NAMES = {"var": "VAR", "tvar": "VAR-t"}
LEARNER_NAMES = {"svr": "SVR", "mlp": "MLP", "lstm": "LSTM", "gru": "GRU"}


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    base: str | None       # "var", "tvar" or None
    learner: str | None    # learner kind or None

    @property
    def name(self) -> str:
        parts = []
        if self.base:
            parts.append(BASE_NAMES[self.base])
        if self.learner:
            parts.append(LEARNER_NAMES[self.learner])
        return "-".join(parts)

    @property
    def is_hybrid(self) -> bool:
        return self.base is not None and self.learner is not None


def parse_model(token: str) -> ModelSpec:
    """``var``, ``tvar``, ``lstm``, ``var-svr``, ``tvar-lstm`` or the display names."""
    t = token.strip().lower().replace("var-t", "tvar").replace("_", "-")
    parts = [s for s in t.split("-") if s]
    base = learner = None
    if parts and parts[0] in BASE_NAMES:
        base = parts.pop(0)
    if parts and parts[0] in LEARNER_NAMES:
        learner = parts.pop(0)
    if parts or (base is None and learner is None):
        raise PipelineError(f"cannot parse model {token!r}")
    return ModelSpec(base, learner)


ALL_MODELS = tuple(parse_model(m) for m in (
    "var", "tvar", "svr", "mlp", "lstm", "gru",
    "var-svr", "var-mlp", "var-lstm", "var-gru",
    "tvar-svr", "tvar-mlp", "tvar-lstm", "tvar-gru"))


@dataclass
class PipelineSpec:
    models: list
    plan: WindowPlan
    p: int | None = 1            # None selects by AIC on the first window
    p_max: int = 10
    q: int = 5
    learners: dict = field(default_factory=dict)   # kind -> LearnerConfig
    tune_budget: dict = field(default_factory=dict)  # kind -> trials
    seed: int = 0
    tvar: TVarOptions = field(default_factory=TVarOptions)
    warm_start: bool = True

    def __post_init__(self):
        self.models = [m if isinstance(m, ModelSpec) else parse_model(m) for m in self.models]
        if not self.models:
            raise PipelineError("no models requested")
        names = [m.name for m in self.models]
        if len(set(names)) != len(names):
            raise PipelineError("duplicate models in spec")
        if self.q < 1:
            raise PipelineError("q must be >= 1")

    def learner_config(self, kind: str) -> LearnerConfig:
        cfg = self.learners.get(kind) or LearnerConfig(kind=kind)
        return replace(cfg, q=self.q)


@dataclass
class ModelForecasts:
    name: str
    dates: list
    forecast: np.ndarray
    realized: np.ndarray
    base: np.ndarray | None = None
    correction: np.ndarray | None = None
    learner_refits: list = field(default_factory=list)   # test-step indices of learner refits
    failures: list = field(default_factory=list)         # (date, message)

    @property
    def errors(self) -> np.ndarray:
        return self.realized - self.forecast


@dataclass
class ForecastRecordSet:
    symbols: tuple
    models: dict   # name -> ModelForecasts, in spec order

    @property
    def failure_count(self) -> int:
        return sum(len(m.failures) for m in self.models.values())

    def errors(self, model: str) -> np.ndarray:
        return self.models[model].errors

    def records(self):
        """Yield ``(model, date, asset, forecast, realized, error, base, correction)``."""
        for name, mf in self.models.items():
            for i, d in enumerate(mf.dates):
                for k, sym in enumerate(self.symbols):
                    f = mf.forecast[i, k]
                    r = mf.realized[i, k]
                    base = mf.base[i, k] if mf.base is not None else None
                    corr = mf.correction[i, k] if mf.correction is not None else None
                    yield Record(name, d, sym, f, r, r - f, base, corr)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["model", "date", "asset", "forecast", "realized", "error", "base", "correction"])
            for rec in self.records():
                w.writerow([rec.model, rec.date.isoformat(), rec.asset, repr(float(rec.forecast)),
                            repr(float(rec.realized)), repr(float(rec.error)),
                            "" if rec.base is None else repr(float(rec.base)),
                            "" if rec.correction is None else repr(float(rec.correction))])

    @classmethod
    def from_csv(cls, path) -> "ForecastRecordSet":
        rows = {}
        symbols = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                if row["asset"] not in symbols:
                    symbols.append(row["asset"])
                rows.setdefault(row["model"], []).append(row)
        models = {}
        K = len(symbols)
        for name, rs in rows.items():
            dates = sorted({date.fromisoformat(r["date"]) for r in rs})
            di = {d: i for i, d in enumerate(dates)}
            n = len(dates)
            F, R = np.full((n, K), np.nan), np.full((n, K), np.nan)
            hybrid = bool(rs[0]["base"])
            B = np.full((n, K), np.nan) if hybrid else None
            C = np.full((n, K), np.nan) if hybrid else None
            for r in rs:
                i, k = di[date.fromisoformat(r["date"])], symbols.index(r["asset"])
                F[i, k], R[i, k] = float(r["forecast"]), float(r["realized"])
                if hybrid:
                    B[i, k], C[i, k] = float(r["base"]), float(r["correction"])
            if np.isnan(F).any():
                raise DataError(f"model {name}: missing (date, asset) cells in {path}")
            models[name] = ModelForecasts(name, dates, F, R, B, C)
        return cls(tuple(symbols), models)


@dataclass(frozen=True)
class Record:
    model: str
    date: date
    asset: str
    forecast: float
    realized: float
    error: float
    base: float | None = None
    correction: float | None = None


def hybrid_combine(base, correction) -> np.ndarray:
    base = np.asarray(base, dtype=float)
    correction = np.asarray(correction, dtype=float)
    if base.shape != correction.shape:
        raise ValueError(f"shape mismatch {base.shape} vs {correction.shape}")
    return base + correction


def decompose_record(rec: Record) -> tuple[float, float, float]:
    """``(mu_hat, g_hat, u_hat)`` with ``mu_hat + g_hat + u_hat == realized``."""
    if rec.base is None or rec.correction is None:
        raise PipelineError(f"record for {rec.model} is not a hybrid record")
    mu, g = rec.base, rec.correction
    return mu, g, rec.realized - mu - g


def _fit_base(kind: str, hist: ReturnPanel, p: int, opts: TVarOptions, prev):
    if kind == "var":
        return fit_var(hist, p)
    init = prev if prev is not None else None
    return fit_t_var(hist, p, opts, init=init)


def resolve_lag(panel: ReturnPanel, spec: PipelineSpec) -> int:
    if spec.p is not None:
        return int(spec.p)
    first = panel.slice(0, spec.plan.train_len)
    return select_lag(first, spec.p_max).chosen["aic"]


def run_model(panel: ReturnPanel, spec: PipelineSpec, model: ModelSpec, p: int) -> ModelForecasts:
    plan = spec.plan
    y = panel.returns
    T, K = y.shape
    start, stop = plan.train_len, plan.train_len + plan.test_len
    q = spec.q
    base_model = None
    learner = None
    cfg = spec.learner_config(model.learner) if model.learner else None
    refit_index = 0
    dates, F, Bs, Cs, R = [], [], [], [], []
    refits, failures = [], []
    for step, t in enumerate(range(start, stop)):
        lo = 0 if plan.expanding else t - plan.train_len
        try:
            base_fc = np.zeros(K)
            if model.base:
                if base_model is None or step % plan.refit_stride_var == 0:
                    hist = ReturnPanel(panel.dates[lo:t], panel.symbols, y[lo:t])
                    prev = base_model if (spec.warm_start and model.base == "tvar") else None
                    base_model = _fit_base(model.base, hist, p, spec.tvar, prev)
                base_fc = forecast_one_step(base_model, y[t - p:t])
            corr = np.zeros(K)
            if model.learner:
                if learner is None or step % plan.refit_stride_learner == 0:
                    stream = residual_matrix(base_model, y[lo:t]) if model.base else y[lo:t]
                    X, Y = lag_matrix(stream, q)
                    ds = SupervisedSet(X, Y, q)
                    if refit_index == 0 and spec.tune_budget.get(model.learner, 0) > 0:
                        res = tune(model.learner, ds, spec.tune_budget[model.learner],
                                   child_seed(spec.seed, model.name, "tune"), base=cfg)
                        cfg = res.best
                    cfg_i = replace(cfg, seed=child_seed(spec.seed, model.name, refit_index))
                    learner = train(ds, cfg_i)
                    refits.append(step)
                    refit_index += 1
                if model.base:
                    recent = residual_matrix(base_model, y[t - p - q:t])
                else:
                    recent = y[t - q:t]
                corr = predict(learner, recent)
            fc = hybrid_combine(base_fc, corr)
            if not np.all(np.isfinite(fc)):
                raise FloatingPointError("non-finite forecast")
        except (ValueError, ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
            logger.warning("%s failed at %s: %s", model.name, panel.dates[t], exc)
            failures.append((panel.dates[t], str(exc)))
            continue
        dates.append(panel.dates[t])
        F.append(fc)
        Bs.append(base_fc)
        Cs.append(corr)
        R.append(y[t])
    F = np.array(F).reshape(-1, K)
    mf = ModelForecasts(model.name, dates, F, np.array(R).reshape(-1, K),
                        np.array(Bs).reshape(-1, K) if model.is_hybrid else None,
                        np.array(Cs).reshape(-1, K) if model.is_hybrid else None,
                        refits, failures)
    return mf


def run_recursive(panel: ReturnPanel, spec: PipelineSpec, threads: int = 1) -> ForecastRecordSet:
    """Run every model in ``spec`` over the test span; output is schedule independent."""
    plan = spec.plan
    if panel.T < plan.train_len + plan.test_len:
        raise PipelineError(
            f"panel has {panel.T} rows, need train_len + test_len = {plan.train_len + plan.test_len}")
    p = resolve_lag(panel, spec)
    plan.validate(max(p, 1) if spec.p is not None else spec.p_max, panel.K)
    if plan.train_len - p - spec.q < 10:
        raise PipelineError("training window too short for the lag structure")
    if any(m.base for m in spec.models) and plan.train_len < p + spec.q + 1:
        raise PipelineError("training window shorter than p + q")

    def job(m):
        return run_model(panel, spec, m, p)

    if threads > 1 and len(spec.models) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(job, spec.models))
    else:
        out = [job(m) for m in spec.models]
    return ForecastRecordSet(tuple(panel.symbols), {mf.name: mf for mf in out})
