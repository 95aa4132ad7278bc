"""CSV writers for result tables, plot data and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import (
    FULL_SAMPLE,
    EvaluationError,
    MetricTable,
    Ranking,
    dm_test,
    improvement_pct,
)


class ReportError(OSError):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return "NaN"
    return f"{x:.10g}"


def _writer_rows(path, header, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from None
    return path


def write_metric_table(table: MetricTable, path, metric: str = "rmse") -> Path:
    """One row per model with one column per asset (RMSE or MAE table layout)."""
    vals = getattr(table, metric)
    rows = [[m, *(fmt(v) for v in vals[i])] for i, m in enumerate(table.models)]
    return _writer_rows(path, ["Model", *table.assets], rows)


def _ordinal(n: int) -> str:
    suffix = "th" if 10 <= n % 100 <= 20 else {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def write_ranking(rank: Ranking, path) -> Path:
    rows = []
    for i, m in enumerate(rank.models, start=1):
        rows.append([m, f"{rank.avg_rmse_rank[m]:.2f}", f"{rank.avg_mae_rank[m]:.2f}",
                     f"{rank.overall[m]:.2f}", _ordinal(i)])
    return _writer_rows(path, ["Model", "Avg. RMSE Rank", "Avg. MAE Rank",
                               "Overall Score", "Final Rank"], rows)


def dm_rows(records, candidate: str, benchmarks=None, loss: str = "squared",
            bandwidth=0) -> list:
    """Per-asset DM statistics of each benchmark against ``candidate``.

    Positive values mean the candidate is more accurate.  Cells that cannot
    be computed hold ``NaN``.
    """
    benchmarks = [m for m in (benchmarks or records.models) if m != candidate]
    ec = records.models[candidate]
    rows = []
    for b in benchmarks:
        eb = records.models[b]
        common = sorted(set(ec.dates) & set(eb.dates))
        ic = [ec.dates.index(d) for d in common]
        ib = [eb.dates.index(d) for d in common]
        stats_ = []
        for k in range(len(records.symbols)):
            try:
                r = dm_test(eb.errors[ib, k], ec.errors[ic, k], loss, bandwidth)
                stats_.append((r.statistic, r.p_value))
            except EvaluationError:
                stats_.append((float("nan"), float("nan")))
        rows.append((b, stats_))
    return rows


def write_dm_table(rows: list, symbols, path) -> Path:
    out = [[b, *(fmt(s) for s, _ in st)] for b, st in rows]
    _writer_rows(Path(path).with_name(Path(path).stem + "_pvalues.csv"),
                 ["Benchmark Model", *symbols], [[b, *(fmt(p) for _, p in st)] for b, st in rows])
    return _writer_rows(path, ["Benchmark Model", *symbols], out)


def write_regime_table(split: dict, path, models=None) -> Path:
    first = next(iter(split.values()))
    assets = first.assets
    header = ["Regime", "N", "Model"]
    for a in assets:
        header += [f"{a} RMSE", f"{a} MAE"]
    rows = []
    for label, t in split.items():
        for i, m in enumerate(t.models):
            if models and m not in models:
                continue
            cells = []
            for k in range(len(assets)):
                cells += [fmt(t.rmse[i, k]), fmt(t.mae[i, k])]
            rows.append([label, t.n, m, *cells])
    return _writer_rows(path, header, rows)


def improvement_rows(split: dict, baseline: str, candidate: str) -> list:
    rows = []
    for label, t in split.items():
        if t.n == 0:
            continue
        try:
            imp = improvement_pct(t.get(baseline), t.get(candidate))
        except (EvaluationError, ValueError):
            continue
        rows.append((label, imp, float(np.mean(imp))))
    return rows


def write_improvement_table(rows: list, assets, path) -> Path:
    out = [[label, *(f"{v:.2f}%" for v in imp), f"{avg:.2f}%"] for label, imp, avg in rows]
    return _writer_rows(path, ["Market Regime", *assets, "Average"], out)


def write_tracking(records, model: str, path) -> Path:
    """Forecast-vs-realized and absolute-error trajectories for one model."""
    mf = records.models[model]
    rows = []
    for i, d in enumerate(mf.dates):
        for k, a in enumerate(records.symbols):
            f, r = mf.forecast[i, k], mf.realized[i, k]
            rows.append([d.isoformat(), a, fmt(r), fmt(f), fmt(abs(r - f))])
    return _writer_rows(path, ["date", "asset", "realized", "forecast", "abs_error"], rows)


def write_evaluation(records, out_dir, calendar, candidate: str | None = None,
                     baseline: str = "VAR", loss: str = "squared", bandwidth=0) -> list:
    """Write every evaluation table for a record set; returns the written paths."""
    from .evaluation import metric_table, rank_models, regime_split

    out_dir = Path(out_dir)
    names = list(records.models)
    candidate = candidate or ("VAR-t-LSTM" if "VAR-t-LSTM" in names else names[-1])
    table = metric_table(records)
    paths = [write_metric_table(table, out_dir / "rmse_by_asset.csv", "rmse"),
             write_metric_table(table, out_dir / "mae_by_asset.csv", "mae"),
             write_ranking(rank_models(table), out_dir / "ranking.csv")]
    if len(names) > 1:
        paths.append(write_dm_table(dm_rows(records, candidate, loss=loss, bandwidth=bandwidth),
                                    records.symbols, out_dir / "dm_vs_candidate.csv"))
    split = regime_split(records, calendar)
    paths.append(write_regime_table(split, out_dir / "regime_metrics.csv"))
    if baseline in names and candidate in names and baseline != candidate:
        paths.append(write_improvement_table(improvement_rows(split, baseline, candidate),
                                             records.symbols, out_dir / "regime_improvement.csv"))
    for m in names:
        safe = m.replace("/", "_")
        paths.append(write_tracking(records, m, out_dir / f"tracking_{safe}.csv"))
    return paths


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, command: str, seed: int, config=None, wall_time: float | None = None,
                   extra: dict | None = None) -> Path:
    """Plain ``key: value`` manifest sufficient to rerun the command."""
    import numpy
    import scipy

    out_dir = Path(out_dir)
    lines = [
        f"command: {command}",
        f"seed: {seed}",
        f"ttvar: {__version__}",
        f"python: {platform.python_version()}",
        f"numpy: {numpy.__version__}",
        f"scipy: {scipy.__version__}",
        f"argv: {' '.join(sys.argv)}",
    ]
    if config is not None:
        lines.append(f"config: {config.source}")
        lines.append(f"config_sha256: {config.digest}")
        lines.append(f"data: {config.data_path}")
        lines.append(f"data_sha256: {file_digest(config.data_path)}")
        lines.append(f"models: {', '.join(m.name for m in config.models)}")
        for k, v in sorted(config.defaults_filled.items()):
            lines.append(f"default {k}: {v}")
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    if wall_time is not None:
        lines.append(f"wall_time_s: {wall_time:.3f}")
    lines.append(f"timestamp: {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    path = out_dir / "manifest.txt"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from None
    return path


def write_diagnostics(diag: dict, out_dir) -> list:
    """Descriptive/ADF/JB, ARCH-LM and BDS tables from :func:`ttvar.diagnostics.diagnose_panel`."""
    out_dir = Path(out_dir)
    t2, t3, t5 = [], [], []
    m_cols = None
    for sym, d in diag.items():
        s = d["stats"]
        t2.append([sym, fmt(s.mean), fmt(s.std_dev), fmt(s.skewness), fmt(s.kurtosis),
                   fmt(s.min), fmt(s.max), fmt(d["adf"].statistic), fmt(d["jb"].statistic)])
        a = d["arch"]
        t3.append([sym, fmt(a.lm_statistic), fmt(a.lm_p_value), fmt(a.f_statistic), fmt(a.f_p_value)])
        if d["bds"] is not None:
            m_cols = d["bds"].embedding_dims
            t5.append([sym, *(fmt(v) for v in d["bds"].statistics)])
    paths = [
        _writer_rows(out_dir / "descriptive.csv",
                     ["Asset", "Mean", "Std. Dev.", "Skewness", "Kurtosis", "Min", "Max",
                      "ADF", "Jarque-Bera"], t2),
        _writer_rows(out_dir / "arch_lm.csv",
                     ["Asset", "ARCH-LM Statistic", "p-value", "F Statistic", "F p-value"], t3),
    ]
    if t5:
        paths.append(_writer_rows(out_dir / "bds.csv",
                                  ["Asset", *(f"m={m}" for m in m_cols)], t5))
    return paths


def write_lag_selection(sel, path) -> Path:
    rows = [[lag, fmt(aic), fmt(bic), fmt(fpe), fmt(hq)] for lag, aic, bic, fpe, hq in sel.rows]
    return _writer_rows(path, ["Lag", "AIC", "BIC", "FPE", "HQIC"], rows)


def write_correlation(corr: np.ndarray, symbols, path) -> Path:
    rows = []
    for i, s in enumerate(symbols):
        rows.append([s, *(fmt(corr[i, j]) if j <= i else "" for j in range(len(symbols)))])
    return _writer_rows(path, ["Asset", *symbols], rows)


def write_acf(rho, band: float, path) -> Path:
    return _writer_rows(path, ["lag", "acf", "band"],
                        [[k + 1, fmt(r), fmt(band)] for k, r in enumerate(rho)])


def write_qq(qq, path) -> Path:
    rows = [[fmt(t), fmt(e)] for t, e in zip(qq.theoretical, qq.empirical)]
    return _writer_rows(path, ["theoretical", "empirical"], rows)


__all__ = [
    "FULL_SAMPLE", "ReportError", "dm_rows", "fmt", "improvement_rows", "write_acf",
    "write_correlation", "write_diagnostics", "write_dm_table", "write_evaluation",
    "write_improvement_table", "write_lag_selection", "write_manifest", "write_metric_table",
    "write_qq", "write_ranking", "write_regime_table", "write_tracking",
]
