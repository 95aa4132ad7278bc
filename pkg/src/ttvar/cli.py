"""Command-line entry point ``ttvar``.

Exit codes: 0 success, 1 usage, config or input-data error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config, parse_regimes
from .diagnostics import DiagnosticError, acf, diagnose_panel, qq_points
from .evaluation import EvaluationError, dm_test, default_calendar
from .hybrid import ForecastRecordSet, PipelineError, run_recursive
from .learners import TrainingError
from .modelio import save_model
from .report import (
    ReportError,
    write_acf,
    write_correlation,
    write_diagnostics,
    write_evaluation,
    write_lag_selection,
    write_manifest,
    write_qq,
)
from .simulation import DgpError, DgpSpec, simulate
from .timeseries import DataError, load_price_csv, load_return_csv, to_log_returns, write_return_csv
from .var_gaussian import EstimationError, fit_var, residual_correlation, residuals, select_lag
from .var_student_t import CovarianceError, fit_t_var

logger = logging.getLogger("ttvar")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_globals(p, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="run configuration file")
    p.add_argument("--seed", type=int, default=d, help="master seed (overrides config)")
    p.add_argument("--out", default=d, help="output file or directory")
    p.add_argument("--threads", type=int, default=d, help="worker threads across models")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ttvar", description=__doc__.splitlines()[0])
    _add_globals(ap, suppress=False)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _add_globals(p, suppress=True)
        return p

    p = cmd("ingest", "wide price CSV -> log-return CSV")
    p.add_argument("prices")
    p.add_argument("--symbols", help="comma-separated subset")

    p = cmd("diagnose", "stylized-facts tables and plot data")
    p.add_argument("returns")
    p.add_argument("--adf-lag", type=int)
    p.add_argument("--arch-lags", type=int, default=40)
    p.add_argument("--bds-m", type=int, default=6)
    p.add_argument("--bds-eps", type=float, default=0.7, help="radius in std units")
    p.add_argument("--acf-lags", type=int, default=40)
    p.add_argument("--kurtosis-convention", choices=("excess", "raw"), default="excess")

    p = cmd("select-lag", "information criteria for lags 0..p_max")
    p.add_argument("returns")
    p.add_argument("--p-max", type=int, default=10)

    p = cmd("fit", "fit a Gaussian or Student-t VAR")
    p.add_argument("returns")
    p.add_argument("--model", choices=("var", "tvar"), default="tvar")
    p.add_argument("--p", default="auto", help="lag order or 'auto' (AIC)")
    p.add_argument("--p-max", type=int, default=10)

    p = cmd("simulate", "write a synthetic return panel")
    p.add_argument("--kind", default="var_t",
                   choices=("var_t", "var_gaussian", "garch11", "logistic_map", "nonlinear_residual"))
    p.add_argument("--T", type=int, default=2000)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--nu", type=float, default=6.0)
    p.add_argument("--amplitude", type=float, default=0.5)

    cmd("backtest", "walk-forward forecasts from --config")

    p = cmd("evaluate", "score a records CSV")
    p.add_argument("records")
    p.add_argument("--regimes", help="config file with a [regimes] section")
    p.add_argument("--candidate")
    p.add_argument("--baseline", default="VAR")
    p.add_argument("--loss", choices=("squared", "absolute"), default="squared")
    p.add_argument("--bandwidth", default="0")

    p = cmd("dm", "Diebold-Mariano test between two models")
    p.add_argument("records")
    p.add_argument("--candidate", required=True)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--loss", choices=("squared", "absolute"), default="squared")
    p.add_argument("--bandwidth", default="0")

    cmd("report", "backtest plus all evaluation tables from --config")
    return ap


def _bandwidth(raw: str):
    if raw == "auto":
        return "auto"
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"bandwidth must be an integer or 'auto', got {raw!r}") from None


def _out(args, default: str) -> Path:
    return Path(args.out if getattr(args, "out", None) else default)


def _returns(path):
    return load_return_csv(path)


def cmd_ingest(args) -> int:
    syms = args.symbols.split(",") if args.symbols else None
    prices = load_price_csv(args.prices, syms)
    rets = to_log_returns(prices)
    out = _out(args, "returns.csv")
    write_return_csv(rets, out)
    print(f"wrote {rets.T} x {rets.K} log returns to {out} ({prices.dropped_rows} price rows dropped)")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    panel = _returns(args.returns)
    out = _out(args, "diagnostics")
    diag = diagnose_panel(panel, args.adf_lag, args.arch_lags, args.bds_m, args.bds_eps,
                          args.kurtosis_convention)
    paths = write_diagnostics(diag, out)
    for k, sym in enumerate(panel.symbols):
        x = panel.returns[:, k]
        rho, band = acf(x, args.acf_lags, squared=True)
        paths.append(write_acf(rho, band, out / f"acf_{sym}.csv"))
        paths.append(write_qq(qq_points(x, "gaussian"), out / f"qq_{sym}.csv"))
        paths.append(write_qq(qq_points(x, "student_t"), out / f"qq_t_{sym}.csv"))
    write_manifest(out, "diagnose", 0, extra={"returns": args.returns})
    print(f"wrote {len(paths)} files to {out}")
    return EXIT_OK


def cmd_select_lag(args) -> int:
    panel = _returns(args.returns)
    sel = select_lag(panel, args.p_max)
    out = _out(args, "lag_selection.csv")
    write_lag_selection(sel, out)
    print(" ".join(f"{k}={v}" for k, v in sel.chosen.items()))
    return EXIT_OK


def cmd_fit(args) -> int:
    panel = _returns(args.returns)
    if args.p == "auto":
        p = select_lag(panel, args.p_max).chosen["aic"]
    else:
        try:
            p = int(args.p)
        except ValueError:
            raise UsageError(f"--p must be an integer or 'auto', got {args.p!r}") from None
    model = fit_var(panel, p) if args.model == "var" else fit_t_var(panel, p)
    out = _out(args, "model")
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / args.model)
    write_correlation(residual_correlation(residuals(model, panel)), panel.symbols,
                      out / "residual_correlation.csv")
    extra = f" nu={model.nu:.4f}" if args.model == "tvar" else ""
    print(f"fitted {args.model} p={p} on {panel.T} rows{extra}; wrote {out}")
    return EXIT_OK


def _sim_spec(args, seed: int) -> DgpSpec:
    K = args.K
    if args.kind in ("garch11", "logistic_map"):
        return DgpSpec(kind=args.kind, T=args.T, seed=seed)
    A = [np.diag(np.full(K, 0.2)) + 0.05 * np.eye(K, k=1)]
    sigma = 1e-4 * (0.7 * np.eye(K) + 0.3)
    return DgpSpec(kind=args.kind, T=args.T, seed=seed, A=A, sigma=sigma, nu=args.nu,
                   amplitude=args.amplitude)


def cmd_simulate(args) -> int:
    from .timeseries import ReturnPanel

    seed = args.seed if args.seed is not None else 0
    spec = _sim_spec(args, seed)
    res = simulate(spec)
    if isinstance(res, ReturnPanel):
        panel = res
    elif hasattr(res, "panel"):
        panel = res.panel
    else:
        panel = ReturnPanel.from_array(np.asarray(res)[:, None], ["X1"])
    out = _out(args, "simulated.csv")
    write_return_csv(panel, out)
    print(f"wrote {panel.T} x {panel.K} {args.kind} rows to {out}")
    return EXIT_OK


def _load_config(args):
    if not args.config:
        raise UsageError("--config is required for this command")
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _panel_from_config(cfg):
    if cfg.data_kind == "returns":
        panel = load_return_csv(cfg.data_path, cfg.symbols)
    else:
        panel = to_log_returns(load_price_csv(cfg.data_path, cfg.symbols))
    return panel


def _backtest(cfg, threads):
    panel = _panel_from_config(cfg)
    spec = cfg.pipeline_spec(panel.T)
    return run_recursive(panel, spec, threads=threads)


def cmd_backtest(args) -> int:
    cfg = _load_config(args)
    threads = args.threads or cfg.threads
    t0 = time.perf_counter()
    records = _backtest(cfg, threads)
    out = Path(args.out) if args.out else cfg.out / "records.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    records.to_csv(out)
    write_manifest(out.parent, "backtest", cfg.seed, cfg, time.perf_counter() - t0,
                   {"records": out, "threads": threads, "failures": records.failure_count})
    print(f"wrote records for {len(records.models)} models to {out}; failures={records.failure_count}")
    return EXIT_OK if records.failure_count == 0 else EXIT_NUMERIC


def _calendar(path):
    return parse_regimes(path) if path else default_calendar()


def cmd_evaluate(args) -> int:
    records = ForecastRecordSet.from_csv(args.records)
    out = _out(args, "evaluation")
    paths = write_evaluation(records, out, _calendar(args.regimes), args.candidate,
                             args.baseline, args.loss, _bandwidth(args.bandwidth))
    write_manifest(out, "evaluate", 0, extra={"records": args.records})
    print(f"wrote {len(paths)} files to {out}")
    return EXIT_OK


def cmd_dm(args) -> int:
    records = ForecastRecordSet.from_csv(args.records)
    for m in (args.candidate, args.benchmark):
        if m not in records.models:
            raise UsageError(f"model {m!r} not in records (have {', '.join(records.models)})")
    c, b = records.models[args.candidate], records.models[args.benchmark]
    common = sorted(set(c.dates) & set(b.dates))
    ic = [c.dates.index(d) for d in common]
    ib = [b.dates.index(d) for d in common]
    bw = _bandwidth(args.bandwidth)
    print("asset,statistic,p_value,mean_diff,bandwidth")
    for k, sym in enumerate(records.symbols):
        r = dm_test(b.errors[ib, k], c.errors[ic, k], args.loss, bw)
        print(f"{sym},{r.statistic:.6f},{r.p_value:.6g},{r.mean_diff:.6g},{r.bandwidth}")
    r = dm_test(b.errors[ib], c.errors[ic], args.loss, bw)
    print(f"pooled,{r.statistic:.6f},{r.p_value:.6g},{r.mean_diff:.6g},{r.bandwidth}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _load_config(args)
    threads = args.threads or cfg.threads
    out = Path(args.out) if args.out else cfg.out
    t0 = time.perf_counter()
    records = _backtest(cfg, threads)
    out.mkdir(parents=True, exist_ok=True)
    records.to_csv(out / "records.csv")
    paths = write_evaluation(records, out, cfg.calendar)
    write_manifest(out, "report", cfg.seed, cfg, time.perf_counter() - t0,
                   {"threads": threads, "failures": records.failure_count,
                    "calendar": cfg.calendar.note})
    print(f"wrote {len(paths) + 2} files to {out}; failures={records.failure_count}")
    return EXIT_OK if records.failure_count == 0 else EXIT_NUMERIC


COMMANDS = {"ingest": cmd_ingest, "diagnose": cmd_diagnose, "select-lag": cmd_select_lag,
            "fit": cmd_fit, "simulate": cmd_simulate, "backtest": cmd_backtest,
            "evaluate": cmd_evaluate, "dm": cmd_dm, "report": cmd_report}

_USAGE_ERRORS = (UsageError, ConfigError, DataError, DgpError, PipelineError, ReportError,
                 FileNotFoundError)
_NUMERIC_ERRORS = (EstimationError, CovarianceError, TrainingError, DiagnosticError,
                   EvaluationError, np.linalg.LinAlgError, FloatingPointError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _NUMERIC_ERRORS as exc:
        print(f"ttvar: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _USAGE_ERRORS as exc:
        print(f"ttvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
