"""Strict sectioned run configuration.

Grammar (``key = value`` lines, ``#`` or ``;`` comments)::

    [run]           seed (required), out, threads
    [data]          returns = path | prices = path (exactly one), symbols = A, B, ...
    [window]        train_len, test_len, refit_stride_var, refit_stride_learner, expanding
    [models]        list = var, tvar, tvar-lstm, ...;  p = auto | int;  p_max;  q
    [tvar]          max_iter, tol, nu_init, floor_ratio
    [learner.KIND]  hidden, learning_rate, epochs, patience, C, epsilon, gamma,
                    validation_fraction, svr_tol, svr_max_iter, init, trials
    [regimes]       Label = YYYY-MM-DD, YYYY-MM-DD   (replaces the default calendar)

Unknown sections or keys are errors.  Paths are resolved against the
directory of the config file.  Every default that fills a gap is recorded
in :attr:`RunConfig.defaults_filled` and echoed into the run manifest.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

from .evaluation import Regime, RegimeCalendar, default_calendar
from .hybrid import PipelineSpec, parse_model
from .learners import KINDS, LearnerConfig
from .timeseries import WindowPlan
from .var_student_t import TVarOptions


class ConfigError(ValueError):
    pass


DEFAULT_TRAIN_FRACTION = 0.8

_SCHEMA = {
    "run": {"seed": int, "out": str, "threads": int},
    "data": {"returns": str, "prices": str, "symbols": str},
    "window": {"train_len": int, "test_len": int, "refit_stride_var": int,
               "refit_stride_learner": int, "expanding": bool},
    "models": {"list": str, "p": str, "p_max": int, "q": int},
    "tvar": {"max_iter": int, "tol": float, "nu_init": float, "floor_ratio": float},
}
_LEARNER_KEYS = {"hidden": str, "learning_rate": float, "epochs": int, "patience": int,
                 "C": float, "epsilon": float, "gamma": float, "validation_fraction": float,
                 "svr_tol": float, "svr_max_iter": int, "init": str, "trials": int}
_DEFAULTS = {
    ("run", "out"): "results",
    ("run", "threads"): 1,
    ("window", "refit_stride_var"): 1,
    ("window", "refit_stride_learner"): 20,
    ("window", "expanding"): True,
    ("models", "p"): "auto",
    ("models", "p_max"): 10,
    ("models", "q"): 5,
}


@dataclass
class RunConfig:
    seed: int
    out: Path
    threads: int
    data_path: Path
    data_kind: str                 # "returns" or "prices"
    symbols: list | None
    window: dict
    models: list
    p: int | None
    p_max: int
    q: int
    learners: dict
    trials: dict
    tvar: TVarOptions
    calendar: RegimeCalendar
    defaults_filled: dict = field(default_factory=dict)
    source: Path | None = None
    digest: str = ""

    def plan(self, T: int) -> WindowPlan:
        """Window plan for a panel of ``T`` rows; missing lengths use an 80/20 split."""
        w = dict(self.window)
        if "train_len" not in w:
            w["train_len"] = int(math.floor(DEFAULT_TRAIN_FRACTION * T))
            self.defaults_filled["window.train_len"] = f"{w['train_len']} (80% of {T} rows)"
        if "test_len" not in w:
            w["test_len"] = T - w["train_len"]
            self.defaults_filled["window.test_len"] = f"{w['test_len']} (remaining rows)"
        return WindowPlan(w["train_len"], w["test_len"], w["refit_stride_var"],
                          w["refit_stride_learner"], w["expanding"])

    def pipeline_spec(self, T: int) -> PipelineSpec:
        return PipelineSpec(models=list(self.models), plan=self.plan(T), p=self.p,
                            p_max=self.p_max, q=self.q, learners=dict(self.learners),
                            tune_budget=dict(self.trials), seed=self.seed, tvar=self.tvar)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=int(seed))


def _convert(section: str, key: str, raw: str, typ):
    try:
        if typ is bool:
            v = raw.strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected {typ.__name__}, got {raw!r}") from None


def _split_list(raw: str) -> list:
    return [s.strip() for s in raw.split(",") if s.strip()]


def _parse_date(section, key, raw):
    try:
        return date.fromisoformat(raw.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: bad date {raw!r}") from None


def _calendar_from_items(items) -> RegimeCalendar:
    regimes = []
    for label, raw in items:
        parts = _split_list(raw)
        if len(parts) != 2:
            raise ConfigError(f"[regimes] {label}: expected 'start, end'")
        regimes.append(Regime(label, _parse_date("regimes", label, parts[0]),
                              _parse_date("regimes", label, parts[1])))
    try:
        return RegimeCalendar(regimes, note="from config")
    except ValueError as exc:
        raise ConfigError(f"[regimes] {exc}") from None


def _reader() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   delimiters=("=",))
    cp.optionxform = str
    return cp


def parse_regimes(path) -> RegimeCalendar:
    """Calendar from the ``[regimes]`` section of any config-format file."""
    cp = _reader()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read regimes from {path}: {exc}") from None
    if not cp.has_section("regimes"):
        raise ConfigError(f"{path}: missing [regimes] section")
    return _calendar_from_items(cp.items("regimes"))


def parse_config_text(text: str, base_dir: Path | None = None, source: Path | None = None) -> RunConfig:
    cp = _reader()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    base_dir = base_dir or Path(".")
    values = {}
    defaults = {}
    learner_sections = {}
    calendar = None
    for sec in cp.sections():
        if sec.startswith("learner."):
            kind = sec.split(".", 1)[1]
            if kind not in KINDS:
                raise ConfigError(f"unknown learner section [{sec}]")
            learner_sections[kind] = dict(cp.items(sec))
            continue
        if sec == "regimes":
            calendar = _calendar_from_items(cp.items(sec))
            continue
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            values[(sec, key)] = _convert(sec, key, raw, _SCHEMA[sec][key])
    for k, v in _DEFAULTS.items():
        if k not in values:
            values[k] = v
            defaults[f"{k[0]}.{k[1]}"] = v
    if ("run", "seed") not in values:
        raise ConfigError("[run] seed is required (no unseeded runs)")
    if ("models", "list") not in values:
        raise ConfigError("[models] list is required")
    has_r, has_p = ("data", "returns") in values, ("data", "prices") in values
    if has_r == has_p:
        raise ConfigError("[data] needs exactly one of 'returns' or 'prices'")
    kind = "returns" if has_r else "prices"
    path = Path(values[("data", kind)])
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"[data] {kind}: file not found: {path}")
    try:
        models = [parse_model(m) for m in _split_list(values[("models", "list")])]
    except ValueError as exc:
        raise ConfigError(f"[models] list: {exc}") from None
    if not models:
        raise ConfigError("[models] list is empty")
    p_raw = str(values[("models", "p")]).strip().lower()
    p = None if p_raw == "auto" else _convert("models", "p", p_raw, int)
    q = values[("models", "q")]
    learners, trials = {}, {}
    needed = {m.learner for m in models if m.learner}
    for kind_l in sorted(needed | set(learner_sections)):
        raw = learner_sections.get(kind_l, {})
        kw = {}
        for key, val in raw.items():
            if key not in _LEARNER_KEYS:
                raise ConfigError(f"unknown key {key!r} in [learner.{kind_l}]")
            if key == "hidden":
                try:
                    kw["hidden"] = tuple(int(h) for h in _split_list(val))
                except ValueError:
                    raise ConfigError(f"[learner.{kind_l}] hidden: expected integers") from None
            elif key == "trials":
                trials[kind_l] = _convert(f"learner.{kind_l}", key, val, int)
            else:
                kw[key] = _convert(f"learner.{kind_l}", key, val, _LEARNER_KEYS[key])
        try:
            cfg = LearnerConfig(kind=kind_l, q=q, seed=values[("run", "seed")], **kw)
        except ValueError as exc:
            raise ConfigError(f"[learner.{kind_l}] {exc}") from None
        for f in ("hidden", "learning_rate", "epochs", "patience"):
            if kind_l != "svr" and f not in kw:
                defaults[f"learner.{kind_l}.{f}"] = getattr(cfg, f)
        for f in ("C", "epsilon", "gamma"):
            if kind_l == "svr" and f not in kw:
                defaults[f"learner.{kind_l}.{f}"] = getattr(cfg, f)
        learners[kind_l] = cfg
    tv = TVarOptions()
    tv_kw = {k: values[("tvar", k)] for k in _SCHEMA["tvar"] if ("tvar", k) in values}
    tvar = replace(tv, **tv_kw)
    window = {k: values[("window", k)] for k in _SCHEMA["window"] if ("window", k) in values}
    if calendar is None:
        calendar = default_calendar()
        defaults["regimes"] = "built-in approximate calendar"
    symbols = _split_list(values[("data", "symbols")]) if ("data", "symbols") in values else None
    out = Path(values[("run", "out")])
    if not out.is_absolute():
        out = base_dir / out
    return RunConfig(
        seed=values[("run", "seed")], out=out, threads=values[("run", "threads")],
        data_path=path, data_kind=kind, symbols=symbols, window=window, models=models,
        p=p, p_max=values[("models", "p_max")], q=q, learners=learners, trials=trials,
        tvar=tvar, calendar=calendar, defaults_filled=defaults, source=source,
        digest=hashlib.sha256(text.encode("utf-8")).hexdigest())


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, path.parent, path)
