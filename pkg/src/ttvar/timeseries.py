"""Price ingestion, log returns and the windowing vocabulary.

Panels are small immutable containers around a date index, a symbol list
and a float matrix.  Everything downstream consumes :class:`ReturnPanel`.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class DataError(ValueError):
    """Raised for malformed or insufficient input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PricePanel:
    dates: tuple[date, ...]
    symbols: tuple[str, ...]
    prices: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "prices", _frozen(self.prices))
        T, K = self.prices.shape if self.prices.ndim == 2 else (0, 0)
        if self.prices.ndim != 2 or T != len(self.dates) or K != len(self.symbols):
            raise DataError("price matrix shape does not match dates/symbols")
        if K < 1 or T < 2:
            raise DataError(f"need at least 2 rows and 1 symbol, got T={T}, K={K}")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0):
            raise DataError("prices must be finite and positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.prices.shape

    def select(self, symbols: Sequence[str]) -> "PricePanel":
        idx = [_symbol_index(self.symbols, s) for s in symbols]
        return PricePanel(self.dates, tuple(symbols), self.prices[:, idx])


@dataclass(frozen=True)
class ReturnPanel:
    dates: tuple[date, ...]
    symbols: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        r = _frozen(self.returns)
        object.__setattr__(self, "returns", r)
        if r.ndim != 2 or r.shape != (len(self.dates), len(self.symbols)):
            raise DataError("return matrix shape does not match dates/symbols")
        if not np.all(np.isfinite(r)):
            raise DataError("returns must be finite")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")

    @property
    def T(self) -> int:
        return self.returns.shape[0]

    @property
    def K(self) -> int:
        return self.returns.shape[1]

    def slice(self, start: int, stop: int) -> "ReturnPanel":
        return ReturnPanel(self.dates[start:stop], self.symbols, self.returns[start:stop])

    def select(self, symbols: Sequence[str]) -> "ReturnPanel":
        idx = [_symbol_index(self.symbols, s) for s in symbols]
        return ReturnPanel(self.dates, tuple(symbols), self.returns[:, idx])

    @classmethod
    def from_array(cls, returns, symbols: Sequence[str] | None = None,
                   start: date = date(2000, 1, 3)) -> "ReturnPanel":
        """Wrap a bare matrix with a synthetic business-day index."""
        returns = np.asarray(returns, dtype=float)
        if returns.ndim == 1:
            returns = returns[:, None]
        if symbols is None:
            symbols = [f"Y{k + 1}" for k in range(returns.shape[1])]
        return cls(business_days(start, returns.shape[0]), tuple(symbols), returns)


@dataclass(frozen=True)
class WindowPlan:
    """Walk-forward geometry: initial estimation length, test steps and refit strides."""

    train_len: int
    test_len: int
    refit_stride_var: int = 1
    refit_stride_learner: int = 20
    expanding: bool = True

    def validate(self, p_max: int, K: int) -> None:
        if self.train_len < (p_max + 1) * K + 10:
            raise DataError(
                f"train_len={self.train_len} too short for p_max={p_max}, K={K}")
        if self.test_len < 1:
            raise DataError("test_len must be >= 1")
        if self.refit_stride_var < 1 or self.refit_stride_learner < 1:
            raise DataError("refit strides must be >= 1")


def business_days(start: date, n: int) -> tuple[date, ...]:
    out = []
    d = start.toordinal()
    while len(out) < n:
        day = date.fromordinal(d)
        if day.weekday() < 5:
            out.append(day)
        d += 1
    return tuple(out)


def _symbol_index(symbols: Sequence[str], s: str) -> int:
    try:
        return list(symbols).index(s)
    except ValueError:
        raise DataError(f"unknown symbol {s!r}") from None


def _parse_float(cell: str) -> float:
    cell = cell.strip()
    if not cell:
        return math.nan
    try:
        return float(cell)
    except ValueError:
        return math.nan


def _read_wide_csv(path) -> tuple[list[str], list[date], np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise DataError("header must name a date column plus at least one symbol")
        dates, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError:
                raise DataError(f"{path}:{lineno}: not an ISO date: {row[0]!r}") from None
            cells = list(row[1:]) + [""] * (len(header) - len(row))
            dates.append(d)
            rows.append([_parse_float(c) for c in cells[: len(header) - 1]])
    if len(set(dates)) != len(dates):
        raise DataError(f"{path}: duplicate dates")
    values = np.array(rows, dtype=float).reshape(len(rows), len(header) - 1)
    return header[1:], dates, values


def load_price_csv(path, symbols: Sequence[str] | None = None) -> PricePanel:
    """Load a wide ``date,SYM1,...`` price file.

    Rows with any missing or non-positive price among the requested symbols
    are dropped; the drop count is logged and stored on the panel.
    """
    names, dates, values = _read_wide_csv(path)
    if symbols is None:
        symbols = names
    idx = [_symbol_index(names, s) for s in symbols]
    values = values[:, idx]
    order = np.argsort(np.array([d.toordinal() for d in dates]), kind="stable")
    dates = [dates[i] for i in order]
    values = values[order]
    ok = np.all(np.isfinite(values) & (values > 0), axis=1)
    dropped = int((~ok).sum())
    if dropped:
        logger.info("dropped %d incomplete or non-positive rows from %s", dropped, path)
    if ok.sum() < 2:
        raise DataError(f"{path}: fewer than 2 usable rows")
    return PricePanel([d for d, k in zip(dates, ok) if k], tuple(symbols), values[ok],
                      dropped_rows=dropped)


def load_return_csv(path, symbols: Sequence[str] | None = None) -> ReturnPanel:
    """Load a ReturnPanel previously written by :func:`write_return_csv`."""
    names, dates, values = _read_wide_csv(path)
    if symbols is None:
        symbols = names
    idx = [_symbol_index(names, s) for s in symbols]
    values = values[:, idx]
    order = np.argsort(np.array([d.toordinal() for d in dates]), kind="stable")
    values = values[order]
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: missing return cells")
    return ReturnPanel([dates[i] for i in order], tuple(symbols), values)


def to_log_returns(panel: PricePanel) -> ReturnPanel:
    if panel.prices.shape[0] < 2:
        raise DataError("need at least 2 price rows")
    logp = np.log(panel.prices)
    return ReturnPanel(panel.dates[1:], panel.symbols, logp[1:] - logp[:-1])


def align_panels(a: PricePanel, b: PricePanel) -> tuple[PricePanel, PricePanel]:
    common = sorted(set(a.dates) & set(b.dates))
    if not common:
        raise DataError("panels share no dates")
    keep = set(common)

    def restrict(p: PricePanel) -> PricePanel:
        rows = [i for i, d in enumerate(p.dates) if d in keep]
        return PricePanel([p.dates[i] for i in rows], p.symbols, p.prices[rows])

    return restrict(a), restrict(b)


def write_return_csv(panel: ReturnPanel, path) -> None:
    write_wide_csv(path, panel.dates, panel.symbols, panel.returns)


def write_wide_csv(path, dates: Iterable[date], symbols: Sequence[str], values) -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *symbols])
        for d, row in zip(dates, values):
            w.writerow([d.isoformat(), *(repr(float(v)) for v in row)])
