"""Lag embedding and standardisation of residual streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..timeseries import DataError


@dataclass(frozen=True)
class SupervisedSet:
    """``inputs[n] = (e_{t-1}, ..., e_{t-q})`` flattened newest first; ``targets[n] = e_t``."""

    inputs: np.ndarray
    targets: np.ndarray
    q: int
    dates: tuple = ()

    @property
    def N(self) -> int:
        return self.targets.shape[0]

    @property
    def K(self) -> int:
        return self.targets.shape[1]

    def head(self, n: int) -> "SupervisedSet":
        return SupervisedSet(self.inputs[:n], self.targets[:n], self.q, self.dates[:n])

    def tail(self, n: int) -> "SupervisedSet":
        start = self.N - n
        return SupervisedSet(self.inputs[start:], self.targets[start:], self.q, self.dates[start:])


def lag_matrix(series: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    E = np.asarray(series, dtype=float)
    if E.ndim == 1:
        E = E[:, None]
    T = E.shape[0]
    if q < 1:
        raise ValueError("q must be >= 1")
    if T <= q:
        raise DataError(f"need more than q={q} rows, got {T}")
    X = np.hstack([E[q - j:T - j] for j in range(1, q + 1)])
    return X, E[q:]


def embed_lags(res, q: int) -> SupervisedSet:
    """Build the supervised pairs from a ResidualPanel (or bare matrix)."""
    if hasattr(res, "residuals"):
        E, dates = res.residuals, tuple(res.dates)
    elif hasattr(res, "returns"):
        E, dates = res.returns, tuple(res.dates)
    else:
        E, dates = np.asarray(res, dtype=float), ()
    X, Y = lag_matrix(E, q)
    return SupervisedSet(X, Y, q, dates[q:] if dates else ())


def window_to_input(recent: np.ndarray, q: int, K: int) -> np.ndarray:
    """``q x K`` recent rows (newest last) to the newest-first flattened input row."""
    recent = np.asarray(recent, dtype=float).reshape(-1, K)
    if recent.shape[0] != q:
        raise DataError(f"expected {q} recent rows, got {recent.shape[0]}")
    return recent[::-1].reshape(1, q * K)


def to_sequences(X: np.ndarray, q: int) -> np.ndarray:
    """Flattened newest-first rows to ``(N, q, K)`` sequences ordered oldest first."""
    N = X.shape[0]
    return X.reshape(N, q, -1)[:, ::-1, :]


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def invert(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.std + self.mean

    @classmethod
    def identity(cls, d: int) -> "Scaler":
        return cls(np.zeros(d), np.ones(d))


def fit_scaler(values: np.ndarray) -> Scaler:
    """Column mean and sample (ddof=1) standard deviation."""
    V = np.asarray(values, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] < 2:
        raise DataError("need at least 2 rows to fit a scaler")
    sd = V.std(axis=0, ddof=1)
    if np.any(~(sd > 0)):
        raise DataError("zero-variance column cannot be standardised")
    return Scaler(V.mean(axis=0), sd)
