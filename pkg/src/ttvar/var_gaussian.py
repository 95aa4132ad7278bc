"""Gaussian VAR(p): least-squares fit, lag selection, stability and residuals."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .simulation import companion
from .timeseries import DataError, ReturnPanel


class EstimationError(ValueError):
    """Raised when a model cannot be estimated from the supplied sample."""


def lag_design(y: np.ndarray, p: int, start: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Regressors ``[1, y_{t-1}, ..., y_{t-p}]`` and targets ``y_t`` for rows ``start..T-1``.

    ``start`` defaults to ``p``; a larger ``start`` fixes a common effective
    sample across several lag orders.
    """
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    start = p if start is None else start
    if start < p:
        raise ValueError("start must be >= p")
    n = T - start
    cols = [np.ones((n, 1))]
    for i in range(1, p + 1):
        cols.append(y[start - i:T - i])
    return np.hstack(cols), y[start:]


@dataclass(frozen=True)
class VarModel:
    p: int
    intercept: np.ndarray
    lag_matrices: tuple
    sigma: np.ndarray
    symbols: tuple = ()
    train_range: tuple[date | None, date | None] = (None, None)
    n_obs: int = 0

    @property
    def K(self) -> int:
        return len(self.intercept)

    @property
    def coef(self) -> np.ndarray:
        """Stacked ``(1 + K p) x K`` coefficient matrix matching :func:`lag_design`."""
        return np.vstack([self.intercept[None, :]] + [a.T for a in self.lag_matrices])


def _unstack(B: np.ndarray, p: int, K: int):
    c = B[0].copy()
    A = tuple(B[1 + i * K:1 + (i + 1) * K].T.copy() for i in range(p))
    return c, A


def ols(X: np.ndarray, Y: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """(Weighted) least squares via QR; raises on rank deficiency."""
    if weights is not None:
        w = np.sqrt(weights)[:, None]
        X, Y = X * w, Y * w
    Q, R = np.linalg.qr(X)
    d = np.abs(np.diag(R))
    if d.size and d.min() <= 1e-10 * max(d.max(), 1e-300):
        raise EstimationError("design matrix is rank deficient")
    return np.linalg.solve(R, Q.T @ Y)


def fit_var(panel: ReturnPanel, p: int) -> VarModel:
    """Equation-by-equation OLS with a degrees-of-freedom corrected covariance."""
    y = panel.returns
    T, K = y.shape
    if p < 0:
        raise ValueError("lag order must be non-negative")
    if T - p < K * p + K + 5:
        raise EstimationError(f"T={T} too short for a VAR({p}) in {K} variables")
    X, Y = lag_design(y, p)
    B = ols(X, Y)
    E = Y - X @ B
    dof = T - p - K * p - 1
    sigma = E.T @ E / dof
    c, A = _unstack(B, p, K)
    return VarModel(p, c, A, (sigma + sigma.T) / 2, tuple(panel.symbols),
                    (panel.dates[0], panel.dates[-1]) if panel.dates else (None, None),
                    n_obs=T - p)


@dataclass(frozen=True)
class LagSelection:
    rows: list = field(default_factory=list)   # (lag, aic, bic, fpe, hqic)
    chosen: dict = field(default_factory=dict)

    def criterion(self, name: str) -> np.ndarray:
        col = {"aic": 1, "bic": 2, "fpe": 3, "hqic": 4}[name]
        return np.array([r[col] for r in self.rows])


def information_criteria(logdet: float, det: float, p: int, K: int, n: int) -> tuple[float, float, float, float]:
    """AIC, BIC, FPE, HQIC with slope-only parameter count ``p K^2``."""
    k = p * K * K
    m = K * p + 1
    aic = logdet + 2.0 * k / n
    bic = logdet + np.log(n) * k / n
    hqic = logdet + 2.0 * np.log(np.log(n)) * k / n
    fpe = ((n + m) / (n - m)) ** K * det
    return aic, bic, fpe, hqic


def select_lag(panel: ReturnPanel, p_max: int) -> LagSelection:
    """Score lags ``0..p_max`` on the common sample ``t = p_max..T-1``."""
    y = panel.returns
    T, K = y.shape
    n = T - p_max
    if n - (K * p_max + 1) < K + 5:
        raise EstimationError(f"p_max={p_max} too large for T={T}, K={K}")
    rows = []
    for p in range(p_max + 1):
        X, Y = lag_design(y, p, start=p_max)
        E = Y - X @ ols(X, Y)
        S = E.T @ E / n
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            raise EstimationError("singular residual covariance in lag selection")
        rows.append((p, *information_criteria(logdet, np.exp(logdet), p, K, n)))
    names = ["aic", "bic", "fpe", "hqic"]
    chosen = {nm: int(rows[int(np.argmin([r[j + 1] for r in rows]))][0]) for j, nm in enumerate(names)}
    return LagSelection(rows, chosen)


def companion_spectral_radius(model: VarModel) -> float:
    if model.p == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(companion(model.lag_matrices)))))


def is_stable(model: VarModel) -> bool:
    return companion_spectral_radius(model) < 1.0


@dataclass(frozen=True)
class ResidualPanel:
    dates: tuple
    symbols: tuple
    residuals: np.ndarray

    @property
    def T(self) -> int:
        return self.residuals.shape[0]


def residual_matrix(model, y: np.ndarray) -> np.ndarray:
    """``y_t - c - sum A_i y_{t-i}`` for every row with a full lag history."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < model.p + 1:
        raise DataError(f"need at least {model.p + 1} rows")
    X, Y = lag_design(y, model.p)
    return Y - X @ model.coef


def residuals(model, panel: ReturnPanel) -> ResidualPanel:
    if model.symbols and tuple(panel.symbols) != tuple(model.symbols):
        raise DataError(f"panel symbols {panel.symbols} do not match model {model.symbols}")
    E = residual_matrix(model, panel.returns)
    return ResidualPanel(tuple(panel.dates[model.p:]), tuple(panel.symbols), E)


def residual_correlation(res: ResidualPanel | np.ndarray) -> np.ndarray:
    E = res.residuals if isinstance(res, ResidualPanel) else np.asarray(res, dtype=float)
    if E.shape[0] < 3:
        raise DataError("need at least 3 residual rows")
    sd = E.std(axis=0)
    if np.any(sd == 0):
        raise DataError("zero-variance residual column")
    Z = (E - E.mean(axis=0)) / sd
    R = Z.T @ Z / E.shape[0]
    R = (R + R.T) / 2
    np.fill_diagonal(R, 1.0)
    return R


def forecast_one_step(model, recent: np.ndarray) -> np.ndarray:
    """``c + sum_i A_i recent[-i]``; ``recent`` holds exactly p rows, newest last."""
    recent = np.asarray(recent, dtype=float).reshape(-1, model.K) if model.p else np.empty((0, model.K))
    if recent.shape[0] != model.p:
        raise DataError(f"expected {model.p} recent rows, got {recent.shape[0]}")
    out = np.array(model.intercept, dtype=float)
    for i, a in enumerate(model.lag_matrices, start=1):
        out = out + a @ recent[-i]
    return out


def gaussian_loglik(model, y: np.ndarray, sigma: np.ndarray | None = None) -> float:
    """Exact Gaussian log-likelihood of the residuals under ``sigma``."""
    E = residual_matrix(model, y)
    S = model.sigma if sigma is None else sigma
    L = np.linalg.cholesky(S)
    Z = np.linalg.solve(L, E.T)
    K = E.shape[1]
    n = E.shape[0]
    return float(-0.5 * n * K * np.log(2 * np.pi) - n * np.log(np.diag(L)).sum() - 0.5 * (Z * Z).sum())
