"""Stylized-facts battery for return series.

Descriptive moments, Jarque-Bera, augmented Dickey-Fuller, ARCH-LM, BDS,
sample autocorrelations and QQ plot data.  Every function is a pure
function of its input vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .timeseries import ReturnPanel


class DiagnosticError(ValueError):
    pass


@dataclass(frozen=True)
class StatsRow:
    mean: float
    std_dev: float
    skewness: float
    excess_kurtosis: float
    min: float
    max: float
    convention: str = "excess"

    @property
    def kurtosis(self) -> float:
        """Kurtosis in the configured convention (``excess`` or ``raw``)."""
        return self.excess_kurtosis + (3.0 if self.convention == "raw" else 0.0)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float | None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ArchLmResult:
    lm_statistic: float
    lm_p_value: float
    f_statistic: float
    f_p_value: float
    lags: int


@dataclass(frozen=True)
class BdsResult:
    embedding_dims: list
    statistics: np.ndarray
    epsilon: float             # radius in units of the series standard deviation
    p_values: np.ndarray | None = None
    correlation_integrals: dict = field(default_factory=dict)


def _vector(x, min_len: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size < min_len:
        raise DiagnosticError(f"{name} needs at least {min_len} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DiagnosticError(f"{name}: series contains non-finite values")
    return x


def _central_moments(x: np.ndarray):
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 <= 0.0 or not np.isfinite(m2):
        raise DiagnosticError("zero variance: skewness and kurtosis are undefined")
    m3 = float(np.mean(d ** 3))
    m4 = float(np.mean(d ** 4))
    return m2, m3 / m2 ** 1.5, m4 / m2 ** 2 - 3.0


def descriptive_stats(series, convention: str = "excess") -> StatsRow:
    """Mean, population standard deviation and moment-ratio shape statistics.

    Parameters
    ----------
    series : array_like
        At least four observations.
    convention : {"excess", "raw"}
        How :attr:`StatsRow.kurtosis` is reported; ``excess_kurtosis`` is
        always ``m4 / m2**2 - 3``.
    """
    if convention not in ("excess", "raw"):
        raise ValueError("convention must be 'excess' or 'raw'")
    x = _vector(series, 4, "descriptive_stats")
    m2, skew, exk = _central_moments(x)
    return StatsRow(float(x.mean()), math.sqrt(m2), skew, exk,
                    float(x.min()), float(x.max()), convention)


def jarque_bera_from_moments(n: int, skew: float, excess_kurtosis: float) -> TestResult:
    jb = n / 6.0 * (skew ** 2 + excess_kurtosis ** 2 / 4.0)
    return TestResult(jb, float(stats.chi2.sf(jb, 2)),
                      {"skewness": skew, "excess_kurtosis": excess_kurtosis, "n": n})


def jarque_bera(series) -> TestResult:
    x = _vector(series, 8, "jarque_bera")
    _, skew, exk = _central_moments(x)
    return jarque_bera_from_moments(x.size, skew, exk)


# MacKinnon (1994) response-surface coefficients for a single I(1) series.
# Polynomial coefficients are in increasing powers of the statistic.
_MACKINNON = {
    "n": {"star": -1.04, "min": -19.04, "max": math.inf,
          "small": (0.6344, 1.2378, 3.2496e-2),
          "large": (0.4797, 0.93557, -0.06999, 0.033066)},
    "c": {"star": -1.61, "min": -18.83, "max": 2.74,
          "small": (2.1659, 1.4412, 3.8269e-2),
          "large": (1.7339, 0.93202, -0.12745, -0.010368)},
    "ct": {"star": -2.89, "min": -16.18, "max": 0.7,
           "small": (3.2512, 1.6047, 4.9588e-2),
           "large": (2.5261, 0.61654, -0.37956, -0.060285)},
}

_REGRESSION_ALIASES = {"none": "n", "n": "n", "nc": "n",
                       "constant": "c", "c": "c",
                       "constant+trend": "ct", "ct": "ct"}


def mackinnon_p(stat: float, regression: str = "c") -> float:
    """Approximate asymptotic p-value of a Dickey-Fuller t statistic."""
    t = _MACKINNON[_REGRESSION_ALIASES[regression]]
    if stat > t["max"]:
        return 1.0
    if stat < t["min"]:
        return 0.0
    coef = t["small"] if stat <= t["star"] else t["large"]
    z = sum(c * stat ** i for i, c in enumerate(coef))
    return float(stats.norm.cdf(z))


def default_adf_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _ols_fit(y: np.ndarray, X: np.ndarray):
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DiagnosticError("singular regressor matrix")
    r = y - X @ beta
    return beta, r


def _adf_design(x: np.ndarray, lag: int, nobs: int, reg: str):
    """Regressors on the last ``nobs`` differences: level, lagged differences, trend terms."""
    dx = np.diff(x)
    y = dx[-nobs:]
    n_dx = dx.size
    cols = [x[-nobs - 1:-1]]
    for j in range(1, lag + 1):
        cols.append(dx[n_dx - nobs - j:n_dx - j])
    if reg in ("c", "ct"):
        cols.append(np.ones(nobs))
    if reg == "ct":
        cols.append(np.arange(1, nobs + 1, dtype=float))
    return y, np.column_stack(cols)


def _aic(resid: np.ndarray, k: int) -> float:
    n = resid.size
    llf = -n / 2.0 * (math.log(2 * math.pi) + math.log(float(resid @ resid) / n) + 1.0)
    return -2.0 * llf + 2.0 * k


def adf_test(series, max_lag: int | None = None, regression: str = "constant",
             autolag: bool = True) -> TestResult:
    """Augmented Dickey-Fuller t test on the lagged level.

    Lags ``0..max_lag`` are scored by AIC on a common sample (the last
    ``T - 1 - max_lag`` differences), the chosen lag is refitted on its own
    full sample, and the statistic is referred to the MacKinnon response
    surface.
    """
    reg = _REGRESSION_ALIASES.get(regression)
    if reg is None:
        raise ValueError(f"unknown regression {regression!r}")
    x = _vector(series, 12, "adf_test")
    T = x.size
    if max_lag is None:
        max_lag = min(default_adf_lag(T), T // 2 - 2)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if T <= max_lag + 10:
        raise DiagnosticError(f"series of length {T} too short for max_lag={max_lag}")
    lag = max_lag
    aics = {}
    if autolag:
        nobs = T - 1 - max_lag
        for j in range(max_lag + 1):
            y, X = _adf_design(x, j, nobs, reg)
            _, r = _ols_fit(y, X)
            aics[j] = _aic(r, X.shape[1])
        lag = min(aics, key=lambda j: (aics[j], j))
    nobs = T - 1 - lag
    y, X = _adf_design(x, lag, nobs, reg)
    beta, r = _ols_fit(y, X)
    s2 = float(r @ r) / (nobs - X.shape[1])
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(beta[0] / math.sqrt(cov[0, 0]))
    return TestResult(stat, mackinnon_p(stat, reg),
                      {"lag": lag, "nobs": nobs, "regression": reg, "max_lag": max_lag,
                       "aic": aics})


def arch_lm(series, lags: int = 40) -> ArchLmResult:
    """Engle's LM test: regress squared demeaned values on their own lags."""
    if lags < 1:
        raise ValueError("lags must be >= 1")
    x = _vector(series, lags + 11, "arch_lm")
    e2 = (x - x.mean()) ** 2
    if np.ptp(e2) == 0.0:
        raise DiagnosticError("zero variance: degenerate ARCH regression")
    T = e2.size
    n = T - lags
    y = e2[lags:]
    X = np.column_stack([np.ones(n)] + [e2[lags - j:T - j] for j in range(1, lags + 1)])
    _, r = _ols_fit(y, X)
    yc = y - y.mean()
    tss = float(yc @ yc)
    if tss == 0.0:
        raise DiagnosticError("degenerate ARCH regression")
    ssr = float(r @ r)
    r2 = 1.0 - ssr / tss
    lm = n * r2
    df2 = n - lags - 1
    f = (r2 / lags) / ((1.0 - r2) / df2) if r2 < 1.0 else math.inf
    return ArchLmResult(lm, float(stats.chi2.sf(lm, lags)), f,
                        float(stats.f.sf(f, lags, df2)), lags)


def distance_indicators(x: np.ndarray, epsilon: float) -> np.ndarray:
    """Boolean matrix ``|x_s - x_t| < epsilon`` (strict)."""
    return np.abs(x[:, None] - x[None, :]) < epsilon


def correlation_integral(x, epsilon: float, m: int = 1, indicators=None) -> float:
    """Fraction of pairs of ``m``-histories within ``epsilon`` in the sup norm.

    Histories are ``(x_t, ..., x_{t+m-1})`` for ``t = 0..T-m``; all
    ``n (n - 1) / 2`` distinct pairs are counted exactly.
    """
    x = np.asarray(x, dtype=float)
    I = distance_indicators(x, epsilon) if indicators is None else indicators
    n = I.shape[0] - m + 1
    if n < 2:
        raise DiagnosticError("too few histories for the embedding dimension")
    J = I[:n, :n].copy()
    for j in range(1, m):
        J &= I[j:j + n, j:j + n]
    pairs = (int(J.sum()) - n) // 2
    return pairs / (n * (n - 1) / 2.0)


def bds_test(series, m_max: int = 6, eps_factor: float = 0.7) -> BdsResult:
    """BDS test of the i.i.d. null for embedding dimensions ``2..m_max``.

    ``W_m = sqrt(n) (C_m - C_1^m) / sigma_m`` with ``n = T - m + 1``;
    ``C_1`` is taken over the last ``n`` points and ``sigma_m`` uses the
    full-sample ``C_1`` and triple-overlap estimate ``k``.  The radius is
    ``eps_factor`` times the sample standard deviation (``ddof=1``).
    """
    x = _vector(series, 200, "bds_test")
    if not 2 <= m_max <= 6:
        raise ValueError("m_max must lie in 2..6")
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DiagnosticError("zero variance")
    eps = eps_factor * sd
    I = distance_indicators(x, eps)
    T = x.size
    c1 = correlation_integral(x, eps, 1, I)
    if c1 == 0.0:
        raise DiagnosticError("epsilon too small: C_1 = 0")
    deg = I.sum(1).astype(float) - 1.0
    k = float(np.sum(deg * (deg - 1.0))) / (T * (T - 1.0) * (T - 2.0))
    dims = list(range(2, m_max + 1))
    out, pv, cints = [], [], {1: c1}
    for m in dims:
        cm = correlation_integral(x, eps, m, I)
        cints[m] = cm
        c1_tail = correlation_integral(x[m - 1:], eps, 1, I[m - 1:, m - 1:])
        tmp = sum(k ** (m - j) * c1 ** (2 * j) for j in range(1, m))
        var = 4.0 * (k ** m + 2.0 * tmp + (m - 1) ** 2 * c1 ** (2 * m)
                     - m * m * k * c1 ** (2 * m - 2))
        if not var > 0:
            raise DiagnosticError("non-positive BDS variance")
        w = math.sqrt(T - m + 1) * (cm - c1_tail ** m) / math.sqrt(var)
        out.append(w)
        pv.append(2.0 * stats.norm.sf(abs(w)))
    return BdsResult(dims, np.array(out), eps_factor, np.array(pv), cints)


def acf(series, max_lag: int, squared: bool = False):
    """Sample autocorrelations at lags ``1..max_lag`` and the ``1.96/sqrt(T)`` band.

    Returns
    -------
    rho : ndarray
    band : float
    """
    x = _vector(series, max_lag + 2, "acf")
    if squared:
        x = x * x
    d = x - x.mean()
    den = float(d @ d)
    if den == 0.0:
        raise DiagnosticError("zero variance")
    T = x.size
    rho = np.array([float(d[:T - k] @ d[k:]) / den for k in range(1, max_lag + 1)])
    return rho, 1.96 / math.sqrt(T)


@dataclass(frozen=True)
class QQData:
    theoretical: np.ndarray
    empirical: np.ndarray
    dist: str
    nu: float | None = None


def qq_points(series, dist: str = "gaussian") -> QQData:
    """Quantile pairs at plotting positions ``(i - 0.5) / T`` of the standardised series.

    For ``student_t`` the reference is a location-scale t whose parameters
    (including ``nu``) are the univariate maximum-likelihood fit.
    """
    x = _vector(series, 20, "qq_points")
    sd = float(np.std(x))
    if sd == 0.0:
        raise DiagnosticError("zero variance")
    z = np.sort((x - x.mean()) / sd)
    T = z.size
    pp = (np.arange(1, T + 1) - 0.5) / T
    if dist == "gaussian":
        return QQData(stats.norm.ppf(pp), z, dist)
    if dist != "student_t":
        raise ValueError("dist must be 'gaussian' or 'student_t'")
    from .var_student_t import fit_t_var
    fit = fit_t_var(ReturnPanel.from_array(((x - x.mean()) / sd)[:, None]), 0)
    if not fit.converged or not np.isfinite(fit.nu):
        raise DiagnosticError("maximum-likelihood fit of nu failed")
    loc = float(fit.intercept[0])
    scale = math.sqrt(float(fit.sigma[0, 0]))
    return QQData(loc + scale * stats.t.ppf(pp, fit.nu), z, dist, float(fit.nu))


def diagnose_panel(panel: ReturnPanel, adf_lag: int | None = None, arch_lags: int = 40,
                   bds_m: int = 6, eps_factor: float = 0.7, convention: str = "excess") -> dict:
    """Per-asset battery: ``{symbol: {"stats", "adf", "jb", "arch", "bds"}}``."""
    out = {}
    for k, sym in enumerate(panel.symbols):
        x = panel.returns[:, k]
        out[sym] = {
            "stats": descriptive_stats(x, convention),
            "adf": adf_test(x, adf_lag),
            "jb": jarque_bera(x),
            "arch": arch_lm(x, arch_lags),
            "bds": bds_test(x, bds_m, eps_factor) if x.size >= 200 else None,
        }
    return out
