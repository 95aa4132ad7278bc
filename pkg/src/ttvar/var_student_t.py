"""Student-t VAR estimated by ECM on the Gaussian scale-mixture representation.

Iteration, starting from the Gaussian OLS fit and ``nu = 8``:

* E-step: ``tau_t = (nu + K) / (nu + d_t)``, ``d_t = e_t' Sigma^{-1} e_t``,
  the conditional mean of the mixing precision.
* CM-step 1: weighted least squares for ``(c, A)`` with weights ``tau_t``.
  Every equation shares regressors and weights, so this is the exact
  conditional maximiser for any ``Sigma``.
* CM-step 2: ``Sigma = sum_t tau_t e_t e_t' / T_eff``, then eigenvalue
  regularisation.
* CM-step 3: ``nu`` maximises the observed log-likelihood with the other
  parameters held fixed (golden-section search on ``log nu``).  The new
  value is only accepted when it does not lower the likelihood.

``sigma`` on a :class:`TVarModel` is the scale matrix; the innovation
covariance is ``nu / (nu - 2) * sigma``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from .timeseries import DataError, ReturnPanel
from .var_gaussian import VarModel, fit_var, lag_design, ols, _unstack

logger = logging.getLogger(__name__)

NU_BOUNDS = (2.01, 200.0)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class CovarianceError(ValueError):
    pass


def regularize_covariance(sigma: np.ndarray, floor_ratio: float = 1e-8) -> np.ndarray:
    """Symmetrise and clamp eigenvalues below ``floor_ratio * trace / K``."""
    S = np.atleast_2d(np.asarray(sigma, dtype=float))
    if not np.all(np.isfinite(S)):
        raise CovarianceError("non-finite covariance entries")
    S = (S + S.T) / 2.0
    K = S.shape[0]
    floor = floor_ratio * np.trace(S) / K
    if floor <= 0:
        floor = floor_ratio
    w, V = np.linalg.eigh(S)
    if w.min() >= floor:
        return S
    w = np.maximum(w, floor)
    out = (V * w) @ V.T
    return (out + out.T) / 2.0


def _cholesky(sigma: np.ndarray) -> np.ndarray:
    """Cholesky factor; near-singular matrices are floored, indefinite ones rejected."""
    if not np.all(np.isfinite(sigma)):
        raise CovarianceError("non-finite scale matrix")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    w = np.linalg.eigvalsh((sigma + sigma.T) / 2.0)
    if w.min() < -1e-8 * max(abs(w.max()), 1e-300):
        raise CovarianceError("scale matrix is not positive definite")
    try:
        return np.linalg.cholesky(regularize_covariance(sigma))
    except np.linalg.LinAlgError:
        raise CovarianceError("scale matrix is not positive definite") from None


def mahalanobis_sq(E: np.ndarray, sigma: np.ndarray) -> tuple[np.ndarray, float]:
    """Squared Mahalanobis distances of the rows of ``E`` and ``log det sigma``."""
    L = _cholesky(np.atleast_2d(sigma))
    Z = np.linalg.solve(L, np.atleast_2d(E).T)
    return (Z * Z).sum(axis=0), 2.0 * float(np.log(np.diag(L)).sum())


def _t_logpdf_from_d(d: np.ndarray, logdet: float, K: int, nu: float) -> np.ndarray:
    return (gammaln((nu + K) / 2.0) - gammaln(nu / 2.0) - 0.5 * K * math.log(nu * math.pi)
            - 0.5 * logdet - 0.5 * (nu + K) * np.log1p(d / nu))


def t_log_density(eps, sigma, nu: float) -> float:
    """Log density of a centred multivariate t with scale ``sigma``.

    Uses a Cholesky solve rather than an explicit inverse.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if not np.all(np.isfinite(eps)) or not math.isfinite(nu) or nu <= 0:
        raise DataError("t_log_density needs finite eps and nu > 0")
    d, logdet = mahalanobis_sq(eps[None, :], sigma)
    return float(_t_logpdf_from_d(d, logdet, eps.size, nu)[0])


def gaussian_log_density(eps, sigma) -> float:
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    d, logdet = mahalanobis_sq(eps[None, :], sigma)
    return float(-0.5 * (eps.size * math.log(2 * math.pi) + logdet + d[0]))


def e_step_weights(eps, sigma, nu: float) -> np.ndarray:
    """Posterior mean of the mixing precision, ``(nu + K) / (nu + d)``.

    ``eps`` may be a single K-vector or an ``n x K`` matrix.
    """
    E = np.atleast_2d(np.asarray(eps, dtype=float))
    K = np.atleast_2d(sigma).shape[0]
    if E.shape[1] != K:
        E = E.reshape(-1, K)
    d, _ = mahalanobis_sq(E, sigma)
    return (nu + K) / (nu + d)


@dataclass(frozen=True)
class TVarModel(VarModel):
    nu: float = 8.0
    log_likelihood: float = float("nan")
    iterations: int = 0
    converged: bool = False
    loglik_path: tuple = ()
    detail: dict = field(default_factory=dict)

    @property
    def covariance(self) -> np.ndarray:
        return self.nu / (self.nu - 2.0) * self.sigma


def t_var_log_likelihood(model: VarModel, y, nu: float | None = None) -> float:
    """Sum of t log densities of the residuals ``t = p..T-1``."""
    if isinstance(y, ReturnPanel):
        y = y.returns
    y = np.asarray(y, dtype=float)
    if y.shape[0] < model.p + 1:
        raise DataError(f"need at least {model.p + 1} rows")
    X, Y = lag_design(y, model.p)
    E = Y - X @ model.coef
    nu = getattr(model, "nu", None) if nu is None else nu
    d, logdet = mahalanobis_sq(E, model.sigma)
    return float(_t_logpdf_from_d(d, logdet, E.shape[1], nu).sum())


def _golden_max(f, lo: float, hi: float, tol: float = 1e-6, max_iter: int = 200):
    """Golden-section maximisation of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
    cands = [(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)]
    fbest, xbest = max(cands)
    return xbest, fbest


@dataclass
class TVarOptions:
    max_iter: int = 500
    tol: float = 1e-6
    nu_bounds: tuple = NU_BOUNDS
    nu_init: float = 8.0
    floor_ratio: float = 1e-8
    fixed_nu: float | None = None


def _nu_profile(d: np.ndarray, logdet: float, K: int):
    def f(log_nu: float) -> float:
        return float(_t_logpdf_from_d(d, logdet, K, math.exp(log_nu)).sum())
    return f


def fit_t_var(panel: ReturnPanel, p: int, opts: TVarOptions | None = None,
              init: VarModel | None = None) -> TVarModel:
    """Maximum-likelihood Student-t VAR(p) by ECM.

    Parameters
    ----------
    panel : ReturnPanel
    p : int
        Lag order (0 gives an intercept-only location/scale fit).
    opts : TVarOptions, optional
        ``fixed_nu`` freezes the degrees of freedom (no CM-step 3).
    init : VarModel, optional
        Warm start.  Defaults to the Gaussian OLS fit with ``nu = opts.nu_init``.

    Returns
    -------
    TVarModel
        ``loglik_path`` holds the log-likelihood after every iteration,
        starting with the initial value.  ``converged`` is False when
        ``max_iter`` was exhausted; the partial estimate is still returned.
    """
    opts = opts or TVarOptions()
    lo, hi = opts.nu_bounds
    if not (2.0 < lo < hi <= 1e7):
        raise ValueError(f"invalid nu bounds {opts.nu_bounds}")
    y = panel.returns
    T, K = y.shape
    if init is None:
        init = fit_var(panel, p)
        nu = opts.nu_init if opts.fixed_nu is None else opts.fixed_nu
    else:
        if init.p != p or init.K != K:
            raise ValueError("warm start does not match (p, K)")
        nu = getattr(init, "nu", opts.nu_init) if opts.fixed_nu is None else opts.fixed_nu
    nu = min(max(nu, lo), hi) if opts.fixed_nu is None else nu
    X, Y = lag_design(y, p)
    n = X.shape[0]
    B = init.coef.copy()
    sigma = regularize_covariance(init.sigma, opts.floor_ratio)

    E = Y - X @ B
    d, logdet = mahalanobis_sq(E, sigma)
    ll = float(_t_logpdf_from_d(d, logdet, K, nu).sum())
    path = [ll]
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        tau = (nu + K) / (nu + d)
        B = ols(X, Y, weights=tau)
        E = Y - X @ B
        sigma = regularize_covariance((E * tau[:, None]).T @ E / n, opts.floor_ratio)
        d, logdet = mahalanobis_sq(E, sigma)
        if opts.fixed_nu is None:
            prof = _nu_profile(d, logdet, K)
            lnu, lbest = _golden_max(prof, math.log(lo), math.log(hi))
            if lbest >= prof(math.log(nu)):
                nu = math.exp(lnu)
        new_ll = float(_t_logpdf_from_d(d, logdet, K, nu).sum())
        if new_ll < ll - 1e-9 * max(1.0, abs(ll)):
            logger.warning("ECM log-likelihood decreased: %.12g -> %.12g", ll, new_ll)
        path.append(new_ll)
        improvement = new_ll - ll
        ll = new_ll
        if abs(improvement) < opts.tol:
            converged = True
            break

    detail = {}
    if opts.fixed_nu is None:
        if nu <= lo * (1 + 1e-4):
            detail["nu_at_bound"] = "lower"
        elif nu >= hi * (1 - 1e-4):
            detail["nu_at_bound"] = "upper"
    c, A = _unstack(B, p, K)
    return TVarModel(p, c, A, sigma, tuple(panel.symbols),
                     (panel.dates[0], panel.dates[-1]) if panel.dates else (None, None),
                     n_obs=n, nu=float(nu), log_likelihood=ll, iterations=it,
                     converged=converged, loglik_path=tuple(path), detail=detail)


def with_params(model: TVarModel, **kw) -> TVarModel:
    return replace(model, **kw)
