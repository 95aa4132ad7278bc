"""Synthetic data-generating processes used as verification oracles.

Every generator discards ``BURN_IN`` leading observations and is a pure
function of its parameters and seed.  Student-t innovations are drawn
through the Gaussian scale mixture ``tau ~ Gamma(nu/2, rate=nu/2)``,
``eps | tau ~ N(0, Sigma / tau)``.  numpy's ``standard_gamma`` uses the
Marsaglia-Tsang squeeze method for shape >= 1, which always applies here
because ``nu > 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .rng import generator
from .timeseries import ReturnPanel

BURN_IN = 500


class DgpError(ValueError):
    pass


def companion(A: Sequence[np.ndarray]) -> np.ndarray:
    A = [np.atleast_2d(np.asarray(a, dtype=float)) for a in A]
    K, p = A[0].shape[0], len(A)
    C = np.zeros((K * p, K * p))
    C[:K, :] = np.hstack(A)
    if p > 1:
        C[K:, :-K] = np.eye(K * (p - 1))
    return C


def spectral_radius(A: Sequence[np.ndarray]) -> float:
    if len(A) == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(companion(A)))))


@dataclass
class DgpSpec:
    """Parameters of one synthetic process.

    ``kind`` is one of ``var_t``, ``var_gaussian``, ``garch11``,
    ``logistic_map`` or ``nonlinear_residual``.  Only the fields relevant to
    the kind are read.
    """

    kind: str
    T: int
    seed: int = 0
    c: np.ndarray | None = None
    A: list = field(default_factory=list)
    sigma: np.ndarray | None = None
    nu: float = 8.0
    omega: float = 0.05
    alpha: float = 0.10
    beta: float = 0.85
    x0: float = 0.2
    amplitude: float = 0.0
    theta: list = field(default_factory=list)
    kappa: float = 10.0
    theta_lags: tuple = (1, 2)
    burn_in: int = BURN_IN

    def dims(self) -> int:
        if self.sigma is not None:
            return np.atleast_2d(self.sigma).shape[0]
        if self.A:
            return np.atleast_2d(self.A[0]).shape[0]
        if self.c is not None:
            return len(np.atleast_1d(self.c))
        return 1

    def validate(self) -> None:
        if self.T < 1:
            raise DgpError("T must be positive")
        if self.kind in ("var_t", "var_gaussian", "nonlinear_residual"):
            if self.A and spectral_radius(self.A) >= 1:
                raise DgpError("lag matrices are not stable (companion radius >= 1)")
            if self.kind != "var_gaussian" and not self.nu > 2:
                raise DgpError("nu must exceed 2")
        elif self.kind == "garch11":
            if not (self.omega > 0 and self.alpha >= 0 and self.beta >= 0
                    and self.alpha + self.beta < 1):
                raise DgpError("GARCH(1,1) needs omega > 0, alpha, beta >= 0, alpha + beta < 1")
        elif self.kind == "logistic_map":
            _check_logistic_x0(self.x0)
        else:
            raise DgpError(f"unknown DGP kind {self.kind!r}")


def _check_logistic_x0(x0: float) -> None:
    if not 0 < x0 < 1:
        raise DgpError("logistic map seed must lie in (0, 1)")
    if np.isclose(x0, 0.75) or np.isclose(x0, 0.5):
        # 0.75 is the interior fixed point; 0.5 maps to 1 and then to 0.
        raise DgpError(f"x0={x0} lands on a fixed point of x -> 4x(1-x)")


def _var_params(spec: DgpSpec):
    K = spec.dims()
    c = np.zeros(K) if spec.c is None else np.atleast_1d(np.asarray(spec.c, dtype=float))
    A = [np.atleast_2d(np.asarray(a, dtype=float)) for a in spec.A]
    sigma = np.eye(K) if spec.sigma is None else np.atleast_2d(np.asarray(spec.sigma, dtype=float))
    return K, c, A, sigma


def t_innovations(rng: np.random.Generator, n: int, sigma: np.ndarray, nu: float | None) -> np.ndarray:
    """Draw ``n`` multivariate t (or Gaussian when ``nu`` is None) innovations."""
    L = np.linalg.cholesky(np.atleast_2d(sigma))
    z = rng.standard_normal((n, L.shape[0])) @ L.T
    if nu is None:
        return z
    tau = rng.standard_gamma(nu / 2.0, size=n) / (nu / 2.0)
    return z / np.sqrt(tau)[:, None]


def _recurse(c, A, eps):
    p, K = len(A), len(c)
    y = np.zeros((eps.shape[0] + p, K))
    for t in range(eps.shape[0]):
        m = c.copy()
        for i, a in enumerate(A, start=1):
            m += a @ y[p + t - i]
        y[p + t] = m + eps[t]
    return y[p:]


def gen_var(spec: DgpSpec, heavy: bool = True) -> ReturnPanel:
    spec.validate()
    K, c, A, sigma = _var_params(spec)
    rng = generator(spec.seed, "var")
    eps = t_innovations(rng, spec.T + spec.burn_in, sigma, spec.nu if heavy else None)
    y = _recurse(c, A, eps)[spec.burn_in:]
    return ReturnPanel.from_array(y)


def gen_var_t(spec: DgpSpec) -> ReturnPanel:
    return gen_var(spec, heavy=True)


def gen_var_gaussian(spec: DgpSpec) -> ReturnPanel:
    return gen_var(spec, heavy=False)


def gen_garch11(spec: DgpSpec) -> np.ndarray:
    spec.validate()
    rng = generator(spec.seed, "garch11")
    n = spec.T + spec.burn_in
    z = rng.standard_normal(n)
    r = np.empty(n)
    s2 = spec.omega / (1.0 - spec.alpha - spec.beta)
    prev = 0.0
    for t in range(n):
        s2 = spec.omega + spec.alpha * prev * prev + spec.beta * s2
        prev = np.sqrt(s2) * z[t]
        r[t] = prev
    return r[spec.burn_in:]


def gen_logistic_map(T: int, x0: float = 0.2, demean: bool = True) -> np.ndarray:
    _check_logistic_x0(x0)
    x = np.empty(T)
    v = x0
    for t in range(T):
        v = 4.0 * v * (1.0 - v)
        x[t] = v
    return x - x.mean() if demean else x


@dataclass(frozen=True)
class NonlinearSample:
    panel: ReturnPanel
    mu: np.ndarray
    g: np.ndarray
    u: np.ndarray


def _nonlinear_component(spec: DgpSpec, e_a: np.ndarray, e_b: np.ndarray,
                         scale: np.ndarray) -> np.ndarray:
    th1, th2 = (np.atleast_2d(np.asarray(t, dtype=float)) for t in spec.theta)
    a = np.tanh(spec.kappa * (e_a / scale) @ th1.T)
    b = np.tanh(spec.kappa * (e_b / scale) @ th2.T)
    return spec.amplitude * scale * a * b


def gen_nonlinear_residual(spec: DgpSpec) -> NonlinearSample:
    """Linear VAR-t mean plus a bounded nonlinear residual term.

    ``y_t = mu_t + g_t + u_t`` with ``mu_t = c + sum_i A_i y_{t-i}``,
    ``u_t`` multivariate t, and with ``e_t = y_t - mu_t`` the linear-filter
    residual::

        g_t = amplitude * sd(u) * tanh(kappa * theta1' e_{t-1} / sd(u))
                                * tanh(kappa * theta2' e_{t-2} / sd(u))

    (elementwise per asset, ``theta1``/``theta2`` are K x K).  The product of
    two odd squashed forms is uncorrelated with each lag on its own, so a
    linear predictor cannot recover it while every shipped learner can.
    ``theta`` defaults to the identity for both lags.
    """
    spec.validate()
    K, c, A, sigma = _var_params(spec)
    if not spec.theta:
        spec.theta = [np.eye(K), np.eye(K)]
    rng = generator(spec.seed, "nonlinear_residual")
    n = spec.T + spec.burn_in
    u = t_innovations(rng, n, sigma, spec.nu)
    sd_u = np.sqrt(np.diag(sigma) * spec.nu / (spec.nu - 2.0))
    p = len(A)
    y = np.zeros((n + p, K))
    e = np.zeros((n + 2, K))
    mu = np.zeros((n, K))
    g = np.zeros((n, K))
    for t in range(n):
        m = c.copy()
        for i, a in enumerate(A, start=1):
            m += a @ y[p + t - i]
        mu[t] = m
        if spec.amplitude != 0.0:
            la, lb = spec.theta_lags
            g[t] = _nonlinear_component(spec, e[t + 2 - la], e[t + 2 - lb], sd_u)
        e[t + 2] = g[t] + u[t]
        y[p + t] = m + e[t + 2]
    y, mu, g, u = y[p + spec.burn_in:], mu[spec.burn_in:], g[spec.burn_in:], u[spec.burn_in:]
    return NonlinearSample(ReturnPanel.from_array(y), mu, g, u)


def simulate(spec: DgpSpec):
    """Dispatch on ``spec.kind``."""
    if spec.kind == "var_t":
        return gen_var_t(spec)
    if spec.kind == "var_gaussian":
        return gen_var_gaussian(spec)
    if spec.kind == "garch11":
        return gen_garch11(spec)
    if spec.kind == "logistic_map":
        return gen_logistic_map(spec.T, spec.x0)
    if spec.kind == "nonlinear_residual":
        return gen_nonlinear_residual(spec)
    raise DgpError(f"unknown DGP kind {spec.kind!r}")
