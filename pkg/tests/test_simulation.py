"""Synthetic processes used by the acceptance and property tests."""

import numpy as np
import pytest

from ttvar.simulation import (
    DgpError,
    DgpSpec,
    gen_logistic_map,
    simulate,
    spectral_radius,
)
from ttvar.var_gaussian import fit_var, residual_matrix

A_NL = [np.array([[0.2, 0.05], [0.0, 0.15]])]
S_NL = np.array([[1e-4, 3e-5], [3e-5, 1e-4]])


def _nl(T=6000, seed=1, amplitude=0.5):
    return simulate(DgpSpec(kind="nonlinear_residual", T=T, seed=seed, A=A_NL, sigma=S_NL,
                            nu=6.0, amplitude=amplitude))


class TestValidation:
    def test_unstable_var(self):
        with pytest.raises(DgpError):
            simulate(DgpSpec(kind="var_t", T=10, A=[np.array([[1.01]])]))

    def test_nu_must_exceed_two(self):
        with pytest.raises(DgpError):
            simulate(DgpSpec(kind="var_t", T=10, A=[np.array([[0.1]])], nu=2.0))

    def test_garch_stationarity(self):
        with pytest.raises(DgpError):
            simulate(DgpSpec(kind="garch11", T=10, alpha=0.2, beta=0.8))

    @pytest.mark.parametrize("x0", [0.0, 1.0, 0.5, 0.75])
    def test_logistic_seed(self, x0):
        with pytest.raises(DgpError):
            gen_logistic_map(10, x0)

    def test_unknown_kind(self):
        with pytest.raises(DgpError):
            simulate(DgpSpec(kind="arma", T=10))


def test_spectral_radius_diagonal():
    assert spectral_radius([np.diag([0.5, -0.7])]) == pytest.approx(0.7)


def test_same_seed_same_path():
    spec = DgpSpec(kind="var_t", T=50, seed=9, A=[np.array([[0.3]])], nu=5.0)
    np.testing.assert_array_equal(simulate(spec).returns, simulate(spec).returns)


def test_var_t_stationary_covariance():
    """With A = 0 the sample covariance approaches Sigma * nu / (nu - 2)."""
    S = np.array([[1.0, 0.4], [0.4, 2.0]])
    y = simulate(DgpSpec(kind="var_t", T=200_000, seed=4, A=[np.zeros((2, 2))], sigma=S, nu=8.0)).returns
    np.testing.assert_allclose(np.cov(y.T), S * 8.0 / 6.0, rtol=0.03)


def test_garch_unconditional_variance():
    """omega / (1 - alpha - beta) = 1 for the default parameters."""
    r = simulate(DgpSpec(kind="garch11", T=200_000, seed=2))
    assert r.var() == pytest.approx(1.0, rel=0.05)


def test_logistic_map_recursion():
    x = gen_logistic_map(20, 0.2, demean=False)
    np.testing.assert_allclose(x[1:], 4 * x[:-1] * (1 - x[:-1]), atol=1e-12)
    assert x[0] == pytest.approx(4 * 0.2 * 0.8)


class TestNonlinearResidual:
    def test_components_add_up(self):
        s = _nl(T=500)
        np.testing.assert_allclose(s.panel.returns, s.mu + s.g + s.u, atol=1e-15)

    def test_zero_amplitude_has_no_nonlinear_part(self):
        s = _nl(T=500, amplitude=0.0)
        assert np.all(s.g == 0.0)

    def test_nonlinear_part_bounded(self):
        s = _nl(T=2000)
        sd = np.sqrt(np.diag(S_NL) * 6.0 / 4.0)
        assert np.all(np.abs(s.g) <= 0.5 * sd + 1e-15)

    def test_mean_uncorrelated_with_single_lags(self):
        """The product form leaves no linear signal in either lag alone."""
        s = _nl(T=6000)
        e = s.g + s.u
        for lag in (1, 2):
            c = np.corrcoef(s.g[lag:, 0], e[:-lag, 0])[0, 1]
            assert abs(c) < 0.05

    def test_oracle_beats_best_linear_fit(self):
        """Knowing mu + g beats an in-sample VAR(1) by at least 5% in RMSE."""
        s = _nl()
        y = s.panel.returns
        m = fit_var(s.panel, 1)
        var_rmse = np.sqrt((residual_matrix(m, y) ** 2).mean())
        oracle_rmse = np.sqrt((s.u[1:] ** 2).mean())
        assert oracle_rmse <= 0.95 * var_rmse
