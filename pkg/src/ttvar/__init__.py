"""Student-t VAR models with nonlinear residual learners for multivariate return forecasting."""

__version__ = "0.1.0"
