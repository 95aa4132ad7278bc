"""Nonlinear residual learners: epsilon-SVR, MLP, LSTM and GRU."""

from .config import KINDS, LearnerConfig, SearchSpace, default_space
from .data import Scaler, SupervisedSet, embed_lags, fit_scaler, lag_matrix, window_to_input
from .train import (
    Learner,
    TrainingError,
    learner_from_dict,
    learner_to_dict,
    load_learner,
    predict,
    save_learner,
    train,
    train_gru,
    train_lstm,
    train_mlp,
    train_svr,
)
from .tune import TuneResult, tune

__all__ = [
    "KINDS", "LearnerConfig", "SearchSpace", "default_space",
    "Scaler", "SupervisedSet", "embed_lags", "fit_scaler", "lag_matrix", "window_to_input",
    "Learner", "TrainingError", "learner_from_dict", "learner_to_dict", "load_learner",
    "predict", "save_learner", "train", "train_gru", "train_lstm", "train_mlp", "train_svr",
    "TuneResult", "tune",
]
