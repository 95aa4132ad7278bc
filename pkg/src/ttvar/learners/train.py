"""Training, prediction and serialisation of residual learners."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..rng import generator
from ..timeseries import DataError
from .config import LearnerConfig
from .data import Scaler, SupervisedSet, fit_scaler, to_sequences, window_to_input
from .nets import ARCHITECTURES, flatten, unflatten
from .svr import rbf_kernel, smo_solve

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class TrainingError(RuntimeError):
    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message if epoch is None else f"{message} (epoch {epoch})")
        self.epoch = epoch


@dataclass
class Learner:
    config: LearnerConfig
    K: int
    params: dict
    in_scaler: Scaler
    out_scaler: Scaler
    log: list = field(default_factory=list)
    support: np.ndarray | None = None     # SVR only: scaled support inputs
    info: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.config.kind

    @property
    def q(self) -> int:
        return self.config.q

    def raw_predict(self, Z: np.ndarray) -> np.ndarray:
        """Scaled inputs (rows flattened newest first) to scaled outputs."""
        if self.kind == "svr":
            if self.support is None or len(self.support) == 0:
                return np.tile(self.params["b"], (Z.shape[0], 1))
            Kx = rbf_kernel(Z, self.support, self.config.gamma)
            return Kx @ self.params["beta"] + self.params["b"]
        net = ARCHITECTURES[self.kind]
        X = to_sequences(Z, self.q) if self.kind in ("lstm", "gru") else Z
        return net.forward(self.params, X)

    def predict_batch(self, inputs: np.ndarray) -> np.ndarray:
        Z = self.in_scaler.apply(inputs)
        return self.out_scaler.invert(self.raw_predict(Z))


def predict(learner: Learner, recent_residuals: np.ndarray) -> np.ndarray:
    """Correction for the next step from the last ``q`` residual rows (newest last)."""
    x = window_to_input(recent_residuals, learner.q, learner.K)
    return learner.predict_batch(x)[0]


def _split(n: int, fraction: float) -> int:
    n_val = max(1, int(math.floor(n * fraction)))
    if n - n_val < 2:
        raise DataError(f"only {n} samples: too few for a train/validation split")
    return n - n_val


def _scalers(ds: SupervisedSet, n_train: int):
    return fit_scaler(ds.inputs[:n_train]), fit_scaler(ds.targets[:n_train])


def _adam(loss_grad, params: dict, cfg: LearnerConfig, val_loss):
    """Full-batch Adam with early stopping on ``val_loss``; keeps the best parameters."""
    theta = flatten(params)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    best = theta.copy()
    best_val = val_loss(unflatten(theta, params))
    log = [(0, float("nan"), best_val)]
    since = 0
    for epoch in range(1, cfg.epochs + 1):
        p = unflatten(theta, params)
        loss, g = loss_grad(p)
        if not math.isfinite(loss):
            raise TrainingError("non-finite training loss", epoch)
        g = flatten(g)
        m = ADAM_BETA1 * m + (1 - ADAM_BETA1) * g
        v = ADAM_BETA2 * v + (1 - ADAM_BETA2) * g * g
        mh = m / (1 - ADAM_BETA1 ** epoch)
        vh = v / (1 - ADAM_BETA2 ** epoch)
        theta = theta - cfg.learning_rate * mh / (np.sqrt(vh) + ADAM_EPS)
        vl = val_loss(unflatten(theta, params))
        if not math.isfinite(vl):
            raise TrainingError("non-finite validation loss", epoch)
        log.append((epoch, loss, vl))
        if vl < best_val:
            best_val, best, since = vl, theta.copy(), 0
        else:
            since += 1
            if since >= cfg.patience:
                break
    return unflatten(best, params), log


def train_neural(ds: SupervisedSet, cfg: LearnerConfig, init_params: dict | None = None) -> Learner:
    if cfg.kind not in ARCHITECTURES:
        raise ValueError(f"{cfg.kind} is not a neural learner")
    if ds.q != cfg.q:
        raise ValueError(f"data embedded with q={ds.q} but config has q={cfg.q}")
    n_train = _split(ds.N, cfg.validation_fraction)
    in_s, out_s = _scalers(ds, n_train)
    Z = in_s.apply(ds.inputs)
    T = out_s.apply(ds.targets)
    net = ARCHITECTURES[cfg.kind]
    X = to_sequences(Z, cfg.q) if cfg.kind in ("lstm", "gru") else Z
    Xtr, Ytr, Xva, Yva = X[:n_train], T[:n_train], X[n_train:], T[n_train:]
    rng = generator(cfg.seed, "init", cfg.kind)
    n_in = ds.K if cfg.kind in ("lstm", "gru") else Z.shape[1]
    params = init_params if init_params is not None else net.init(rng, n_in, cfg.hidden, ds.K)
    if cfg.init == "zero":
        params = {k: np.zeros_like(v) for k, v in params.items()}

    def val_loss(p):
        R = net.forward(p, Xva) - Yva
        return float((R * R).sum() / len(Yva))

    best, log = _adam(lambda p: net.loss_and_grad(p, Xtr, Ytr), params, cfg, val_loss)
    return Learner(cfg, ds.K, best, in_s, out_s, log,
                   info={"n_train": n_train, "n_val": ds.N - n_train})


def train_mlp(ds: SupervisedSet, cfg: LearnerConfig) -> Learner:
    return train_neural(ds, cfg)


def train_lstm(ds: SupervisedSet, cfg: LearnerConfig) -> Learner:
    return train_neural(ds, cfg)


def train_gru(ds: SupervisedSet, cfg: LearnerConfig) -> Learner:
    return train_neural(ds, cfg)


def train_svr(ds: SupervisedSet, cfg: LearnerConfig) -> Learner:
    """One independent epsilon-SVR per target column on standardised data."""
    if ds.N < 2:
        raise DataError("SVR needs at least 2 samples")
    in_s, out_s = _scalers(ds, ds.N)
    Z = in_s.apply(ds.inputs)
    T = out_s.apply(ds.targets)
    Kmat = rbf_kernel(Z, Z, cfg.gamma)
    betas, bs, info = [], [], []
    for k in range(ds.K):
        sol = smo_solve(Kmat, T[:, k], cfg.C, cfg.epsilon, cfg.svr_tol, cfg.svr_max_iter)
        betas.append(sol.beta)
        bs.append(sol.b)
        info.append({"iterations": sol.iterations, "converged": sol.converged,
                     "gap": sol.gap, "objective": sol.objective})
    beta = np.column_stack(betas)
    keep = np.any(beta != 0.0, axis=1)
    return Learner(cfg, ds.K, {"beta": beta[keep], "b": np.array(bs)}, in_s, out_s,
                   support=Z[keep], info={"columns": info})


TRAINERS = {"mlp": train_mlp, "lstm": train_lstm, "gru": train_gru, "svr": train_svr}


def train(ds: SupervisedSet, cfg: LearnerConfig) -> Learner:
    return TRAINERS[cfg.kind](ds, cfg)


def _encode(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": [float(x) for x in a.ravel()]}


def _decode(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=float).reshape(d["shape"])


def learner_to_dict(learner: Learner) -> dict:
    out = {
        "header": {"kind": learner.kind, "q": learner.q, "K": learner.K,
                   "seed": learner.config.seed, "config": learner.config.to_dict()},
        "in_scaler": {"mean": _encode(learner.in_scaler.mean), "std": _encode(learner.in_scaler.std)},
        "out_scaler": {"mean": _encode(learner.out_scaler.mean), "std": _encode(learner.out_scaler.std)},
        "params": {k: _encode(v) for k, v in learner.params.items()},
    }
    if learner.support is not None:
        out["support"] = _encode(learner.support)
    return out


def learner_from_dict(d: dict) -> Learner:
    cfg = LearnerConfig.from_dict(d["header"]["config"])
    sup = _decode(d["support"]) if "support" in d else None
    return Learner(
        cfg, int(d["header"]["K"]),
        {k: _decode(v) for k, v in d["params"].items()},
        Scaler(_decode(d["in_scaler"]["mean"]), _decode(d["in_scaler"]["std"])),
        Scaler(_decode(d["out_scaler"]["mean"]), _decode(d["out_scaler"]["std"])),
        support=sup,
    )


def save_learner(learner: Learner, path) -> None:
    Path(path).write_text(json.dumps(learner_to_dict(learner)), encoding="utf-8")


def load_learner(path) -> Learner:
    return learner_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
