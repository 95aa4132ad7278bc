"""Seeded random-search tuning on a chronological train/validation split."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..rng import generator
from .config import LearnerConfig, SearchSpace, default_space
from .data import SupervisedSet
from .train import TrainingError, train

logger = logging.getLogger(__name__)


@dataclass
class TuneResult:
    best: LearnerConfig
    trials: list = field(default_factory=list)   # (index, config, val_mse or None, error)


def _log_uniform(rng, lo, hi):
    if lo == hi:
        return float(lo)
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def sample_config(rng: np.random.Generator, base: LearnerConfig, space: SearchSpace) -> LearnerConfig:
    if base.kind == "svr":
        return replace(base, C=_log_uniform(rng, *space.C),
                       epsilon=_log_uniform(rng, *space.epsilon),
                       gamma=_log_uniform(rng, *space.gamma))
    depth = int(space.depth[rng.integers(len(space.depth))])
    units = int(space.units[rng.integers(len(space.units))])
    return replace(base, hidden=(units,) * depth,
                   learning_rate=_log_uniform(rng, *space.learning_rate),
                   epochs=space.epochs, patience=space.patience)


def tune(kind: str, ds: SupervisedSet, budget: int, seed: int,
         base: LearnerConfig | None = None, space: SearchSpace | None = None,
         validation_fraction: float = 0.2) -> TuneResult:
    """Return the trial config with the lowest validation MSE.

    Each trial trains on the leading ``1 - validation_fraction`` of ``ds`` and
    is scored on the remaining tail.  Trials are drawn from one seeded stream
    in index order so the log is reproducible.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    base = base or LearnerConfig(kind=kind, q=ds.q, seed=seed)
    space = space or default_space(kind)
    n_val = max(1, int(math.floor(ds.N * validation_fraction)))
    fit_part, val_part = ds.head(ds.N - n_val), ds.tail(n_val)
    rng = generator(seed, "tune", kind)
    trials = []
    for i in range(budget):
        cfg = sample_config(rng, base, space)
        try:
            learner = train(fit_part, cfg)
            R = learner.predict_batch(val_part.inputs) - val_part.targets
            mse = float((R * R).mean())
            trials.append((i, cfg, mse, None))
        except (TrainingError, ValueError, np.linalg.LinAlgError) as exc:
            logger.info("trial %d failed: %s", i, exc)
            trials.append((i, cfg, None, str(exc)))
    scored = [t for t in trials if t[2] is not None and math.isfinite(t[2])]
    if not scored:
        raise TrainingError("all tuning trials failed")
    best = min(scored, key=lambda t: (t[2], t[0]))
    return TuneResult(best[1], trials)
