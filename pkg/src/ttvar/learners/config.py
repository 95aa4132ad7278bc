"""Learner hyperparameters and the default random-search spaces."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

KINDS = ("svr", "mlp", "lstm", "gru")


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    q: int = 5
    hidden: tuple = (16,)
    learning_rate: float = 1e-3
    epochs: int = 300
    patience: int = 20
    seed: int = 0
    C: float = 1.0
    epsilon: float = 1e-3
    gamma: float = 0.1
    validation_fraction: float = 0.2
    svr_tol: float = 1e-3
    svr_max_iter: int = 200_000
    init: str = "uniform"     # "zero" starts every weight at 0 (null correction when epochs=0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if any(h < 1 for h in self.hidden) or not self.hidden:
            raise ValueError("hidden sizes must be positive")
        if self.kind in ("lstm", "gru") and len(self.hidden) != 1:
            raise ValueError("recurrent learners take a single hidden size")
        if self.init not in ("uniform", "zero"):
            raise ValueError("init must be 'uniform' or 'zero'")
        if self.learning_rate <= 0 or self.epochs < 0 or self.patience < 1:
            raise ValueError("learning_rate > 0, epochs >= 0 and patience >= 1 required")
        if min(self.C, self.epsilon, self.gamma) <= 0:
            raise ValueError("SVR C, epsilon and gamma must be positive")
        if not 0 < self.validation_fraction <= 0.5:
            raise ValueError("validation_fraction must lie in (0, 0.5]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LearnerConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown learner config keys: {sorted(unknown)}")
        d = dict(d)
        if "hidden" in d:
            d["hidden"] = tuple(d["hidden"])
        return cls(**d)


@dataclass(frozen=True)
class SearchSpace:
    """Discrete choices and log-uniform ranges sampled by the tuner."""

    depth: tuple = (1,)
    units: tuple = (16,)
    learning_rate: tuple = (1e-4, 1e-2)
    epochs: int = 300
    patience: int = 20
    C: tuple = (1e-2, 1e2)
    epsilon: tuple = (1e-4, 1e-2)
    gamma: tuple = (1e-2, 1e1)


def default_space(kind: str) -> SearchSpace:
    if kind == "mlp":
        return SearchSpace(depth=(1, 2, 3), units=(8, 16, 32, 64))
    if kind in ("lstm", "gru"):
        return SearchSpace(depth=(1,), units=(8, 16, 32, 64))
    if kind == "svr":
        return SearchSpace()
    raise ValueError(f"unknown learner kind {kind!r}")
