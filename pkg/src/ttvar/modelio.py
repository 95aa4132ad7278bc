"""Flat-file serialisation of fitted VAR and Student-t VAR models.

A model is stored as two files: ``<stem>.header.txt`` with ``key: value``
metadata and ``<stem>.coef.csv`` with one ``block,row,col,value`` line per
parameter (blocks ``intercept``, ``A1..Ap``, ``sigma``).  Values are written
with ``repr`` so the round trip is exact.
"""

from __future__ import annotations

import csv
from datetime import date
from pathlib import Path

import numpy as np

from .timeseries import DataError
from .var_gaussian import VarModel
from .var_student_t import TVarModel


def _paths(stem) -> tuple[Path, Path]:
    stem = Path(stem)
    return stem.with_name(stem.name + ".header.txt"), stem.with_name(stem.name + ".coef.csv")


def save_model(model: VarModel, stem) -> tuple[Path, Path]:
    hpath, cpath = _paths(stem)
    kind = "tvar" if isinstance(model, TVarModel) else "var"
    lines = [f"kind: {kind}", f"p: {model.p}", f"K: {model.K}",
             f"symbols: {','.join(model.symbols)}", f"n_obs: {model.n_obs}",
             f"train_start: {model.train_range[0] or ''}",
             f"train_end: {model.train_range[1] or ''}"]
    if kind == "tvar":
        lines += [f"nu: {model.nu!r}", f"log_likelihood: {model.log_likelihood!r}",
                  f"iterations: {model.iterations}", f"converged: {model.converged}"]
    hpath.parent.mkdir(parents=True, exist_ok=True)
    hpath.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with open(cpath, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["block", "row", "col", "value"])
        for i, v in enumerate(model.intercept):
            w.writerow(["intercept", i, 0, repr(float(v))])
        for l, A in enumerate(model.lag_matrices, start=1):
            for i in range(model.K):
                for j in range(model.K):
                    w.writerow([f"A{l}", i, j, repr(float(A[i, j]))])
        for i in range(model.K):
            for j in range(model.K):
                w.writerow(["sigma", i, j, repr(float(model.sigma[i, j]))])
    return hpath, cpath


def load_model(stem) -> VarModel:
    hpath, cpath = _paths(stem)
    try:
        head = dict(line.split(": ", 1) if ": " in line else (line.rstrip(":"), "")
                    for line in hpath.read_text(encoding="utf-8").splitlines() if line)
        p, K = int(head["p"]), int(head["K"])
    except (OSError, KeyError, ValueError) as exc:
        raise DataError(f"bad model header {hpath}: {exc}") from None
    c = np.zeros(K)
    A = [np.zeros((K, K)) for _ in range(p)]
    S = np.zeros((K, K))
    with open(cpath, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            i, j, v = int(r["row"]), int(r["col"]), float(r["value"])
            b = r["block"]
            if b == "intercept":
                c[i] = v
            elif b == "sigma":
                S[i, j] = v
            elif b.startswith("A"):
                A[int(b[1:]) - 1][i, j] = v
            else:
                raise DataError(f"unknown block {b!r} in {cpath}")
    syms = tuple(s for s in head.get("symbols", "").split(",") if s)
    tr = tuple(date.fromisoformat(head[k]) if head.get(k) else None
               for k in ("train_start", "train_end"))
    common = dict(p=p, intercept=c, lag_matrices=tuple(A), sigma=S, symbols=syms,
                  train_range=tr, n_obs=int(head.get("n_obs", 0)))
    if head.get("kind") == "tvar":
        return TVarModel(**common, nu=float(head["nu"]),
                         log_likelihood=float(head["log_likelihood"]),
                         iterations=int(head["iterations"]),
                         converged=head["converged"] == "True")
    return VarModel(**common)
