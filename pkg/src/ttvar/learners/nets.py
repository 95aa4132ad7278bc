"""MLP, LSTM and GRU regressors in numpy with analytic gradients.

Parameters live in ordered dicts of float64 arrays.  Each architecture
provides ``init``, ``forward`` and ``loss_and_grad`` where the loss is the
mean over samples of the squared Euclidean error::

    L = (1/N) * sum_n || y_n - f(x_n) ||^2

Recurrent nets take ``(N, q, K)`` sequences ordered oldest first; the final
hidden state feeds a linear read-out.
"""

from __future__ import annotations

import numpy as np


def _uniform(rng, shape, fan_in):
    r = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-r, r, size=shape)


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def flatten(params: dict) -> np.ndarray:
    return np.concatenate([v.ravel() for v in params.values()])


def unflatten(vec: np.ndarray, like: dict) -> dict:
    out, i = {}, 0
    for k, v in like.items():
        out[k] = np.asarray(vec[i:i + v.size], dtype=float).reshape(v.shape)
        i += v.size
    if i != len(vec):
        raise ValueError("parameter vector length mismatch")
    return out


def zeros_like(params: dict) -> dict:
    return {k: np.zeros_like(v) for k, v in params.items()}


# ---------------------------------------------------------------- MLP

class MLP:
    kind = "mlp"

    @staticmethod
    def init(rng, n_in: int, hidden: tuple, n_out: int) -> dict:
        sizes = [n_in, *hidden, n_out]
        p = {}
        for l in range(len(sizes) - 1):
            p[f"W{l}"] = _uniform(rng, (sizes[l + 1], sizes[l]), sizes[l])
            p[f"b{l}"] = _uniform(rng, (sizes[l + 1],), sizes[l])
        return p

    @staticmethod
    def _layers(params):
        return len(params) // 2

    @classmethod
    def forward(cls, params, X):
        A = X
        L = cls._layers(params)
        for l in range(L - 1):
            A = np.tanh(A @ params[f"W{l}"].T + params[f"b{l}"])
        return A @ params[f"W{L - 1}"].T + params[f"b{L - 1}"]

    @classmethod
    def loss_and_grad(cls, params, X, Y):
        L = cls._layers(params)
        acts = [X]
        A = X
        for l in range(L - 1):
            A = np.tanh(A @ params[f"W{l}"].T + params[f"b{l}"])
            acts.append(A)
        out = A @ params[f"W{L - 1}"].T + params[f"b{L - 1}"]
        N = X.shape[0]
        R = out - Y
        loss = float((R * R).sum() / N)
        grads = {}
        d = 2.0 * R / N
        for l in range(L - 1, -1, -1):
            grads[f"W{l}"] = d.T @ acts[l]
            grads[f"b{l}"] = d.sum(axis=0)
            if l:
                d = (d @ params[f"W{l}"]) * (1.0 - acts[l] ** 2)
        return loss, {k: grads[k] for k in params}


# ---------------------------------------------------------------- LSTM

class LSTM:
    """Gates stacked as ``[input, forget, output, candidate]``."""

    kind = "lstm"

    @staticmethod
    def init(rng, n_in: int, hidden: tuple, n_out: int, forget_bias: float = 1.0) -> dict:
        H = hidden[0]
        b = _uniform(rng, (4 * H,), H)
        b[H:2 * H] = forget_bias
        return {
            "W": _uniform(rng, (4 * H, n_in), H),
            "U": _uniform(rng, (4 * H, H), H),
            "b": b,
            "V": _uniform(rng, (n_out, H), H),
            "c": _uniform(rng, (n_out,), H),
        }

    @staticmethod
    def _run(params, X):
        N, q, _ = X.shape
        H = params["U"].shape[1]
        h = np.zeros((N, H))
        c = np.zeros((N, H))
        cache = []
        for t in range(q):
            a = X[:, t] @ params["W"].T + h @ params["U"].T + params["b"]
            i = sigmoid(a[:, :H])
            f = sigmoid(a[:, H:2 * H])
            o = sigmoid(a[:, 2 * H:3 * H])
            g = np.tanh(a[:, 3 * H:])
            c_new = f * c + i * g
            tc = np.tanh(c_new)
            h_new = o * tc
            cache.append((h, c, i, f, o, g, tc))
            h, c = h_new, c_new
        return h, cache

    @classmethod
    def forward(cls, params, X):
        h, _ = cls._run(params, X)
        return h @ params["V"].T + params["c"]

    @classmethod
    def loss_and_grad(cls, params, X, Y):
        h, cache = cls._run(params, X)
        out = h @ params["V"].T + params["c"]
        N = X.shape[0]
        R = out - Y
        loss = float((R * R).sum() / N)
        dout = 2.0 * R / N
        g_ = zeros_like(params)
        g_["V"] = dout.T @ h
        g_["c"] = dout.sum(axis=0)
        dh = dout @ params["V"]
        dc = np.zeros_like(dh)
        U = params["U"]
        for t in range(len(cache) - 1, -1, -1):
            h_prev, c_prev, i, f, o, g, tc = cache[t]
            do = dh * tc
            dc = dc + dh * o * (1.0 - tc * tc)
            da = np.hstack([dc * g * i * (1 - i),
                            dc * c_prev * f * (1 - f),
                            do * o * (1 - o),
                            dc * i * (1 - g * g)])
            g_["W"] += da.T @ X[:, t]
            g_["U"] += da.T @ h_prev
            g_["b"] += da.sum(axis=0)
            dh = da @ U
            dc = dc * f
        return loss, g_


# ---------------------------------------------------------------- GRU

class GRU:
    """Gates stacked as ``[update z, reset r, candidate]``.

    ``h_t = (1 - z) * h_{t-1} + z * tanh(W_n x + U_n (r * h_{t-1}) + b_n)``.
    """

    kind = "gru"

    @staticmethod
    def init(rng, n_in: int, hidden: tuple, n_out: int) -> dict:
        H = hidden[0]
        return {
            "W": _uniform(rng, (3 * H, n_in), H),
            "U": _uniform(rng, (3 * H, H), H),
            "b": _uniform(rng, (3 * H,), H),
            "V": _uniform(rng, (n_out, H), H),
            "c": _uniform(rng, (n_out,), H),
        }

    @staticmethod
    def _run(params, X, h0=None):
        N, q, _ = X.shape
        H = params["U"].shape[1]
        W, U, b = params["W"], params["U"], params["b"]
        h = np.zeros((N, H)) if h0 is None else np.broadcast_to(h0, (N, H)).copy()
        cache = []
        for t in range(q):
            x = X[:, t]
            a = x @ W[:2 * H].T + h @ U[:2 * H].T + b[:2 * H]
            z = sigmoid(a[:, :H])
            r = sigmoid(a[:, H:])
            rh = r * h
            n = np.tanh(x @ W[2 * H:].T + rh @ U[2 * H:].T + b[2 * H:])
            cache.append((h, z, r, rh, n))
            h = (1.0 - z) * h + z * n
        return h, cache

    @classmethod
    def forward(cls, params, X):
        h, _ = cls._run(params, X)
        return h @ params["V"].T + params["c"]

    @classmethod
    def loss_and_grad(cls, params, X, Y):
        h, cache = cls._run(params, X)
        out = h @ params["V"].T + params["c"]
        N = X.shape[0]
        R = out - Y
        loss = float((R * R).sum() / N)
        dout = 2.0 * R / N
        g_ = zeros_like(params)
        g_["V"] = dout.T @ h
        g_["c"] = dout.sum(axis=0)
        dh = dout @ params["V"]
        U = params["U"]
        H = U.shape[1]
        for t in range(len(cache) - 1, -1, -1):
            h_prev, z, r, rh, n = cache[t]
            x = X[:, t]
            dn = dh * z * (1.0 - n * n)
            dz = dh * (n - h_prev) * z * (1.0 - z)
            drh = dn @ U[2 * H:]
            dr = drh * h_prev * r * (1.0 - r)
            dzr = np.hstack([dz, dr])
            g_["W"][2 * H:] += dn.T @ x
            g_["U"][2 * H:] += dn.T @ rh
            g_["b"][2 * H:] += dn.sum(axis=0)
            g_["W"][:2 * H] += dzr.T @ x
            g_["U"][:2 * H] += dzr.T @ h_prev
            g_["b"][:2 * H] += dzr.sum(axis=0)
            dh = dh * (1.0 - z) + drh * r + dzr @ U[:2 * H]
        return loss, g_


ARCHITECTURES = {"mlp": MLP, "lstm": LSTM, "gru": GRU}
