"""epsilon-SVR with an RBF kernel, solved by SMO on the 2N-variable dual.

With ``a = (alpha, alpha*)`` and signs ``s = (+1,...,+1, -1,...,-1)`` the
dual reads::

    min_a  1/2 a' Q a + p' a      s.t.  s' a = 0,  0 <= a <= C
    Q_ij = s_i s_j k(x_i, x_j),   p = (eps - y, eps + y)

Pairs are chosen by the maximal-violating-pair rule and updated in closed
form (the two-variable subproblem is solved exactly, then clipped to the
box).  Iteration stops when the KKT gap ``m(a) - M(a)`` drops below ``tol``.
The prediction is ``sum_j (alpha_j - alpha*_j) k(x_j, x) + b``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

TAU = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvrSolution:
    beta: np.ndarray          # alpha - alpha*
    alpha: np.ndarray
    alpha_star: np.ndarray
    b: float
    objective: float
    iterations: int
    converged: bool
    gap: float


def dual_objective(beta_pair: np.ndarray, K: np.ndarray, y: np.ndarray, eps: float) -> float:
    """``1/2 beta'K beta + eps * sum(alpha + alpha*) - y'beta`` for ``a = (alpha, alpha*)``."""
    N = len(y)
    al, als = beta_pair[:N], beta_pair[N:]
    beta = al - als
    return float(0.5 * beta @ K @ beta + eps * (al + als).sum() - y @ beta)


def smo_solve(K: np.ndarray, y: np.ndarray, C: float, eps: float,
              tol: float = 1e-3, max_iter: int = 200_000) -> SvrSolution:
    N = len(y)
    s = np.concatenate([np.ones(N), -np.ones(N)])
    a = np.zeros(2 * N)
    G = np.concatenate([eps - y, eps + y])
    Kd = np.diag(K)
    converged = False
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        up = ((s > 0) & (a < C)) | ((s < 0) & (a > 0))
        low = ((s > 0) & (a > 0)) | ((s < 0) & (a < C))
        score = -s * G
        su = np.where(up, score, -np.inf)
        sl = np.where(low, score, np.inf)
        i = int(np.argmax(su))
        j = int(np.argmin(sl))
        gap = su[i] - sl[j]
        if gap < tol:
            converged = True
            break
        ki, kj = i % N, j % N
        Qii, Qjj = Kd[ki], Kd[kj]
        Qij = s[i] * s[j] * K[ki, kj]
        ai, aj = a[i], a[j]
        if s[i] != s[j]:
            quad = max(Qii + Qjj + 2.0 * Qij, TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            quad = max(Qii + Qjj - 2.0 * Qij, TAU)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
                if nj > C:
                    nj, ni = C, total - C
            else:
                if nj < 0:
                    nj, ni = 0.0, total
                if ni < 0:
                    ni, nj = 0.0, total
        dai, daj = ni - ai, nj - aj
        a[i], a[j] = ni, nj
        # column t of Q is s_t * s * K[:, t mod N] tiled twice
        G += s * (np.tile(K[:, ki], 2) * (s[i] * dai) + np.tile(K[:, kj], 2) * (s[j] * daj))
    if not converged:
        logger.warning("SMO stopped after %d iterations with KKT gap %.3g", it, gap)
    b = -_rho(a, G, s, C)
    al, als = a[:N].copy(), a[N:].copy()
    return SvrSolution(al - als, al, als, b, dual_objective(a, K, y, eps), it, converged, float(gap))


def _rho(a, G, s, C):
    yG = s * G
    free = (a > 0) & (a < C)
    if free.any():
        return float(yG[free].mean())
    up = ((s > 0) & (a < C)) | ((s < 0) & (a > 0))
    low = ((s > 0) & (a > 0)) | ((s < 0) & (a < C))
    ub = np.min(np.where(up, yG, np.inf)) if up.any() else np.inf
    lb = np.max(np.where(low, yG, -np.inf)) if low.any() else -np.inf
    if not np.isfinite(ub):
        ub = lb
    if not np.isfinite(lb):
        lb = ub
    return float((ub + lb) / 2.0)


def kkt_violation(sol: SvrSolution, K: np.ndarray, y: np.ndarray, C: float, eps: float) -> float:
    """Largest complementary-slackness violation of the fitted dual.

    For each point with residual ``r = y - f(x)``: ``alpha = 0`` needs
    ``r <= eps``, ``alpha = C`` needs ``r >= eps``, free ``alpha`` needs
    ``r = eps`` (and symmetrically for ``alpha*``).
    """
    f = K @ sol.beta + sol.b
    r = y - f
    v = 0.0
    atol = 1e-8 * C
    for coef, sgn in ((sol.alpha, 1.0), (sol.alpha_star, -1.0)):
        rr = sgn * r - eps
        at0 = coef <= atol
        atC = coef >= C - atol
        free = ~(at0 | atC)
        if at0.any():
            v = max(v, float(np.max(np.maximum(rr[at0], 0.0))))
        if atC.any():
            v = max(v, float(np.max(np.maximum(-rr[atC], 0.0))))
        if free.any():
            v = max(v, float(np.max(np.abs(rr[free]))))
    return v
