"""Optimality certificates for the perimeter-penalized eigenvalue problem.

At a stationary shape the curvature should be a convex combination of
squared normal derivatives of an orthonormal eigenbasis. Because a FEM
eigenbasis of a degenerate eigenvalue is only defined up to rotation, the
fit is over positive semidefinite trace-one matrices ``M`` with
``kappa ~ sum_ij M_ij t_i t_j``; diagonalizing ``M`` gives the convex
weights in a rotated basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, DependentTraces

__all__ = [
    "project_simplex",
    "project_spectraplex",
    "min_norm_hull",
    "DependenceResult",
    "positive_dependence",
    "Certificate",
    "fit_certificate",
    "select_points",
    "EPS_DEP",
    "EPS_INDEP",
    "KAPPA_MIN",
]

EPS_DEP = 1e-9       # relative to max |zeta_i|
EPS_INDEP = 1e-8     # relative to max |psi|^m
KAPPA_MIN = 1e-6


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def project_spectraplex(A) -> np.ndarray:
    """Projection of a symmetric matrix onto PSD matrices of unit trace."""
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    w = project_simplex(w)
    P = (V * w) @ V.T
    return 0.5 * (P + P.T)


def _polish(G, gamma, tol):
    """Solve the min-norm problem exactly on the support of ``gamma``."""
    k = G.shape[1]
    order = np.argsort(-gamma)
    best = None
    for size in range(1, k + 1):
        S = np.sort(order[:size])
        Gs = G[:, S]
        Q = Gs.T @ Gs
        kkt = np.zeros((size + 1, size + 1))
        kkt[:size, :size] = Q
        kkt[:size, size] = 1.0
        kkt[size, :size] = 1.0
        rhs = np.zeros(size + 1)
        rhs[size] = 1.0
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        g = sol[:size]
        if g.min() < -tol:
            continue
        g = np.clip(g, 0.0, None)
        if g.sum() <= 0:
            continue
        g = g / g.sum()
        full = np.zeros(k)
        full[S] = g
        d = G @ full
        nd = float(d @ d)
        # optimality: every vertex lies on the far side of the supporting plane
        if np.all(G.T @ d >= nd - tol * max(1.0, nd)):
            if best is None or nd < best[1]:
                best = (full, nd)
            break
    return best


def min_norm_hull(G, max_iter: int = 20000, tol: float = 1e-14) -> np.ndarray:
    """Weights ``gamma`` on the simplex minimizing ``|G @ gamma|``.

    ``G`` holds the candidate vectors as columns. Accelerated projected
    gradient finds the active face; the result is then polished by an
    exact solve restricted to that face.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    k = G.shape[1]
    if k == 1:
        return np.ones(1)
    H = G.T @ G
    L = max(np.linalg.eigvalsh(H)[-1], 1e-300)
    scale = float(np.max(np.diag(H)))
    ptol = 1e-12 * max(scale, 1e-300)
    x = np.full(k, 1.0 / k)
    y = x.copy()
    t = 1.0
    for it in range(1, max_iter + 1):
        x_new = project_simplex(y - (H @ y) / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        done = np.max(np.abs(x_new - x)) < tol
        x, t = x_new, t_new
        if done or it % 20 == 0:
            polished = _polish(G, x, ptol)
            if polished is not None:
                return polished[0]
        if done:
            break
    return x


@dataclass(frozen=True)
class DependenceResult:
    """Outcome of the positive-dependence test.

    Exactly one of ``nu`` (a direction with every ``<zeta_i, nu> < 0``) and
    ``gamma`` (nonnegative weights with ``sum gamma_i zeta_i ~ 0``) is set.
    """

    dependent: bool
    gamma: np.ndarray | None
    nu: np.ndarray | None
    margins: np.ndarray | None
    residual: float


def positive_dependence(zetas, eps_dep: float = EPS_DEP) -> DependenceResult:
    """Decide between a common descent direction and positive dependence.

    ``zetas`` has one functional per row. The minimum-norm point ``d`` of
    their convex hull decides: if it vanishes the hull weights certify
    dependence, otherwise ``nu = -d / |d|`` satisfies
    ``<zeta_i, nu> <= -|d|`` for all ``i``.
    """
    Z = np.atleast_2d(np.asarray(zetas, dtype=float))
    norms = np.linalg.norm(Z, axis=1)
    if np.any(norms == 0.0):
        raise Degenerate("zero functional in the family")
    gamma = min_norm_hull(Z.T)
    d = gamma @ Z
    nd = float(np.linalg.norm(d))
    if nd < eps_dep * norms.max():
        return DependenceResult(True, gamma, None, None, nd)
    nu = -d / nd
    margins = Z @ nu
    return DependenceResult(False, None, nu, margins, nd)


@dataclass(frozen=True)
class Certificate:
    M_psd: np.ndarray
    mu: np.ndarray            # eigenvalues of M_psd, descending
    basis_rotation: np.ndarray  # columns: eigenvectors of M_psd
    residual_l2: float
    residual_rel: float
    fitted: np.ndarray        # sum_ij M_ij t_i t_j on the grid
    converged: bool
    iterations: int

    @property
    def m(self) -> int:
        return self.mu.size


def fit_certificate(curvature, traces, dsigma, max_iter: int = 50000,
                    tol: float = 1e-13) -> Certificate:
    """Weighted least-squares fit of the curvature by ``t^T M t``.

    Minimizes ``sum dsigma (kappa - t^T M t)^2`` over PSD matrices with unit
    trace by accelerated projected gradient started from ``I/m``.
    """
    kappa = np.asarray(curvature, dtype=float)
    T = np.atleast_2d(np.asarray(traces, dtype=float))
    w = np.asarray(dsigma, dtype=float)
    m = T.shape[0]
    outer = np.einsum("iq,jq->qij", T, T)          # (M, m, m)

    def model(Mat):
        return np.einsum("qij,ij->q", outer, Mat)

    def grad(Mat):
        r = model(Mat) - kappa
        return 2.0 * np.einsum("q,qij->ij", w * r, outer)

    flat = outer.reshape(outer.shape[0], -1)
    L = 2.0 * np.linalg.eigvalsh((flat * w[:, None]).T @ flat)[-1]
    L = max(L, 1e-300)
    X = np.eye(m) / m
    Y = X.copy()
    t = 1.0
    converged = m == 1
    it = 0
    if m > 1:
        for it in range(1, max_iter + 1):
            X_new = project_spectraplex(Y - grad(Y) / L)
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            Y = X_new + ((t - 1.0) / t_new) * (X_new - X)
            step = np.max(np.abs(X_new - X))
            X, t = X_new, t_new
            if step < tol:
                converged = True
                break
    else:
        X = np.ones((1, 1))
    fitted = model(X)
    res = float(np.sqrt(np.sum(w * (kappa - fitted) ** 2)))
    ref = float(np.sqrt(np.sum(w * kappa ** 2)))
    mu, vecs = np.linalg.eigh(X)
    mu, vecs = mu[::-1], vecs[:, ::-1]
    return Certificate(X, mu, vecs, res, res / ref if ref > 0 else np.inf, fitted, converged, it)


def select_points(traces, curvature, dsigma=None, kappa_min: float = KAPPA_MIN,
                  eps_indep: float = EPS_INDEP) -> np.ndarray:
    """Grid indices of ``m`` boundary points with independent trace vectors.

    Only points with curvature above ``kappa_min`` are eligible. Points are
    picked greedily to maximize the Gram determinant of the selected vectors
    ``psi(x) = (t_1(x), ..., t_m(x))`` and then improved by single swaps.
    ``dsigma`` is accepted for interface symmetry and unused.
    """
    T = np.atleast_2d(np.asarray(traces, dtype=float))
    m, _ = T.shape
    cand = np.flatnonzero(np.asarray(curvature) > kappa_min)
    if cand.size < m:
        raise DependentTraces("not enough boundary points with positive curvature")
    Psi = T[:, cand].T                               # (C, m)
    chosen: list[int] = []
    for _ in range(m):
        if chosen:
            Q, _ = np.linalg.qr(Psi[chosen].T)
            resid = Psi - (Psi @ Q) @ Q.T
        else:
            resid = Psi
        score = np.sum(resid * resid, axis=1)
        score[chosen] = -1.0
        chosen.append(int(np.argmax(score)))

    def vol(sel):
        return abs(np.linalg.det(Psi[sel]))

    best = vol(chosen)
    improved = True
    while improved:
        improved = False
        for pos in range(m):
            trial = list(chosen)
            dets = np.empty(cand.size)
            for c in range(cand.size):
                trial[pos] = c
                dets[c] = vol(trial)
            c = int(np.argmax(dets))
            if dets[c] > best * (1.0 + 1e-12):
                chosen[pos] = c
                best = dets[c]
                improved = True
    scale = float(np.max(np.linalg.norm(Psi, axis=1))) ** m
    if best < eps_indep * max(scale, 1e-300):
        raise DependentTraces(f"normalized Gram determinant {best / max(scale, 1e-300):.3e} below tolerance")
    return cand[np.array(chosen)]
