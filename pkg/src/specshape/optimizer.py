"""Minimization of ``lambda_k + Per`` (or ``lambda_k`` at fixed perimeter).

Each iteration solves the FEM spectrum, finds the eigenvalue cluster around
``lambda_k`` and builds candidate gradients ``g_phi`` from unit vectors
``phi`` of the cluster eigenspace. The step direction is the negated
minimum-norm point of their convex hull; when that point vanishes no common
descent direction exists, which is the cue to fit the curvature certificate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields as dc_fields

import numpy as np

from .analysis import ShapeAnalysis, analyze, certify
from .bessel import disk_reference
from .cluster import GapReport
from .eigensolver import Cluster, detect_cluster, solve_spectrum
from .errors import ClusterTouchesTop, NonStarShaped
from .geometry import FourierBoundary, basis_functions, perimeter, perimeter_gradient
from .mesh import build_mesh
from .optimality import Certificate, min_norm_hull
from .shapederiv import cluster_matrix, discrete_cluster_matrices

__all__ = ["RunConfig", "RunResult", "minimize", "cost_curve", "default_init"]

log = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
MIN_STEP = 1e-12


@dataclass
class RunConfig:
    k: int = 1
    fourier_order: int = 8
    n_r: int = 40
    n_theta: int = 80
    tau_cluster: float = 1e-3
    # eigenvalues this close (relative) to lambda_k enter the descent model
    tau_active: float = 1e-2
    eps_opt: float = 1e-3
    eps_cert: float = 5e-2
    max_iters: int = 300
    restarts: int = 3
    seed: int = 0
    mode: str = "penalized"
    perimeter_target: float = 2.0 * math.pi
    gradient: str = "discrete"
    n_samples: int = 256

    def validate(self) -> "RunConfig":
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.fourier_order < 1:
            raise ValueError("fourier_order must be at least 1")
        for name in ("tau_cluster", "tau_active", "eps_opt", "eps_cert", "perimeter_target"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 0 or self.restarts < 1:
            raise ValueError("max_iters must be >= 0 and restarts >= 1")
        if self.mode not in ("penalized", "constrained"):
            raise ValueError("mode must be 'penalized' or 'constrained'")
        if self.gradient not in ("discrete", "boundary"):
            raise ValueError("gradient must be 'discrete' or 'boundary'")
        if self.n_r < 2 or self.n_theta < 8 or self.n_theta % 2:
            raise ValueError("invalid mesh resolution")
        return self

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in dc_fields(cls)]


@dataclass
class RunResult:
    config: RunConfig
    boundary: FourierBoundary
    objective: float
    perimeter: float
    lambdas: np.ndarray
    cluster: Cluster
    certificate: Certificate
    gap: GapReport
    stationarity: float
    iterations: int
    converged: bool
    flags: list[str] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)

    @property
    def lambda_k(self) -> float:
        return float(self.lambdas[self.config.k - 1])


def default_init(k: int, restart: int = 0, seed: int = 0, order: int = 8) -> FourierBoundary:
    """Starting shape for restart ``restart``.

    A disk at the radius that is stationary for ``lambda_k`` of the disk,
    elongated by a ``cos 2 theta`` mode; later restarts add seeded random
    low-order modes.
    """
    lam = float(disk_reference(k).eigenvalues[k - 1])
    R = (lam / math.pi) ** (1.0 / 3.0)
    a = np.zeros(order)
    b = np.zeros(order)
    if order >= 2:
        a[1] = 0.1 * R
    if restart > 0:
        rng = np.random.default_rng([seed, k, restart])
        top = min(order, 4)
        a[1:top] += rng.uniform(-0.05, 0.05, top - 1) * R
        b[1:top] += rng.uniform(-0.05, 0.05, top - 1) * R
    return FourierBoundary(R, a, b)


class _Problem:
    """Objective evaluation and candidate gradients at coefficient vectors."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.N = cfg.fourier_order
        self.phi_sectors, _ = basis_functions(self.N, 2.0 * np.pi * np.arange(cfg.n_theta) / cfg.n_theta)

    def boundary(self, x) -> FourierBoundary:
        return FourierBoundary.from_vector(x).check()

    def rescale(self, x):
        if self.cfg.mode != "constrained":
            return x
        return x * (self.cfg.perimeter_target / perimeter(FourierBoundary.from_vector(x)))

    def value(self, x) -> float:
        b = self.boundary(x)
        mesh = build_mesh(b, self.cfg.n_r, self.cfg.n_theta)
        lam = solve_spectrum(mesh, self.cfg.k + 2).values[self.cfg.k - 1]
        if self.cfg.mode == "penalized":
            return float(lam + perimeter(b))
        return float(lam)

    def state(self, x) -> ShapeAnalysis:
        return analyze(self.boundary(x), self.cfg.k, self.cfg.n_r, self.cfg.n_theta,
                       M=self.cfg.n_samples, tau=self.cfg.tau_cluster)

    def objective(self, st: ShapeAnalysis) -> float:
        if self.cfg.mode == "penalized":
            return st.lambda_k + st.perimeter
        return st.lambda_k

    def active_cluster(self, st: ShapeAnalysis) -> Cluster:
        try:
            return detect_cluster(st.spectrum.values, self.cfg.k, self.cfg.tau_active)
        except ClusterTouchesTop:
            return st.cluster

    def cluster_rates(self, st: ShapeAnalysis, active: Cluster) -> np.ndarray:
        """``(P, m, m)``: cluster matrices for every coefficient direction."""
        idx = active.indices
        if self.cfg.gradient == "discrete":
            return discrete_cluster_matrices(st.mesh, st.spectrum, idx, self.phi_sectors)
        phi, _ = basis_functions(self.N, st.fields.thetas)
        W = phi * (st.fields.rho * st.fields.dtheta)      # (P, M)
        T = st.traces[idx]
        return np.array([cluster_matrix(T, w) for w in W])

    def candidates(self, st: ShapeAnalysis, rng) -> tuple[np.ndarray, Cluster]:
        """Candidate gradients as columns, and the active cluster used."""
        cfg = self.cfg
        active = self.active_cluster(st)
        A = self.cluster_rates(st, active)                 # (P, m, m)
        m = active.m
        q = perimeter_gradient(st.boundary)
        shift = q[:, None] if cfg.mode == "penalized" else 0.0

        def grads(phis):                                   # phis: (m, s)
            return np.einsum("pij,is,js->ps", A, phis, phis) + shift

        def sample(basis, count):
            dim = basis.shape[1]
            rand = rng.normal(size=(dim, count))
            rand /= np.linalg.norm(rand, axis=0)
            return basis @ np.hstack((np.eye(dim), rand))

        ell = cfg.k - active.lo + 1
        if m == 1:
            G = grads(np.ones((1, 1)))
        elif ell == m:
            G = grads(sample(np.eye(m), 2 * m))
        else:
            # lambda_k is the ell-th branch: only an ell-dimensional subspace
            # of the cluster has to decrease; try subspaces adapted to the
            # rate matrices along the single-mode gradients
            probes = grads(sample(np.eye(m), 2 * m))
            best, best_norm = None, -1.0
            for c in (-probes).T:
                Ac = np.einsum("p,pij->ij", c, A)
                _, vecs = np.linalg.eigh(Ac)
                Gs = grads(sample(vecs[:, :ell], 2 * ell))
                Gs_p = self._project(Gs, q)
                d = Gs_p @ min_norm_hull(Gs_p)
                nd = float(np.linalg.norm(d))
                if nd > best_norm:
                    best, best_norm = Gs, nd
            G = best
        return self._project(G, q), active

    def _project(self, G, q):
        if self.cfg.mode == "penalized":
            return G
        return G - np.outer(q, q @ G) / float(q @ q)


def minimize(config: RunConfig, init: FourierBoundary | None = None) -> RunResult:
    """Run the descent from ``init`` (default :func:`default_init`)."""
    cfg = config.validate()
    prob = _Problem(cfg)
    if init is None:
        init = default_init(cfg.k, 0, cfg.seed, cfg.fourier_order)
    x = prob.rescale(init.padded(cfg.fourier_order).vector())
    rng = np.random.default_rng(cfg.seed)
    st = prob.state(x)
    f = prob.objective(st)
    t = None
    flags: list[str] = []
    history: list[dict] = []
    converged = False
    stat = math.inf
    cert = gap = None
    active = st.cluster
    it = 0
    for it in range(1, cfg.max_iters + 1):
        G, active = prob.candidates(st, rng)
        gamma = min_norm_hull(G)
        d = G @ gamma
        stat = float(np.linalg.norm(d))
        entry = {"iter": it, "objective": f, "stationarity": stat,
                 "cluster": [active.lo, active.hi], "perimeter": st.perimeter}
        if stat < cfg.eps_opt:
            cert, gap = certify(st, cfg.mode, cfg.tau_cluster, active)
            entry["residual_rel"] = cert.residual_rel
            if cert.residual_rel < cfg.eps_cert and gap.gap_ok:
                converged = True
                history.append(entry)
                break
        if t is None:
            t = 0.02 * abs(x[0]) / max(stat, 1e-300)
        else:
            t = min(2.0 * t, 1e3)
        accepted = False
        while t >= MIN_STEP:
            try:
                x_new = prob.rescale(x - t * d)
                f_new = prob.value(x_new)
            except NonStarShaped:
                t *= 0.5
                continue
            if f_new <= f - ARMIJO_C1 * t * stat * stat:
                accepted = True
                break
            t *= 0.5
        entry["step"] = t if accepted else 0.0
        history.append(entry)
        log.debug("iter %d f=%.10g stat=%.3e step=%.3e", it, f, stat, entry["step"])
        if not accepted:
            flags.append("NoDescent")
            break
        x = x_new
        st = prob.state(x)
        f = prob.objective(st)
    else:
        if cfg.max_iters > 0:
            flags.append("MaxIterations")
    if not converged:
        active = prob.active_cluster(st)
        cert, gap = certify(st, cfg.mode, cfg.tau_cluster, active)
    if not converged and stat < cfg.eps_opt:
        if cert.residual_rel >= cfg.eps_cert:
            flags.append("CertificateResidual")
        if not gap.gap_ok:
            flags.append("GapViolated")
    return RunResult(cfg, st.boundary, prob.objective(st), st.perimeter, st.spectrum.values.copy(),
                     active, cert, gap, stat, it, converged, flags, history)


def cost_curve(k_max: int, template: RunConfig | None = None) -> list[dict]:
    """Best-of-restarts optimal costs for ``k = 1..k_max``.

    Every run is kept in the returned records; ``best`` only considers
    converged runs and is None when none converged for that ``k``.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    template = RunConfig() if template is None else template
    out = []
    for k in range(1, k_max + 1):
        runs = []
        for r in range(template.restarts):
            cfg = RunConfig(**{**asdict(template), "k": k})
            init = default_init(k, r, cfg.seed, cfg.fourier_order)
            runs.append(minimize(cfg, init))
        good = [res for res in runs if res.converged]
        best = min(good, key=lambda res: res.objective) if good else None
        out.append({"k": k, "runs": runs, "best": best,
                    "cost": None if best is None else best.objective})
    return out
