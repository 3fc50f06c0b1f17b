"""One-shot evaluation of a shape: mesh, spectrum, traces, cluster, certificate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import GapReport, verify_gap
from .eigensolver import TAU_CLUSTER, Cluster, Spectrum, detect_cluster, normal_trace, solve_spectrum
from .errors import ClusterTouchesTop
from .geometry import BoundaryFields, FourierBoundary, boundary_fields, perimeter
from .mesh import Mesh, build_mesh
from .optimality import Certificate, fit_certificate

__all__ = ["ShapeAnalysis", "analyze", "certify"]


@dataclass(frozen=True)
class ShapeAnalysis:
    boundary: FourierBoundary
    mesh: Mesh
    spectrum: Spectrum
    fields: BoundaryFields
    traces: np.ndarray     # (K, M) normal derivatives on the fields grid
    cluster: Cluster
    perimeter: float
    k: int

    @property
    def lambda_k(self) -> float:
        return float(self.spectrum.values[self.k - 1])

    def cluster_traces(self) -> np.ndarray:
        return self.traces[self.cluster.indices]


def analyze(boundary: FourierBoundary, k: int, n_r: int = 40, n_theta: int = 80,
            M: int = 256, K: int | None = None, tau: float = TAU_CLUSTER,
            method: str = "auto") -> ShapeAnalysis:
    """Solve for ``K`` (default ``k + 4``) eigenpairs and locate the cluster of ``lambda_k``.

    ``K`` is enlarged automatically while the cluster touches the top of
    the computed spectrum.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    K = k + 4 if K is None else K
    mesh = build_mesh(boundary, n_r, n_theta)
    while True:
        spec = solve_spectrum(mesh, K, method=method)
        try:
            cl = detect_cluster(spec.values, k, tau)
            break
        except ClusterTouchesTop:
            K += 4
    fields = boundary_fields(boundary, M)
    traces = normal_trace(mesh, spec, fields)
    return ShapeAnalysis(boundary, mesh, spec, fields, traces, cl, perimeter(boundary), k)


def certify(state: ShapeAnalysis, mode: str = "penalized",
            tau: float = TAU_CLUSTER, cluster: Cluster | None = None) -> tuple[Certificate, GapReport]:
    """Fit the curvature identity on the cluster of ``lambda_k`` and check the gap.

    ``cluster`` overrides the cluster found at analysis time, e.g. a wider
    one detected with a looser tolerance.

    In constrained mode the curvature is scaled by the Lagrange multiplier
    ``2 lambda_k / Per`` read off from the homothety law, which is the same
    as certifying the homothetic copy that is stationary for the penalized sum.
    """
    kappa = state.fields.curvature
    if mode == "constrained":
        kappa = kappa * (2.0 * state.lambda_k / state.perimeter)
    elif mode != "penalized":
        raise ValueError(f"unknown mode {mode!r}")
    idx = state.cluster.indices if cluster is None else cluster.indices
    cert = fit_certificate(kappa, state.traces[idx], state.fields.dsigma)
    gap = verify_gap(state.spectrum.values, state.k, tau)
    return cert, gap
