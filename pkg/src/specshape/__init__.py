"""Shape optimization of Dirichlet eigenvalues plus perimeter in the plane.

Star-shaped domains are described by a truncated Fourier series of the
radius. The package meshes them, solves the P1 finite element eigenproblem,
evaluates shape derivatives of (possibly multiple) eigenvalues, and
minimizes ``lambda_k + Per`` with a cluster-aware descent that ends in a
curvature certificate ``kappa = sum mu_i (d_n u_i)^2``.
"""
from .analysis import ShapeAnalysis, analyze, certify
from .bessel import bessel_zero, disk_reference
from .cluster import signature_field, verify_gap
from .eigensolver import Cluster, Spectrum, detect_cluster, normal_trace, solve_spectrum
from .errors import (ClusterTouchesTop, Degenerate, DependentTraces, MeshTooCoarse,
                     NoConvergence, NonStarShaped, SignatureFailed, SpecShapeError)
from .geometry import (FourierBoundary, boundary_fields, perimeter, perimeter_gradient,
                       rotate, scale)
from .mesh import Mesh, build_mesh
from .optimality import fit_certificate, min_norm_hull, positive_dependence, select_points
from .optimizer import RunConfig, RunResult, cost_curve, minimize
from .shapederiv import cluster_matrix, discrete_cluster_matrices, simple_eig_derivative
from .validation import fd_derivative_audit, hessian_identity_check

__version__ = "0.1.0"

__all__ = [
    "FourierBoundary", "boundary_fields", "perimeter", "perimeter_gradient", "rotate", "scale",
    "Mesh", "build_mesh",
    "Spectrum", "Cluster", "solve_spectrum", "normal_trace", "detect_cluster",
    "simple_eig_derivative", "cluster_matrix", "discrete_cluster_matrices",
    "fit_certificate", "min_norm_hull", "positive_dependence", "select_points",
    "signature_field", "verify_gap",
    "ShapeAnalysis", "analyze", "certify",
    "RunConfig", "RunResult", "minimize", "cost_curve",
    "bessel_zero", "disk_reference", "fd_derivative_audit", "hessian_identity_check",
    "SpecShapeError", "NonStarShaped", "MeshTooCoarse", "ClusterTouchesTop", "DependentTraces",
    "SignatureFailed", "Degenerate", "NoConvergence",
]
