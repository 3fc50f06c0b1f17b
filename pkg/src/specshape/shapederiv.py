"""First-order shape derivatives of Dirichlet eigenvalues under radial perturbations.

For a radial displacement ``d rho`` of the boundary, ``V.n dsigma`` reduces to
``d rho * rho * d theta``, so every boundary integral below is a weighted sum
over the theta grid with weights from :func:`vn_measure`.
"""
from __future__ import annotations

import numpy as np

from .eigensolver import Cluster, Spectrum
from .geometry import BoundaryFields, basis_functions, direction_on_grid
from .mesh import Mesh, radial_velocity

__all__ = [
    "vn_measure",
    "simple_eig_derivative",
    "cluster_matrix",
    "objective_directional",
    "eigenvalue_gradient",
    "eigenspace_gradient",
    "perimeter_rate",
    "discrete_cluster_matrices",
]


def vn_measure(fields: BoundaryFields, direction) -> np.ndarray:
    """Weights ``w`` with ``int f V.n dsigma = sum(f * w)`` on ``fields.thetas``."""
    d_rho = direction_on_grid(direction, fields.thetas)
    return d_rho * fields.rho * fields.dtheta


def simple_eig_derivative(trace, weights) -> float:
    """Rate ``-int (d_n u)^2 V.n dsigma`` of a simple eigenvalue."""
    trace = np.asarray(trace)
    return float(-np.sum(trace * trace * weights))


def cluster_matrix(traces, weights) -> np.ndarray:
    """Matrix ``a_ij = -int d_n u_i d_n u_j V.n dsigma`` for a cluster of modes.

    ``traces`` has shape ``(m, M)``. The result is symmetric by construction.
    """
    t = np.atleast_2d(np.asarray(traces, dtype=float))
    tw = t * weights
    A = -(tw @ t.T)
    return 0.5 * (A + A.T)


def perimeter_rate(fields: BoundaryFields, direction) -> float:
    """First variation of the length, ``int kappa V.n dsigma``."""
    return float(np.sum(fields.curvature * vn_measure(fields, direction)))


def objective_directional(A, per_rate: float, k: int | None = None,
                          cluster: Cluster | None = None):
    """One-sided rates of the ordered cluster eigenvalues plus the perimeter.

    Returns the ascending eigenvalues of ``A`` shifted by ``per_rate``.
    When ``k`` and ``cluster`` are given, also returns the right derivative
    of ``lambda_k + Per``, which is entry ``k - lo`` of that list.
    """
    rates = np.linalg.eigvalsh(np.atleast_2d(A)) + per_rate
    if k is None:
        return rates
    if cluster is None or not cluster.lo <= k <= cluster.hi:
        raise ValueError("k must lie in the given cluster")
    return rates, float(rates[k - cluster.lo])


def eigenvalue_gradient(fields: BoundaryFields, trace, order: int) -> np.ndarray:
    """Coefficient gradient of a simple eigenvalue: one rate per basis direction."""
    phi, _ = basis_functions(order, fields.thetas)
    w = phi * (fields.rho * fields.dtheta)
    return -(w @ (np.asarray(trace) ** 2))


def eigenspace_gradient(fields: BoundaryFields, traces, phi_vec, order: int) -> np.ndarray:
    """Gradient of the Rayleigh branch along the unit eigenspace vector ``phi_vec``.

    The trace of the combined mode is ``sum_i phi_i d_n u_i``.
    """
    combo = np.asarray(phi_vec, dtype=float) @ np.atleast_2d(traces)
    return eigenvalue_gradient(fields, combo, order)


def discrete_cluster_matrices(mesh: Mesh, spectrum: Spectrum, which, d_rho_sectors) -> np.ndarray:
    """Exact derivatives of the discrete Rayleigh quotients under mesh motion.

    For each radial direction (rows of ``d_rho_sectors``, sampled at the
    mesh sectors) returns the ``m x m`` matrix ``U^T (dK - lambda dM) U`` of
    the modes ``which``. For a simple discrete eigenvalue the 1x1 entry is
    the derivative of the FEM eigenvalue itself, so it agrees with finite
    differences of :func:`solve_spectrum` to roundoff.
    """
    idx = np.atleast_1d(which)
    d = np.atleast_2d(np.asarray(d_rho_sectors, dtype=float))
    vel = radial_velocity(mesh, d)                       # (P, V, 2)
    tri = mesh.triangles
    p = mesh.vertices[tri]
    area = mesh.signed_areas()
    e = np.stack((p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]), axis=1)
    grads = np.stack((-e[..., 1], e[..., 0]), axis=-1) / (2.0 * area)[:, None, None]
    u = spectrum.full_modes()[:, idx]                    # (V, m)
    ut = u[tri]                                          # (T, 3, m)
    gu = np.einsum("tim,tid->tmd", ut, grads)            # (T, m, 2)
    DV = np.einsum("ptia,tib->ptab", vel[:, tri], grads)  # (P, T, 2, 2)
    div = DV[..., 0, 0] + DV[..., 1, 1]
    S = DV + np.swapaxes(DV, -1, -2)
    dot = np.einsum("tma,tna->tmn", gu, gu)
    stiff = np.einsum("pt,tmn->pmn", div * area, dot) - np.einsum(
        "tma,ptab,tnb->pmn", gu * area[:, None, None], S, gu)
    m_ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    mloc = np.einsum("tim,ij,tjn->tmn", ut, m_ref, ut) * area[:, None, None]
    mass = np.einsum("pt,tmn->pmn", div, mloc)
    lam = spectrum.values[idx]
    lam_pair = 0.5 * (lam[:, None] + lam[None, :])
    A = stiff - lam_pair * mass
    return 0.5 * (A + np.swapaxes(A, -1, -2))
