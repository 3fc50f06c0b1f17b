"""P1 finite elements for the Dirichlet Laplacian on a polar mesh.

Eigenpairs come from the generalized symmetric problem ``K u = lambda M u``
restricted to interior vertices. Normal derivatives on the boundary are
recovered from the discrete residual at boundary vertices (flux recovery)
rather than by differentiating the P1 field.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ClusterTouchesTop, MeshTooCoarse
from .geometry import BoundaryFields
from .mesh import Mesh

__all__ = [
    "Spectrum",
    "Cluster",
    "assemble",
    "solve_spectrum",
    "normal_trace",
    "detect_cluster",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "TAU_CLUSTER",
    "DENSE_LIMIT",
]

TAU_CLUSTER = 1e-3
# above this many interior unknowns the shift-invert Lanczos path is used
DENSE_LIMIT = 1500


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray       # (K,) ascending
    modes: np.ndarray        # (n_interior, K), mass-orthonormal
    mass_norms: np.ndarray   # (K, K) Gram matrix in the mass inner product
    stiffness: sp.csr_matrix = None   # full (all-vertex) matrices, kept for flux recovery
    mass: sp.csr_matrix = None
    interior_ids: np.ndarray = None
    n_vertices: int = 0

    @property
    def K(self) -> int:
        return self.values.size

    def full_modes(self) -> np.ndarray:
        """Modes extended by zero to all mesh vertices."""
        u = np.zeros((self.n_vertices, self.K))
        u[self.interior_ids] = self.modes
        return u


@dataclass(frozen=True)
class Cluster:
    lo: int  # 1-based
    hi: int

    @property
    def m(self) -> int:
        return self.hi - self.lo + 1

    @property
    def indices(self) -> np.ndarray:
        """0-based positions into a Spectrum."""
        return np.arange(self.lo - 1, self.hi)


def assemble(mesh: Mesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Stiffness and consistent mass matrices over all vertices."""
    p = mesh.vertices[mesh.triangles]            # (T, 3, 2)
    area = mesh.signed_areas()
    # gradients of barycentric coordinates: rotate opposite edges
    e = np.stack((p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]), axis=1)
    grads = np.stack((-e[..., 1], e[..., 0]), axis=-1) / (2.0 * area)[:, None, None]
    k_loc = np.einsum("tid,tjd->tij", grads, grads) * area[:, None, None]
    m_ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_loc = area[:, None, None] * m_ref[None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_vertices
    K = sp.coo_matrix((k_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((m_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return K, M


def solve_spectrum(mesh: Mesh, K: int, method: str = "auto") -> Spectrum:
    """Lowest ``K`` Dirichlet eigenpairs on ``mesh``.

    ``method`` is ``"dense"`` (LAPACK generalized eigensolver), ``"sparse"``
    (shift-invert Lanczos about zero with a fixed start vector) or
    ``"auto"``, which picks dense for small problems.
    """
    if K < 1:
        raise ValueError("K must be positive")
    Kf, Mf = assemble(mesh)
    interior = mesh.interior_ids
    n = interior.size
    if n < 4 * K:
        raise MeshTooCoarse(f"{n} interior vertices cannot resolve {K} eigenvalues")
    Ki = Kf[interior][:, interior].tocsc()
    Mi = Mf[interior][:, interior].tocsc()
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "sparse"
    if method == "dense":
        vals, vecs = sla.eigh(Ki.toarray(), Mi.toarray(), subset_by_index=[0, K - 1])
    elif method == "sparse":
        v0 = np.ones(n) + 0.1 * np.cos(np.arange(n))
        vals, vecs = spla.eigsh(Ki, k=K, M=Mi, sigma=0.0, which="LM", v0=v0, tol=1e-13)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    else:
        raise ValueError(f"unknown method {method!r}")
    vecs = _m_orthonormalize(vecs, Ki, Mi)
    vals = np.einsum("ik,ik->k", vecs, Ki @ vecs)
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    # fix the sign convention so results do not depend on solver internals
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(K)])
    signs[signs == 0] = 1.0
    vecs = vecs * signs
    gram = vecs.T @ (Mi @ vecs)
    return Spectrum(vals, vecs, gram, Kf, Mf, interior, mesh.n_vertices)


def _m_orthonormalize(vecs, Ki, Mi):
    """Rayleigh-Ritz on span(vecs): diagonalize K in an M-orthonormal basis."""
    G = vecs.T @ (Mi @ vecs)
    L = np.linalg.cholesky(0.5 * (G + G.T))
    Q = sla.solve_triangular(L, vecs.T, lower=True).T
    H = Q.T @ (Ki @ Q)
    _, R = np.linalg.eigh(0.5 * (H + H.T))
    Q = Q @ R
    # one refinement pass for the Gram matrix
    G = Q.T @ (Mi @ Q)
    L = np.linalg.cholesky(0.5 * (G + G.T))
    return sla.solve_triangular(L, Q.T, lower=True).T


def _boundary_mass(mesh: Mesh) -> sp.csc_matrix:
    """P1 mass matrix on the closed boundary polygon."""
    pts = mesh.vertices[mesh.boundary_ids]
    n = pts.shape[0]
    h = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)  # edge i -> i+1
    diag = (h + np.roll(h, 1)) / 3.0
    off = h / 6.0
    i = np.arange(n)
    rows = np.concatenate((i, i, (i + 1) % n))
    cols = np.concatenate((i, (i + 1) % n, i))
    data = np.concatenate((diag, off, off))
    return sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsc()


def _periodic_resample(values: np.ndarray, M: int) -> np.ndarray:
    """Trigonometric interpolation from a uniform periodic grid to M points."""
    n = values.shape[-1]
    if M == n:
        return values.copy()
    coef = np.fft.rfft(values, axis=-1)
    if n % 2 == 0:
        coef[..., -1] *= 0.5
    out = np.zeros(values.shape[:-1] + (M // 2 + 1,), dtype=complex)
    m = min(coef.shape[-1], out.shape[-1])
    out[..., :m] = coef[..., :m]
    return np.fft.irfft(out, n=M, axis=-1) * (M / n)


def normal_trace(mesh: Mesh, spectrum: Spectrum, fields: BoundaryFields | None = None,
                 which=None) -> np.ndarray:
    """Outward normal derivatives of the eigenfunctions on the boundary.

    The boundary flux ``g`` of mode ``u`` solves
    ``int g v dsigma = a(u, v) - lambda m(u, v)`` for every boundary hat
    function ``v``. Nodal values are returned as an array ``(len(which),
    n_theta)`` when ``fields`` is None, otherwise trigonometrically
    interpolated onto the ``fields`` theta grid.
    """
    if spectrum.n_vertices != mesh.n_vertices:
        raise ValueError("spectrum does not belong to this mesh")
    idx = np.arange(spectrum.K) if which is None else np.atleast_1d(which)
    u = spectrum.full_modes()[:, idx]
    lam = spectrum.values[idx]
    bid = mesh.boundary_ids
    residual = (spectrum.stiffness[bid] @ u) - lam * (spectrum.mass[bid] @ u)
    Mb = _boundary_mass(mesh)
    g = spla.splu(Mb).solve(np.ascontiguousarray(residual)).T
    if fields is None:
        return g
    return _periodic_resample(g, fields.M)


def detect_cluster(values, k: int, tau: float = TAU_CLUSTER) -> Cluster:
    """Maximal run of eigenvalues around index ``k`` (1-based) with
    consecutive relative gaps below ``tau``."""
    values = np.asarray(values, dtype=float)
    K = values.size
    if not 1 <= k <= K - 1:
        raise ValueError(f"k={k} needs 1 <= k <= K-1 with K={K}")

    def close(i, j):  # 0-based neighbours
        return (values[j] - values[i]) < tau * abs(values[i])

    lo = k - 1
    while lo > 0 and close(lo - 1, lo):
        lo -= 1
    hi = k - 1
    while hi < K - 1 and close(hi, hi + 1):
        hi += 1
    if hi == K - 1:
        raise ClusterTouchesTop(f"cluster around k={k} reaches the last computed eigenvalue")
    return Cluster(lo + 1, hi + 1)


def write_spectrum_csv(values, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("index,lambda\n")
        for i, v in enumerate(values, start=1):
            fh.write(f"{i},{float(v)!r}\n")


def read_spectrum_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1]
