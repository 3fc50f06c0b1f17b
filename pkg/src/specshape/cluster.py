"""Perturbations that split a degenerate eigenvalue, and the gap check at optima.

A signature field is a sum of narrow cosine bumps placed at boundary points
whose trace vectors are linearly independent. As the bumps shrink, the
cluster matrix tends to ``-sum_p k_p rho_p psi_p psi_p^T``, so the signs of
the magnitudes ``k_p`` fix the signature of the matrix; the magnitudes are
balanced so that the perimeter is stationary.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolver import TAU_CLUSTER
from .errors import SignatureFailed
from .geometry import BoundaryFields
from .optimality import select_points
from .shapederiv import cluster_matrix, vn_measure

__all__ = ["SignatureField", "signature_field", "GapReport", "verify_gap", "EPS_PER"]

EPS_PER = 1e-8


def _wrap(x):
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def bump(thetas, center: float, delta: float) -> np.ndarray:
    """C^1 cosine taper of half-width ``delta`` centred at ``center``, peak 1."""
    s = _wrap(np.asarray(thetas, dtype=float) - center)
    out = 0.5 * (1.0 + np.cos(np.pi * s / delta))
    out[np.abs(s) >= delta] = 0.0
    return out


@dataclass(frozen=True)
class SignatureField:
    centers: np.ndarray       # bump centres (radians)
    point_ids: np.ndarray     # their indices on the boundary-field grid
    delta: float
    magnitudes: np.ndarray
    direction: np.ndarray     # d_rho on the boundary-field grid
    cluster_eigs: np.ndarray  # ascending eigenvalues of the cluster matrix
    achieved_signs: np.ndarray
    per_rate: float
    field_norm: float
    retries: int = 0
    fields_M: int = field(default=0, repr=False)

    def __call__(self, thetas) -> np.ndarray:
        """Evaluate ``d_rho`` at arbitrary angles (for remeshing)."""
        thetas = np.asarray(thetas, dtype=float)
        out = np.zeros_like(thetas)
        for c, k in zip(self.centers, self.magnitudes):
            out += k * bump(thetas, c, self.delta)
        return out / self.delta


def signature_field(traces, fields: BoundaryFields, ell: int, delta: float = 0.4,
                    max_retries: int = 10, margin: float = 1e-6) -> SignatureField:
    """Radial field giving ``ell`` negative and ``m - ell`` positive cluster rates.

    The first ``ell`` bumps push outward with magnitude 1; the others push
    inward with the common magnitude that makes ``int kappa V.n dsigma``
    vanish. ``delta`` is halved until the signature is achieved.
    """
    T = np.atleast_2d(np.asarray(traces, dtype=float))
    m = T.shape[0]
    if not 1 <= ell <= m - 1:
        raise ValueError(f"ell must lie in 1..{m - 1}, got {ell}")
    ids = select_points(T, fields.curvature, fields.dsigma)
    centers = fields.thetas[ids]
    if m > 1:
        c_sorted = np.sort(centers)
        gaps = np.diff(np.concatenate((c_sorted, [c_sorted[0] + 2.0 * np.pi])))
        delta = min(delta, 0.49 * float(gaps.min()))
    # a bump must cover several grid points to be integrated sensibly
    min_delta = 4.0 * fields.dtheta
    weight = fields.curvature * fields.rho * fields.dtheta
    for attempt in range(max_retries + 1):
        if delta < min_delta:
            break
        bumps = np.array([bump(fields.thetas, c, delta) for c in centers]) / delta
        integrals = bumps @ weight
        mags = np.empty(m)
        mags[:ell] = 1.0
        mags[ell:] = -integrals[:ell].sum() / integrals[ell:].sum()
        d_rho = mags @ bumps
        per_rate = float(np.sum(d_rho * weight))
        norm = float(np.sqrt(np.sum(d_rho ** 2) * fields.dtheta))
        A = cluster_matrix(T, vn_measure(fields, d_rho))
        eigs = np.linalg.eigvalsh(A)
        tol = margin * float(np.abs(eigs).max())
        signs = np.where(eigs < -tol, -1, np.where(eigs > tol, 1, 0))
        ok_signs = np.sum(signs == -1) == ell and np.sum(signs == 1) == m - ell
        if ok_signs and abs(per_rate) < EPS_PER * norm:
            return SignatureField(centers, ids, delta, mags, d_rho, eigs, signs,
                                  per_rate, norm, attempt, fields.M)
        delta *= 0.5
    raise SignatureFailed(f"no signature ({ell} negative, {m - ell} positive) after {max_retries} retries")


@dataclass(frozen=True)
class GapReport:
    gap_ok: bool
    lambda_k: float
    lambda_next: float
    rel_gap: float


def verify_gap(values, k: int, tau: float = TAU_CLUSTER) -> GapReport:
    """Check that ``lambda_k < lambda_{k+1}`` by at least ``tau`` relatively."""
    values = np.asarray(values, dtype=float)
    if values.size < k + 1:
        raise ValueError("spectrum must resolve index k+1")
    lk, ln = float(values[k - 1]), float(values[k])
    rel = (ln - lk) / lk
    return GapReport(bool(rel >= tau), lk, ln, rel)
