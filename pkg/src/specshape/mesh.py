"""Structured polar triangulation of star-shaped domains."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import uniform_thetas

__all__ = ["Mesh", "build_mesh", "radial_velocity", "write_mesh", "read_mesh"]


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray        # (V, 2)
    triangles: np.ndarray       # (T, 3), counterclockwise
    boundary_ids: np.ndarray    # boundary vertices in increasing theta order
    boundary_thetas: np.ndarray
    n_r: int
    n_theta: int
    ring_fraction: np.ndarray   # i / n_r per vertex, 0 at the center
    vertex_thetas: np.ndarray   # sector angle per vertex, 0 at the center

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def interior_ids(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary_ids] = False
        return np.flatnonzero(mask)

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted index pairs."""
        t = self.triangles
        e = np.vstack((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]))
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def max_edge_length(self) -> float:
        e = self.edges()
        return float(np.max(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))


def build_mesh(boundary, n_r: int, n_theta: int) -> Mesh:
    """Center vertex plus ``n_r`` rings of ``n_theta`` vertices at ``(i/n_r) rho(theta_j)``.

    Every quadrilateral cell between consecutive rings is split along the
    same diagonal, so the mesh commutes with rotations by ``2 pi / n_theta``.
    ``boundary`` is anything exposing ``radius(thetas)`` and ``check()``.
    """
    if n_r < 2:
        raise ValueError("n_r must be at least 2")
    if n_theta < 8 or n_theta % 2:
        raise ValueError("n_theta must be even and at least 8")
    boundary.check()
    thetas = uniform_thetas(n_theta)
    rho = boundary.radius(thetas)
    frac = np.arange(1, n_r + 1) / n_r
    r = frac[:, None] * rho[None, :]
    ring_pts = np.stack((r * np.cos(thetas), r * np.sin(thetas)), axis=-1).reshape(-1, 2)
    # the last ring must sit on the curve exactly
    ring_pts[-n_theta:] = np.column_stack((rho * np.cos(thetas), rho * np.sin(thetas)))
    vertices = np.vstack((np.zeros((1, 2)), ring_pts))

    j = np.arange(n_theta)
    jn = (j + 1) % n_theta

    def vid(i, jj):
        return 1 + (i - 1) * n_theta + jj

    tris = [np.column_stack((np.zeros(n_theta, dtype=int), vid(1, j), vid(1, jn)))]
    for i in range(1, n_r):
        a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, jn), vid(i, jn)
        tris.append(np.column_stack((a, b, c)))
        tris.append(np.column_stack((a, c, d)))
    triangles = np.vstack(tris).astype(np.int64)
    boundary_ids = vid(n_r, j).astype(np.int64)
    ring_fraction = np.concatenate(([0.0], np.repeat(frac, n_theta)))
    vertex_thetas = np.concatenate(([0.0], np.tile(thetas, n_r)))
    return Mesh(vertices, triangles, boundary_ids, thetas, n_r, n_theta,
                ring_fraction, vertex_thetas)


def radial_velocity(mesh: Mesh, d_rho_at_sectors) -> np.ndarray:
    """Vertex velocities induced by a radial boundary displacement.

    ``d_rho_at_sectors`` has shape ``(..., n_theta)``; the result has shape
    ``(..., n_vertices, 2)``. Vertices move along their ray in proportion to
    their ring fraction, matching how :func:`build_mesh` places them.
    """
    d = np.asarray(d_rho_at_sectors, dtype=float)
    sector = np.concatenate(([0], np.tile(np.arange(mesh.n_theta), mesh.n_r)))
    mag = d[..., sector] * mesh.ring_fraction
    return np.stack((mag * np.cos(mesh.vertex_thetas), mag * np.sin(mesh.vertex_thetas)), axis=-1)


def write_mesh(mesh: Mesh, path) -> None:
    """Dump vertices (``x y``) then triangles (``i j k``, 0-based)."""
    with open(path, "w", newline="\n") as fh:
        for x, y in mesh.vertices:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"{i} {j} {k}\n")


def read_mesh(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a dump written by :func:`write_mesh`; returns (vertices, triangles)."""
    verts, tris = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if any(("." in p) or ("e" in p.lower()) for p in parts):
                verts.append([float(p) for p in parts])
            else:
                tris.append([int(p) for p in parts])
    return np.array(verts), np.array(tris, dtype=np.int64)
