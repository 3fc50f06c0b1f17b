import numpy as np
import pytest

from specshape.errors import NonStarShaped
from specshape.geometry import FourierBoundary
from specshape.mesh import build_mesh, radial_velocity, read_mesh, write_mesh

from conftest import random_boundary


def test_counts_unit_circle():
    m = build_mesh(FourierBoundary.circle(), 20, 40)
    assert m.n_vertices == 801
    assert m.triangles.shape == (1560, 3)


def test_euler_relation_and_orientation():
    m = build_mesh(random_boundary(np.random.default_rng(2), amp=0.08), 12, 32)
    V, E, T = m.n_vertices, m.edges().shape[0], m.triangles.shape[0]
    assert V - E + T == 1
    assert np.all(m.signed_areas() > 0)


def test_boundary_on_curve():
    b = FourierBoundary(1.0, [0.0, 0.1], [0.0, 0.0])
    m = build_mesh(b, 10, 40)
    r = np.hypot(*m.vertices[m.boundary_ids].T)
    assert np.max(np.abs(r - b.radius(m.boundary_thetas))) < 1e-12
    assert np.all(np.diff(m.boundary_thetas) > 0)


def test_argument_checks():
    with pytest.raises(ValueError):
        build_mesh(FourierBoundary.circle(), 1, 40)
    with pytest.raises(ValueError):
        build_mesh(FourierBoundary.circle(), 10, 7)
    with pytest.raises(ValueError):
        build_mesh(FourierBoundary.circle(), 10, 41)
    with pytest.raises(NonStarShaped):
        build_mesh(FourierBoundary(0.5, [0.6], [0.0]), 10, 40)


def test_mesh_size_trend():
    hs = []
    ns = [10, 20, 40]
    for n in ns:
        hs.append(build_mesh(FourierBoundary.circle(), n, 2 * n).max_edge_length())
    for n, h in zip(ns, hs):
        ratio = h / (hs[0] * ns[0] / n)
        assert 0.4 <= ratio <= 2.5


def test_deterministic():
    b = random_boundary(np.random.default_rng(4))
    m1, m2 = build_mesh(b, 15, 30), build_mesh(b, 15, 30)
    assert m1.vertices.tobytes() == m2.vertices.tobytes()
    assert m1.triangles.tobytes() == m2.triangles.tobytes()


def test_radial_velocity_matches_mesh_motion():
    b = random_boundary(np.random.default_rng(6))
    d = np.random.default_rng(7).normal(size=24)
    eps = 1e-6
    m0 = build_mesh(b, 6, 24)
    vel = radial_velocity(m0, d)
    # moving the boundary by eps * d at the sector angles moves vertices by eps * vel
    th = m0.boundary_thetas

    class Moved:
        def radius(self, t):
            out = b.radius(t)
            return out + eps * np.interp(t, th, d, period=2 * np.pi)

        def check(self):
            return self

    m1 = build_mesh(Moved(), 6, 24)
    assert np.allclose((m1.vertices - m0.vertices) / eps, vel, atol=1e-6)


def test_mesh_dump_roundtrip(tmp_path):
    m = build_mesh(FourierBoundary.circle(), 4, 8)
    write_mesh(m, tmp_path / "mesh.txt")
    v, t = read_mesh(tmp_path / "mesh.txt")
    assert np.array_equal(v, m.vertices) and np.array_equal(t, m.triangles)
    first = (tmp_path / "mesh.txt").read_text().splitlines()[0].split()
    assert len(first) == 2
