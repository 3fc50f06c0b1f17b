import numpy as np
import pytest

from specshape.bessel import disk_reference
from specshape.eigensolver import (Cluster, detect_cluster, normal_trace, read_spectrum_csv,
                                   solve_spectrum, write_spectrum_csv)
from specshape.errors import ClusterTouchesTop, MeshTooCoarse
from specshape.geometry import FourierBoundary, boundary_fields, rotate, scale
from specshape.mesh import build_mesh

from conftest import J01, J11, random_boundary


def test_disk_eigenvalues(disk_k1):
    ref = disk_reference(5).eigenvalues
    vals = disk_k1.spectrum.values[:5]
    assert np.all(np.abs(vals - ref) / ref < 1e-2)
    assert (vals[2] - vals[1]) / vals[1] < 1e-3
    assert (vals[4] - vals[3]) / vals[3] < 1e-3


def test_mass_orthonormal(disk_k1):
    g = disk_k1.spectrum.mass_norms
    assert np.max(np.abs(g - np.eye(g.shape[0]))) < 1e-10
    b = random_boundary(np.random.default_rng(1))
    s = solve_spectrum(build_mesh(b, 20, 40), 6)
    assert np.max(np.abs(s.mass_norms - np.eye(6))) < 1e-10
    assert np.all(np.diff(s.values) >= 0) and s.values[0] > 0


def test_dense_and_sparse_agree():
    mesh = build_mesh(random_boundary(np.random.default_rng(2)), 16, 32)
    d = solve_spectrum(mesh, 5, method="dense").values
    s = solve_spectrum(mesh, 5, method="sparse").values
    assert np.allclose(d, s, rtol=1e-10)
    with pytest.raises(ValueError):
        solve_spectrum(mesh, 5, method="magic")


def test_quadratic_convergence():
    errs = []
    for n in (20, 40):
        lam = solve_spectrum(build_mesh(FourierBoundary.circle(), n, 2 * n), 1).values[0]
        errs.append(abs(lam - J01 ** 2))
    assert 3.0 <= errs[0] / errs[1] <= 5.0


def test_homothety():
    b = random_boundary(np.random.default_rng(3))
    l1 = solve_spectrum(build_mesh(b, 20, 40), 4).values
    l3 = solve_spectrum(build_mesh(scale(b, 3.0), 20, 40), 4).values
    assert np.allclose(l3 * 9.0, l1, rtol=5e-3)


def test_rotation_invariance_on_mesh_grid():
    b = random_boundary(np.random.default_rng(4))
    n_theta = 40
    l0 = solve_spectrum(build_mesh(b, 20, n_theta), 4).values
    l1 = solve_spectrum(build_mesh(rotate(b, 2 * np.pi * 7 / n_theta), 20, n_theta), 4).values
    assert np.allclose(l0, l1, rtol=1e-8)


def test_mesh_too_coarse():
    mesh = build_mesh(FourierBoundary.circle(), 2, 8)   # 9 interior vertices
    solve_spectrum(mesh, 2)
    with pytest.raises(MeshTooCoarse):
        solve_spectrum(mesh, 3)
    with pytest.raises(ValueError):
        solve_spectrum(mesh, 0)


def test_disk_first_trace(disk_k1):
    t = disk_k1.traces[0]
    expect = J01 / np.sqrt(np.pi)
    assert np.max(np.abs(np.abs(t) - expect)) < 1e-2 * expect
    f = disk_k1.fields
    assert f.l2_norm(np.abs(t) - expect) < 1e-2 * f.l2_norm(np.full(f.M, expect))


def test_disk_cluster_trace_sum(disk_k2):
    T = disk_k2.cluster_traces()
    s = T[0] ** 2 + T[1] ** 2
    # the pair of order-one modes: sum of squared traces is 2 j11^2 / pi
    expect = 2 * J11 ** 2 / np.pi
    assert np.max(np.abs(s - expect)) < 2e-2 * expect


def test_rellich_identity():
    rng = np.random.default_rng(5)
    for b in (FourierBoundary.circle(), random_boundary(rng, amp=0.03)):
        mesh = build_mesh(b, 40, 80)
        spec = solve_spectrum(mesh, 3)
        f = boundary_fields(b, 256)
        t = normal_trace(mesh, spec, f)
        xn = np.einsum("ij,ij->i", f.points, f.normals)
        for i in range(3):
            val = np.sum(t[i] ** 2 * xn * f.dsigma)
            assert abs(val - 2 * spec.values[i]) < 2e-2 * 2 * spec.values[i]


def test_zero_mode_gives_zero_trace(disk_k1):
    from dataclasses import replace
    s = disk_k1.spectrum
    zero = replace(s, modes=np.zeros_like(s.modes))
    assert np.all(normal_trace(disk_k1.mesh, zero) == 0.0)


def test_trace_shape_and_mismatch(disk_k1):
    g = normal_trace(disk_k1.mesh, disk_k1.spectrum, which=[0, 1])
    assert g.shape == (2, 80)
    other = build_mesh(FourierBoundary.circle(), 10, 20)
    with pytest.raises(ValueError):
        normal_trace(other, disk_k1.spectrum)


def test_detect_cluster_examples():
    vals = [5.78, 14.68, 14.68, 26.37]
    assert detect_cluster(vals, 2) == Cluster(2, 3)
    assert detect_cluster(vals, 1) == Cluster(1, 1)
    assert detect_cluster(vals, 3) == Cluster(2, 3)
    assert detect_cluster(vals, 3).m == 2
    assert list(detect_cluster(vals, 3).indices) == [1, 2]
    with pytest.raises(ClusterTouchesTop):
        detect_cluster([1.0, 2.0, 2.0], 2)
    with pytest.raises(ValueError):
        detect_cluster(vals, 4)


def test_spectrum_csv_roundtrip(tmp_path, disk_k1):
    path = tmp_path / "spectrum.csv"
    write_spectrum_csv(disk_k1.spectrum.values, path)
    raw = path.read_bytes()
    assert raw.startswith(b"index,lambda\n") and b"\r" not in raw
    assert np.array_equal(read_spectrum_csv(path), disk_k1.spectrum.values)
