import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from specshape.geometry import FourierBoundary, boundary_fields, perimeter, perimeter_gradient, rotate, scale
from specshape.optimality import min_norm_hull, positive_dependence, project_simplex
from specshape.shapederiv import cluster_matrix

coef = st.floats(-0.05, 0.05, allow_nan=False)
small = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def boundaries(draw, order=4):
    a = draw(arrays(float, order, elements=coef))
    b = draw(arrays(float, order, elements=coef))
    return FourierBoundary(draw(st.floats(0.5, 2.0)), a, b)


@settings(max_examples=40, deadline=None)
@given(boundaries(), st.floats(0, 2 * np.pi))
def test_perimeter_rotation_invariant(b, alpha):
    assert abs(perimeter(rotate(b, alpha)) - perimeter(b)) < 1e-12 * perimeter(b)


@settings(max_examples=40, deadline=None)
@given(boundaries(), st.floats(0.1, 10.0))
def test_perimeter_homogeneous(b, t):
    assert abs(perimeter(scale(b, t)) - t * perimeter(b)) < 1e-12 * t * perimeter(b)


@settings(max_examples=25, deadline=None)
@given(boundaries(), st.integers(0, 8))
def test_perimeter_gradient_fd(b, i):
    x = b.vector()
    e = np.zeros_like(x)
    e[i] = 1.0
    h = 1e-6
    fd = (perimeter(FourierBoundary.from_vector(x + h * e)) - perimeter(FourierBoundary.from_vector(x - h * e))) / (2 * h)
    g = perimeter_gradient(b)
    assert abs(fd - g[i]) < 1e-6 * np.max(np.abs(g))


@settings(max_examples=25, deadline=None)
@given(boundaries())
def test_fields_invariants(b):
    f = boundary_fields(b, 1024)
    assert np.allclose(np.linalg.norm(f.normals, axis=1), 1.0, atol=1e-12)
    assert abs(f.dsigma.sum() - perimeter(b)) < 1e-10 * perimeter(b)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (3, 64), elements=small), arrays(float, 64, elements=small),
       arrays(float, 64, elements=small), st.floats(-3, 3), st.floats(-3, 3))
def test_cluster_matrix_symmetric_linear(T, v, w, a, b):
    A = cluster_matrix(T, a * v + b * w)
    B = a * cluster_matrix(T, v) + b * cluster_matrix(T, w)
    assert np.array_equal(A, A.T)
    assert np.max(np.abs(A - B)) <= 1e-12 * max(1.0, np.max(np.abs(B)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_dependence_alternatives_exclusive(k, n, seed):
    Z = np.random.default_rng(seed).normal(size=(k, n))
    r = positive_dependence(Z)
    if r.dependent:
        assert r.nu is None and r.gamma.min() >= 0 and abs(r.gamma.sum() - 1) < 1e-12
        assert np.linalg.norm(r.gamma @ Z) < 1e-9 * np.linalg.norm(Z, axis=1).max()
    else:
        assert r.gamma is None and np.max(Z @ r.nu) < 0
        assert np.allclose(r.margins, Z @ r.nu)


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.integers(1, 8), elements=st.floats(-10, 10)))
def test_project_simplex_feasible(v):
    p = project_simplex(v)
    assert p.min() >= 0 and abs(p.sum() - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_min_norm_hull_kkt(k, n, seed):
    G = np.random.default_rng(seed).normal(size=(n, k))
    g = min_norm_hull(G)
    d = G @ g
    assert g.min() >= 0 and abs(g.sum() - 1) < 1e-12
    # every candidate lies beyond the supporting hyperplane through d
    assert np.all(G.T @ d >= d @ d - 1e-9 * max(1.0, np.max(np.abs(G)) ** 2))
