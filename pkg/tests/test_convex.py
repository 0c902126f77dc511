import numpy as np
import pytest

from signedud import (
    ConvexTarget,
    ValidationError,
    barycentric_coordinates,
    cesaro_approximate,
    cesaro_error_trace,
    c_constant,
    cesaro_limit_stream,
    make_plan,
    simplex_combination,
)


def test_singleton_is_exact():
    ct = ConvexTarget.from_combination([[0.3, -0.2]], [1.0])
    pts, err = cesaro_approximate(ct, 5)
    assert err == 0.0 and np.all(pts == [0.3, -0.2])


def test_two_vertices():
    ct = ConvexTarget.from_combination([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5])
    pts, err = cesaro_approximate(ct, 2)
    assert np.array_equal(pts.mean(axis=0), [0.5, 0.5]) and err == 0.0
    assert ct.bound(2) == 2.0


def test_bound_holds_for_random_simplices():
    rng = np.random.default_rng(8)
    for _ in range(25):
        d, m = int(rng.integers(1, 17)), int(rng.integers(1, 11))
        ct = ConvexTarget.from_combination(rng.normal(size=(m, d)), rng.dirichlet(np.ones(m)))
        tr = cesaro_error_trace(ct, 2048)
        assert np.all(tr <= ct.bound(np.arange(1, 2049)) + 1e-12)


def test_trace_matches_recomputed_means():
    rng = np.random.default_rng(2)
    ct = ConvexTarget.from_combination(rng.normal(size=(4, 3)), [0.4, 0.3, 0.2, 0.1])
    pts, err = cesaro_approximate(ct, 97)
    assert cesaro_error_trace(ct, 97)[-1] == pytest.approx(err, abs=1e-15)
    assert err == pytest.approx(np.linalg.norm(pts.mean(axis=0) - ct.target), abs=1e-15)


def test_scaling_is_equivariant():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(5, 2))
    w = rng.dirichlet(np.ones(5))
    a = cesaro_error_trace(ConvexTarget.from_combination(pts, w), 500)
    b = cesaro_error_trace(ConvexTarget.from_combination(4.0 * pts, w), 500)
    assert np.allclose(b, 4.0 * a, atol=1e-12)


def test_barycentric():
    tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    assert np.allclose(barycentric_coordinates([1 / 3, 1 / 3], tri), [1 / 3] * 3)
    assert np.allclose(barycentric_coordinates([0.25, 0.25], tri), [0.5, 0.25, 0.25])
    vert = simplex_combination([1.0, 0.0], tri)
    assert vert.m == 1 and np.array_equal(vert.points[0], [1.0, 0.0])
    with pytest.raises(ValidationError):
        simplex_combination([1.0, 1.0], tri)
    with pytest.raises(ValidationError):
        barycentric_coordinates([0.0, 0.0], [[0, 0], [1, 1], [2, 2]])


def test_limit_stream_converges_to_vertex():
    v1, v2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])

    def combo(j):
        return ConvexTarget.from_combination([v1, v2], [1 - 2.0**-j, 2.0**-j])

    (n1, e1), (n2, e2) = cesaro_limit_stream(combo, [1000, 100000], v1)
    assert e2 < e1 and e2 < 0.05


def test_constant_combos_reduce_to_single_target():
    ct = ConvexTarget.from_combination([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [0.5, 0.25, 0.25])
    offsets = np.cumsum(make_plan([c_constant(3)] * 30, 29).lengths)
    for N, err in cesaro_limit_stream(lambda j: ct, [1, 5, 50, 500], ct.target):
        blocks = int(np.searchsorted(offsets, N)) + 1  # each block restarts the greedy sequence
        assert err <= blocks * ct.bound(N) + 1e-12


def test_invalid_targets():
    with pytest.raises(ValidationError):
        ConvexTarget([[0.0, 1.0]], [0.5], [0.0, 0.5], 1.0)
    with pytest.raises(ValidationError):
        ConvexTarget([[0.0, 2.0]], [1.0], [0.0, 2.0], 1.0)
