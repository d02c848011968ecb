import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruledsurf import oracle, tensor
from ruledsurf.ambient import SpaceForm
from ruledsurf.curve import curve_from_expressions
from ruledsurf.errors import BoundaryNode, StepFailure

E3 = SpaceForm.euclidean()


def sphere_patch(R):
    def point(U, V):
        U, V = np.broadcast_arrays(np.asarray(U, float), np.asarray(V, float))
        return np.stack([0 * U, R * np.cos(U) * np.cos(V), R * np.sin(U) * np.cos(V), R * np.sin(V)], axis=-1)
    return point


def flat_strip(U, V):
    U, V = np.broadcast_arrays(np.asarray(U, float), np.asarray(V, float))
    return np.stack([0 * U, U + 0.3 * V, V, 0.5 * U], axis=-1)


@pytest.mark.parametrize("R", [1.0, 2.5])
def test_brioschi_round_sphere(R):
    us, vs = np.linspace(0.0, 1.0, 41), np.linspace(-0.5, 0.5, 41)
    grid = oracle.sample_metric_grid(sphere_patch(R), E3.inner, us, vs)
    K = oracle.brioschi_grid(grid)
    assert np.all(np.isnan(K[:2])) and np.all(np.isnan(K[:, -2:]))
    np.testing.assert_allclose(K[2:-2, 2:-2], 1.0 / R ** 2, atol=1e-6)
    assert oracle.brioschi_K_int(grid, (20, 20)) == pytest.approx(K[20, 20], abs=1e-12)


def test_brioschi_flat_strip_and_boundary():
    us, vs = np.linspace(0.0, 1.0, 11), np.linspace(0.0, 1.0, 11)
    grid = oracle.sample_metric_grid(flat_strip, E3.inner, us, vs)
    np.testing.assert_allclose(oracle.brioschi_grid(grid)[2:-2, 2:-2], 0.0, atol=1e-9)
    assert not grid.is_interior(1, 5)
    with pytest.raises(BoundaryNode):
        oracle.brioschi_K_int(grid, (1, 5))
    with pytest.raises(BoundaryNode):
        oracle.brioschi_K_int(grid, (5, 9))


def test_grid_sample_validation():
    z = np.zeros((3, 3))
    with pytest.raises(ValueError):
        oracle.GridSample([0, 1, 3], [0, 1, 2], z, z, z)
    with pytest.raises(ValueError):
        oracle.GridSample([0, 1, 2], [0, -1, -2], z, z, z)
    with pytest.raises(ValueError):
        oracle.GridSample([0, 1, 2], [0, 1, 2], z, z, np.zeros((2, 3)))
    g = oracle.GridSample([0, 1, 2], [0, 0.5, 1], z + 1, z, z + 2)
    assert (g.hu, g.hv) == (1.0, 0.5)
    np.testing.assert_array_equal(g.det, 2.0)


@pytest.mark.parametrize("R", [1.0, 3.0])
def test_fd_forms_round_sphere(R):
    u, v = 0.4, 0.3
    g11, g12, g22, h11, h12, h22 = oracle.fd_fundamental_forms(sphere_patch(R), E3, u, v)
    assert (g11, g12, g22) == pytest.approx((R * R * np.cos(v) ** 2, 0.0, R * R), abs=1e-8)
    # umbilic with principal curvatures +-1/R
    assert abs(h11) == pytest.approx(g11 / R, abs=1e-7)
    assert abs(h22) == pytest.approx(g22 / R, abs=1e-7)
    assert h12 == pytest.approx(0.0, abs=1e-8)
    assert oracle.fd_extrinsic_curvature(sphere_patch(R), E3, u, v) == pytest.approx(1.0 / R ** 2, abs=1e-7)


def _circle(sf, rho):
    return curve_from_expressions(sf, [f"cos({rho})", f"sin({rho})*cos(u)", f"sin({rho})*sin(u)", "0"])


@pytest.mark.parametrize("rho", [0.4, 1.0])
def test_transport_holonomy_around_small_circle(rho):
    # the circle lies in the totally geodesic great 2-sphere x4 = 0, enclosing area 2 pi (1 - cos rho)
    sf = SpaceForm.sphere(1.0)
    c = _circle(sf, rho)
    Z0 = np.array([-np.sin(rho), np.cos(rho), 0.0, 0.0])
    res = oracle.rk4_parallel_transport(c, Z0, 0.0, 2 * np.pi, sf=sf, h=1e-2)
    angle = 2 * np.pi * (1 - np.cos(rho))
    assert sf.inner(res.Z[-1], Z0) == pytest.approx(np.cos(angle), abs=1e-8)
    normal = oracle.rk4_parallel_transport(c, np.array([0.0, 0, 0, 1.0]), 0.0, 2 * np.pi, sf=sf, h=1e-2)
    np.testing.assert_allclose(normal.Z, np.tile([0.0, 0, 0, 1.0], (len(normal.u), 1)), atol=1e-14)


def test_transport_in_euclidean_space_is_constant():
    c = curve_from_expressions(E3, ["0", "cos(u)", "sin(2*u)", "u"])
    Z0 = np.array([0.0, 0.3, 0.4, 0.5])
    res = oracle.rk4_parallel_transport(c, Z0, 0.0, 1.0, sf=E3)
    np.testing.assert_allclose(res.Z, np.tile(Z0, (len(res.u), 1)), atol=1e-15)
    np.testing.assert_allclose(res(0.37), Z0, atol=1e-15)


@settings(max_examples=10)
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.2, 2.0))
def test_transport_is_an_isometry(a, b, u1):
    sf = SpaceForm.hyperbolic(1.0)
    c = curve_from_expressions(sf, ["sqrt(1 + u**2 + sin(u)**2)", "u", "sin(u)", "0"])
    p = c(0.0)
    X = sf.project_tangent(p, np.array([0.0, 1.0, a, 0.2]))
    Y = sf.project_tangent(p, np.array([0.0, b, 0.5, 1.0]))
    rX = oracle.rk4_parallel_transport(c, X, 0.0, u1, sf=sf, h=5e-3)
    rY = oracle.rk4_parallel_transport(c, Y, 0.0, u1, sf=sf, h=5e-3)
    assert sf.inner(rX.Z[-1], rY.Z[-1]) == pytest.approx(sf.inner(X, Y), abs=1e-8)
    assert abs(sf.inner(rX.Z[-1], sf.normal(c(u1)))) < 1e-8


def test_transport_in_chart_along_geodesic():
    m = tensor.sphere3_chart(2.0)
    geo = lambda s: np.array([np.pi / 2, np.pi / 2, s])
    res = oracle.rk4_parallel_transport(geo, np.array([0.0, 0.0, 0.5]), 0.0, 1.0, metric=m, h=1e-2,
                                        drift_tol=1e-6)
    np.testing.assert_allclose(res.Z[-1], [0.0, 0.0, 0.5], atol=1e-7)


def test_transport_errors():
    sf = SpaceForm.sphere(1.0)
    c = _circle(sf, 0.5)
    Z0 = np.array([0.0, 0, 0, 1.0])
    with pytest.raises(ValueError):
        oracle.rk4_parallel_transport(c, Z0, 0.0, 1.0)
    with pytest.raises(ValueError):
        oracle.rk4_parallel_transport(c, Z0, 0.0, 1.0, sf=sf, metric=tensor.flat_chart())
    with pytest.raises(StepFailure):
        oracle.rk4_parallel_transport(c, np.array([-np.sin(0.5), np.cos(0.5), 0, 0]), 0.0, 1.0, sf=sf,
                                      h=0.5, drift_tol=1e-14)
    assert oracle.rk4_parallel_transport(c, Z0, 0.3, 0.3, sf=sf).u.tolist() == [0.3]


def test_backward_transport_returns_increasing_u():
    sf = SpaceForm.sphere(1.0)
    c = _circle(sf, 0.5)
    Z0 = np.array([-np.sin(0.5), np.cos(0.5) * np.cos(1.0), np.cos(0.5) * np.sin(1.0), 0])
    back = oracle.rk4_parallel_transport(c, Z0, 1.0, 0.0, sf=sf)
    assert np.all(np.diff(back.u) > 0)
    np.testing.assert_allclose(back(1.0), Z0, atol=1e-12)


@given(st.floats(0.5, 4.0), st.floats(1e-3, 10.0))
def test_fit_convergence_order(p, c):
    radii = [1e2, 1e3, 1e4]
    assert oracle.fit_convergence_order(radii, [c * r ** -p for r in radii]) == pytest.approx(p, abs=1e-9)


def test_euclidean_limit_suite():
    ref = {"a": np.array([1.0, 2.0]), "b": np.array([0.0])}
    rep = oracle.euclidean_limit_suite(lambda r: {"a": ref["a"] + 3.0 / r ** 2, "b": np.array([1.0 / r])}, ref)
    assert rep.orders["a"] == pytest.approx(2.0)
    assert rep.orders["b"] == pytest.approx(1.0)
    assert not rep.passed
    assert rep.errors["a"][0] == pytest.approx(3e-4)
