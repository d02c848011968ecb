import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ruledsurf import tensor
from ruledsurf.errors import (DegeneratePlane, FrameNotOrthonormal, InvalidAngle, NotPositiveDefinite,
                              PreconditionViolated)

X0 = np.array([0.7, 1.1, 0.4])


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_christoffel_sphere_chart_closed_form(r):
    chi, th, _ = X0
    G = tensor.christoffel(tensor.sphere3_chart(r), X0)
    want = np.zeros((3, 3, 3))
    want[0, 1, 1] = -np.sin(chi) * np.cos(chi)
    want[0, 2, 2] = -np.sin(chi) * np.cos(chi) * np.sin(th) ** 2
    want[1, 0, 1] = want[1, 1, 0] = 1.0 / np.tan(chi)
    want[1, 2, 2] = -np.sin(th) * np.cos(th)
    want[2, 0, 2] = want[2, 2, 0] = 1.0 / np.tan(chi)
    want[2, 1, 2] = want[2, 2, 1] = 1.0 / np.tan(th)
    np.testing.assert_allclose(G, want, atol=1e-9)


def test_analytic_and_numeric_metric_derivatives_agree():
    m = tensor.h2xr_chart()
    numeric = tensor.ChartMetric(m._g)
    x = np.array([0.3, -0.2, 0.5])
    np.testing.assert_allclose(numeric.dmetric(x), m.dmetric(x), atol=1e-9)


@pytest.mark.parametrize("make,K0", [(lambda: tensor.sphere3_chart(1.0), 1.0),
                                     (lambda: tensor.sphere3_chart(2.0), 0.25),
                                     (lambda: tensor.hyperbolic3_chart(1.0), -1.0),
                                     (lambda: tensor.hyperbolic3_chart(2.0), -0.25),
                                     (tensor.flat_chart, 0.0)])
def test_space_forms_detected(make, K0):
    v = tensor.space_form_check(make(), [X0, np.array([1.2, 0.9, 2.0])])
    assert v.is_space_form
    assert v.K0 == pytest.approx(K0, abs=1e-6)
    assert v.symmetry < 1e-6


@pytest.mark.parametrize("which,KH", [("H2xR", -1.0), ("S2xR", 1.0)])
def test_products_rejected_with_sectional_curvatures(which, KH):
    v = tensor.space_form_check(tensor.PRODUCT_CHARTS[which](), [np.array([0.2, -0.1, 0.3])])
    assert not v.is_space_form
    assert v.K0 is None
    np.testing.assert_allclose(v.sectional[0], [KH, 0.0, 0.0], atol=1e-7)


@given(st.floats(0.3, 2.5), st.floats(0.3, 2.8), st.floats(-3.0, 3.0))
def test_curvature_symmetries_on_sphere_chart(chi, th, ph):
    T = tensor.riemann(tensor.sphere3_chart(1.5), np.array([chi, th, ph]))
    assert max(T.symmetry_residuals().values()) < 1e-6


def test_sectional_curvature_of_coordinate_planes():
    m = tensor.hyperbolic3_chart(2.0)
    for X, Y in ((np.eye(3)[0], np.eye(3)[1]), (np.eye(3)[1], np.eye(3)[2]), (np.array([1.0, 1.0, 0]), np.eye(3)[2])):
        assert tensor.sectional_curvature(m, X0, X, Y) == pytest.approx(-0.25, abs=1e-6)
    with pytest.raises(DegeneratePlane):
        tensor.sectional_curvature(m, X0, np.eye(3)[0], 2 * np.eye(3)[0])


@pytest.mark.parametrize("which", ["H2xR", "S2xR"])
@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 4, 1.2, np.pi / 2])
def test_product_chart_matches_closed_form(which, theta):
    x = np.array([0.2, -0.1, 0.3])
    E = tensor.adapted_frame(which, theta, x)
    R = tensor.riemann(tensor.PRODUCT_CHARTS[which](), x, E).R
    np.testing.assert_allclose(R, tensor.product_tensor(which, tensor.adapted_frame_split(theta)), atol=1e-7)


def test_product_conventions():
    th = 0.4
    split = tensor.adapted_frame_split(th)
    paper = tensor.product_tensor("H2xR", split)
    display = tensor.product_tensor("H2xR", split, convention="display")
    np.testing.assert_array_equal(display, -paper)
    assert display[0, 1, 1, 2] == pytest.approx(0.5 * np.sin(2 * th))
    assert tensor.product_tensor("S2xR", split, convention="display")[0, 1, 1, 2] == pytest.approx(
        -0.5 * np.sin(2 * th))
    with pytest.raises(ValueError):
        tensor.product_curvature("H2xR", *split, split[0], convention="other")
    with pytest.raises(ValueError):
        tensor.adapted_frame("H3", th, np.zeros(3))
    # alternative spellings of the product name
    assert tensor._which("H²×R") == "H2xR"


def test_frame_checks():
    m = tensor.sphere3_chart(1.0)
    with pytest.raises(FrameNotOrthonormal):
        tensor.riemann(m, X0, np.eye(3))
    with pytest.raises(DegeneratePlane):
        tensor.gram_schmidt(m, X0, [np.eye(3)[0], 3 * np.eye(3)[0]])
    bad = tensor.ChartMetric(lambda x: np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(NotPositiveDefinite):
        tensor.christoffel(bad, X0)
    skew = tensor.ChartMetric(lambda x: np.array([[1.0, 0.1, 0], [0, 1.0, 0], [0, 0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        skew.metric(X0)


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_geodesic_integration_follows_great_circle(r):
    m = tensor.sphere3_chart(r)
    x0 = np.array([np.pi / 2, np.pi / 2, 0.0])
    ts = np.linspace(0.1, 1.0, 5)
    got = tensor.integrate_geodesic(m, x0, np.array([0.0, 0.0, 1.0 / r]), ts)
    np.testing.assert_allclose(got[:, 2], ts / r, atol=1e-9)
    np.testing.assert_allclose(got[:, :2], np.pi / 2, atol=1e-9)


def test_embed_round_trip():
    for m in (tensor.sphere3_chart(2.0), tensor.hyperbolic3_chart(2.0), tensor.flat_chart()):
        np.testing.assert_allclose(m.to_chart(m.embed(X0)), X0, atol=1e-12)


def _cylinder_in_flat(u, v):
    return np.array([np.cos(u), np.sin(u), v])


def _round_sphere_patch(u, v):
    return np.array([np.cos(u) * np.cos(v), np.sin(u) * np.cos(v), np.sin(v)])


def test_ruledness_obstruction():
    res = tensor.ruledness_obstruction(tensor.flat_chart(), _cylinder_in_flat, 0.3, 0.2)
    assert res.ruled_here
    assert res.geodesic_residual < 1e-8
    assert abs(res.K_ext) < 1e-9
    with pytest.raises(PreconditionViolated):
        tensor.ruledness_obstruction(tensor.flat_chart(), _round_sphere_patch, 0.3, 0.2)


def test_ruling_jacobi_curvature_flat():
    val, A, res = tensor.ruling_jacobi_curvature(tensor.flat_chart(), _cylinder_in_flat, 0.3, 0.2)
    assert abs(val) < 1e-8 and abs(A) < 1e-8 and res < 1e-8


@pytest.mark.parametrize("which", ["H2xR", "S2xR"])
@pytest.mark.parametrize("theta", [0.2, np.pi / 4, 1.3])
def test_constant_angle_surfaces(which, theta):
    surf = tensor.ConstantAngleSurface(which, theta)
    for u, v in ((0.3, 0.1), (1.1, -0.2)):
        assert surf.normal_angle_residual(u, v) < 1e-8
        vf = tensor.vertical_frame_components(surf.metric, surf, u, v)
        assert vf.theta == pytest.approx(theta, abs=1e-8)
        assert abs(vf.R2113) < 1e-6
        # R_1223 in the vertical frame is the closed-form value at the surface's angle
        want = tensor.product_tensor(which, tensor.adapted_frame_split(theta))[0, 1, 1, 2]
        assert vf.R1223 == pytest.approx(want, abs=1e-6)
    assert surf.ruling_geodesic_deviation(0.5) < 1e-7


def test_constant_angle_rejects_bad_angle():
    with pytest.raises(InvalidAngle):
        tensor.ConstantAngleSurface("H2xR", 2.0)
    with pytest.raises(InvalidAngle):
        tensor.constant_angle_surface("S2xR", -0.1)
