import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SPACE_FORMS
from ruledsurf.ambient import (Signature, SpaceForm, basis, covariant_derivative, det4, exp_map, inner,
                               mixed_product, parallel_transport_along_ruling, ternary_product,
                               vector_product)
from ruledsurf.errors import NotOnManifold, NotTangent, NotUnit, UnsupportedModel

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
vec4 = st.lists(finite, min_size=4, max_size=4).map(np.array)


def random_point(sf, rng):
    """A point of sf and an orthonormal pair of tangent vectors there."""
    if sf.is_euclidean:
        p = np.concatenate([[0.0], rng.normal(size=3)])
    else:
        y = rng.normal(size=3) * 0.7
        if sf.kind == "sphere":
            y = y / max(1.0, 1.2 * np.linalg.norm(y))
            p = sf.r * np.concatenate([[np.sqrt(1 - y @ y)], y])
        else:
            p = sf.r * np.concatenate([[np.sqrt(1 + y @ y)], y])
    vs = []
    for _ in range(3):
        w = sf.project_tangent(p, rng.normal(size=4))
        for e in vs:
            w = w - sf.inner(w, e) * e
        vs.append(w / np.sqrt(sf.inner(w, w)))
    return p, vs


def test_inner_examples():
    assert inner(basis(1), basis(1)) == 1.0
    assert inner([1, 2, 3, 4], [4, 3, 2, 1]) == 20.0
    assert inner(basis(1), basis(1), Signature.LORENTZ4) == -1.0
    assert inner([1, 2, 3, 4], [4, 3, 2, 1], Signature.LORENTZ4) == 12.0


def test_ternary_product_pinned_sign():
    # cofactor expansion along the basis row: e1 x e2 x e3 = e4 for both signatures
    np.testing.assert_allclose(ternary_product(basis(1), basis(2), basis(3)), basis(4))
    np.testing.assert_allclose(ternary_product(basis(1), basis(2), basis(3), Signature.LORENTZ4), basis(4))
    np.testing.assert_allclose(ternary_product(basis(2), basis(3), basis(4)), -basis(1))
    np.testing.assert_allclose(ternary_product(basis(2), basis(3), basis(4), Signature.LORENTZ4), basis(1))


@given(vec4, vec4, vec4, vec4, st.sampled_from(list(Signature)))
def test_ternary_product_is_determinant(u, v, w, W, sig):
    lhs = inner(ternary_product(u, v, w, sig), W, sig)
    rhs = np.linalg.det(np.array([u, v, w, W]))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@given(vec4, vec4, vec4, st.sampled_from(list(Signature)))
def test_ternary_product_orthogonal_and_alternating(u, v, w, sig):
    x = ternary_product(u, v, w, sig)
    scale = max(1.0, np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(w)) * 10
    for a in (u, v, w):
        assert abs(inner(x, a, sig)) <= 1e-9 * scale * max(1.0, np.linalg.norm(a))
    np.testing.assert_allclose(ternary_product(v, u, w, sig), -x, atol=1e-9 * scale)


def test_det4_matches_numpy(rng):
    A = rng.normal(size=(20, 4, 4))
    got = det4(A[:, 0], A[:, 1], A[:, 2], A[:, 3])
    np.testing.assert_allclose(got, np.linalg.det(A), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("sf", SPACE_FORMS, ids=str)
def test_model_functions(sf):
    v = np.linspace(-0.7, 0.7, 9)
    C, S = sf.cs(v)
    np.testing.assert_allclose(C ** 2 + sf.K0 * S ** 2, 1.0, atol=1e-14)
    h = 1e-6
    C1, S1 = sf.cs(v + h)
    C0, S0 = sf.cs(v - h)
    np.testing.assert_allclose((S1 - S0) / (2 * h), C, atol=1e-8)
    np.testing.assert_allclose((C1 - C0) / (2 * h), -sf.K0 * S, atol=1e-8)


@pytest.mark.parametrize("sf", SPACE_FORMS, ids=str)
def test_exp_map_geodesic(sf, rng):
    p, (Z, _, _) = random_point(sf, rng)
    vs = np.linspace(-0.8, 0.8, 11)
    pts = exp_map(p, Z, vs, sf)
    assert np.max(sf.quadric_residual(pts)) < 1e-12
    T = parallel_transport_along_ruling(p, Z, vs, sf)
    np.testing.assert_allclose(sf.inner(T, T), 1.0, atol=1e-12)
    # tangent at the image point and equal to d/dv exp
    assert np.max(np.abs(sf.inner(T, sf.normal(pts)))) < 1e-12
    h = 1e-5
    fd = (exp_map(p, Z, vs + h, sf) - exp_map(p, Z, vs - h, sf)) / (2 * h)
    np.testing.assert_allclose(fd, T, atol=1e-8)
    np.testing.assert_allclose(exp_map(p, Z, 0.0, sf), p)


@pytest.mark.parametrize("sf", SPACE_FORMS, ids=str)
def test_vector_product_orthonormal_frame(sf, rng):
    p, (X, Y, W) = random_point(sf, rng)
    N = vector_product(X, Y, p, sf, normalized=True)
    for a in (X, Y):
        assert abs(sf.inner(N, a)) < 1e-12
    assert abs(sf.inner(N, sf.normal(p))) < 1e-12
    assert abs(sf.inner(N, N) - 1.0) < 1e-12
    assert abs(mixed_product(X, Y, N, p, sf) - 1.0) < 1e-12
    # literal form scales with q instead of q/r
    if not sf.is_euclidean:
        np.testing.assert_allclose(vector_product(X, Y, p, sf), sf.r * N, atol=1e-12)


def test_vector_product_checks_inputs():
    sf = SpaceForm.sphere(1.0)
    p = basis(1)
    with pytest.raises(NotOnManifold):
        vector_product(basis(2), basis(3), 2 * p, sf)
    with pytest.raises(NotTangent):
        vector_product(basis(1), basis(3), p, sf)


def test_exp_map_checks_inputs():
    sf = SpaceForm.hyperbolic(1.0)
    p = basis(1)
    with pytest.raises(NotUnit):
        exp_map(p, 2 * basis(2), 0.1, sf)
    with pytest.raises(NotOnManifold):
        exp_map(-p, basis(2), 0.1, sf)


def test_space_form_validation():
    with pytest.raises(UnsupportedModel):
        SpaceForm("torus", 1.0)
    with pytest.raises(ValueError):
        SpaceForm.sphere(-1.0)
    assert SpaceForm.euclidean().K0 == 0.0
    assert SpaceForm.sphere(2.0).K0 == 0.25
    assert SpaceForm.hyperbolic(2.0).K0 == -0.25
    assert str(SpaceForm.sphere(1.0)) == "S3(1)"


@pytest.mark.parametrize("sf", SPACE_FORMS, ids=str)
def test_covariant_derivative_tangent(sf, rng):
    """nabla_{c'} Y along a geodesic is tangent, and vanishes for the geodesic's own velocity."""
    p, (Z, Y0, _) = random_point(sf, rng)

    class Geo:
        def __call__(self, u):
            return exp_map(p, Z, u, sf, check=False)

        def derivative(self, u, k=1):
            return parallel_transport_along_ruling(p, Z, u, sf, check=False)

    c = Geo()
    for u in (0.0, 0.3, -0.5):
        acc = covariant_derivative(c.derivative, c, u, sf)
        assert np.linalg.norm(acc) < 1e-8
    # a transported normal direction (C Y0 is the Jacobi-free parallel field along a geodesic)
    Yf = lambda u: Y0
    D = covariant_derivative(Yf, c, 0.4, sf)
    assert abs(sf.inner(D, sf.normal(c(0.4)))) < 1e-9
