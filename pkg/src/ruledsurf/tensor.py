"""Chart-based curvature engine for Riemannian 3-manifolds.

Sign convention: R(X,Y)W = nabla_Y nabla_X W - nabla_X nabla_Y W + nabla_[X,Y] W,
the negative of the usual do Carmo/Lee operator, and
R_ijkl = <R(e_i, e_j) e_k, e_l>. With it a space form of curvature K0 has
R_ijkl = K0 (g_ik g_jl - g_il g_jk) and the sectional curvature of span{X, Y}
is R(X, Y, X, Y) / (|X|^2 |Y|^2 - <X, Y>^2).

Derivatives are 5-point central differences (step 1e-3) unless the chart
supplies analytic metric partials: g -> Christoffel symbols -> Riemann.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import (DegeneratePlane, FrameNotOrthonormal, InvalidAngle,
                     NotPositiveDefinite, PreconditionViolated)

FD_STEP = 1e-3
ORTHO_TOL = 1e-8


def _d5(f, x, k, h=FD_STEP):
    """5-point central derivative of f along coordinate k at x."""
    e = np.zeros(3)
    e[k] = h
    return (f(x - 2 * e) - 8 * f(x - e) + 8 * f(x + e) - f(x + 2 * e)) / (12 * h)


class ChartMetric:
    """A metric g(x) on an open set of R^3 with optional analytic partials.

    ``dg(x)`` if given returns d[k, i, j] = dg_ij/dx^k.
    """

    def __init__(self, g, dg=None, name="chart", embed=None, to_chart=None, K0=None,
                 vertical=None):
        self._g = g
        self._dg = dg
        self.name = name
        self.embed = embed
        self.to_chart = to_chart
        self.K0 = K0
        self.vertical = vertical  # index of the R factor for product charts

    def metric(self, x, check=True):
        G = np.asarray(self._g(np.asarray(x, dtype=float)), dtype=float)
        if check:
            if not np.allclose(G, G.T, rtol=1e-12, atol=1e-14):
                raise NotPositiveDefinite(f"{self.name}: metric not symmetric at {x}")
            try:
                np.linalg.cholesky(G)
            except np.linalg.LinAlgError:
                raise NotPositiveDefinite(f"{self.name}: metric not positive definite at {x}") from None
        return G

    def dmetric(self, x):
        x = np.asarray(x, dtype=float)
        if self._dg is not None:
            return np.asarray(self._dg(x), dtype=float)
        g = lambda y: self.metric(y, check=False)
        return np.stack([_d5(g, x, k) for k in range(3)])

    def inner(self, x, X, Y):
        return float(np.asarray(X) @ self.metric(x, check=False) @ np.asarray(Y))

    def norm(self, x, X):
        return np.sqrt(self.inner(x, X, X))


def christoffel(metric, x):
    """Gamma[k, i, j] = Gamma^k_ij of the Levi-Civita connection."""
    x = np.asarray(x, dtype=float)
    metric.metric(x)
    return _christoffel_unchecked(metric, x)


def _christoffel_unchecked(metric, x):
    G = metric.metric(x, check=False)
    dg = metric.dmetric(x)  # dg[l, i, j] = d_l g_ij
    # first kind: [ij, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0)))
    return np.einsum("kl,ijl->kij", np.linalg.inv(G), first)


def riemann_coords(metric, x):
    """R[i, j, k, l] = <R(d_i, d_j) d_k, d_l> in the coordinate basis (this module's sign)."""
    x = np.asarray(x, dtype=float)
    G = metric.metric(x)
    Gam = _christoffel_unchecked(metric, x)
    dGam = np.stack([_d5(lambda y: _christoffel_unchecked(metric, y), x, m) for m in range(3)])
    # standard R^l_{kij} = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_im Gam^m_jk - Gam^l_jm Gam^m_ik
    Rstd = (np.einsum("iljk->lkij", dGam) - np.einsum("jlik->lkij", dGam)
            + np.einsum("lim,mjk->lkij", Gam, Gam) - np.einsum("ljm,mik->lkij", Gam, Gam))
    down = np.einsum("lm,mkij->ijkl", G, Rstd)
    return -down


@dataclass
class CurvatureTensorAt:
    point: np.ndarray
    R: np.ndarray  # frame components R[a, b, c, d]
    frame: np.ndarray  # rows are the frame vectors in chart components
    R_coord: np.ndarray = field(repr=False, default=None)

    def symmetry_residuals(self):
        R = self.R
        bianchi = R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
        return {
            "antisym_ij": float(np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3))))),
            "antisym_kl": float(np.max(np.abs(R + np.transpose(R, (0, 1, 3, 2))))),
            "pair": float(np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1))))),
            "bianchi": float(np.max(np.abs(bianchi))),
        }


def gram_schmidt(metric, x, vectors):
    G = metric.metric(x, check=False)
    out = []
    for v in vectors:
        w = np.array(v, dtype=float)
        n0 = np.sqrt(max(w @ G @ w, 0.0))
        for e in out:
            w = w - (e @ G @ w) * e
        n = np.sqrt(max(w @ G @ w, 0.0))
        if n < 1e-8 * n0 or n0 == 0.0:
            raise DegeneratePlane("vectors are linearly dependent")
        out.append(w / n)
    return np.array(out)


def check_orthonormal(metric, x, frame, tol=ORTHO_TOL):
    G = metric.metric(x, check=False)
    E = np.asarray(frame, dtype=float)
    err = np.max(np.abs(E @ G @ E.T - np.eye(len(E))))
    if err > tol:
        raise FrameNotOrthonormal(f"frame fails orthonormality by {err:.3e}")
    return err


def riemann(metric, x, frame=None):
    """Frame components R_abcd = <R(e_a, e_b) e_c, e_d> at x.

    Without a frame, Gram-Schmidt on the coordinate basis is used.
    """
    x = np.asarray(x, dtype=float)
    metric.metric(x)
    if frame is None:
        frame = gram_schmidt(metric, x, np.eye(3))
    E = np.asarray(frame, dtype=float)
    check_orthonormal(metric, x, E)
    Rc = riemann_coords(metric, x)
    R = np.einsum("ijkl,ai,bj,ck,dl->abcd", Rc, E, E, E, E)
    return CurvatureTensorAt(x, R, E, Rc)


def sectional_curvature(metric, x, X, Y, Rc=None):
    """K(X, Y) = R(X, Y, X, Y) / (|X|^2 |Y|^2 - <X, Y>^2)."""
    x = np.asarray(x, dtype=float)
    G = metric.metric(x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    xx, yy, xy = X @ G @ X, Y @ G @ Y, X @ G @ Y
    den = xx * yy - xy * xy
    if den <= 1e-12 * xx * yy:
        raise DegeneratePlane("X and Y do not span a plane")
    if Rc is None:
        Rc = riemann_coords(metric, x)
    return float(np.einsum("ijkl,i,j,k,l->", Rc, X, Y, X, Y) / den)


# ---------------------------------------------------------------------------
# charts


def flat_chart():
    return ChartMetric(lambda x: np.eye(3), lambda x: np.zeros((3, 3, 3)), name="R3",
                       embed=lambda x: np.concatenate([[0.0], x]), to_chart=lambda p: np.asarray(p)[1:],
                       K0=0.0)


def sphere3_chart(r=1.0):
    """Hyperspherical coordinates (chi, theta, phi) on S^3(r)."""
    r = float(r)

    def g(x):
        s = np.sin(x[0])
        return r * r * np.diag([1.0, s * s, s * s * np.sin(x[1]) ** 2])

    def embed(x):
        c, t, p = x
        return r * np.array([np.cos(c), np.sin(c) * np.cos(t), np.sin(c) * np.sin(t) * np.cos(p),
                             np.sin(c) * np.sin(t) * np.sin(p)])

    def to_chart(q):
        y = np.asarray(q, dtype=float) / r
        chi = np.arccos(np.clip(y[0], -1.0, 1.0))
        theta = np.arctan2(np.hypot(y[2], y[3]), y[1])
        phi = np.arctan2(y[3], y[2])
        return np.array([chi, theta, phi])

    return ChartMetric(g, name=f"S3({r:g})", embed=embed, to_chart=to_chart, K0=1.0 / r ** 2)


def hyperbolic3_chart(r=1.0):
    """Geodesic polar coordinates (chi, theta, phi) on H^3(r)."""
    r = float(r)

    def g(x):
        s = np.sinh(x[0])
        return r * r * np.diag([1.0, s * s, s * s * np.sin(x[1]) ** 2])

    def embed(x):
        c, t, p = x
        return r * np.array([np.cosh(c), np.sinh(c) * np.cos(t), np.sinh(c) * np.sin(t) * np.cos(p),
                             np.sinh(c) * np.sin(t) * np.sin(p)])

    def to_chart(q):
        y = np.asarray(q, dtype=float) / r
        chi = np.arccosh(max(y[0], 1.0))
        theta = np.arctan2(np.hypot(y[2], y[3]), y[1])
        phi = np.arctan2(y[3], y[2])
        return np.array([chi, theta, phi])

    return ChartMetric(g, name=f"H3({r:g})", embed=embed, to_chart=to_chart, K0=-1.0 / r ** 2)


def h2xr_chart():
    """Poincare disk (x, y) times the line t: 4(dx^2 + dy^2)/(1 - x^2 - y^2)^2 + dt^2."""

    def g(x):
        lam = 4.0 / (1.0 - x[0] ** 2 - x[1] ** 2) ** 2
        return np.diag([lam, lam, 1.0])

    def dg(x):
        w = 1.0 - x[0] ** 2 - x[1] ** 2
        out = np.zeros((3, 3, 3))
        for k in range(2):
            d = 16.0 * x[k] / w ** 3
            out[k, 0, 0] = out[k, 1, 1] = d
        return out

    return ChartMetric(g, dg, name="H2xR", vertical=2)


def s2xr_chart():
    """Stereographic S^2 (x, y) times the line t: 4(dx^2 + dy^2)/(1 + x^2 + y^2)^2 + dt^2."""

    def g(x):
        lam = 4.0 / (1.0 + x[0] ** 2 + x[1] ** 2) ** 2
        return np.diag([lam, lam, 1.0])

    def dg(x):
        w = 1.0 + x[0] ** 2 + x[1] ** 2
        out = np.zeros((3, 3, 3))
        for k in range(2):
            d = -16.0 * x[k] / w ** 3
            out[k, 0, 0] = out[k, 1, 1] = d
        return out

    return ChartMetric(g, dg, name="S2xR", vertical=2)


PRODUCT_CHARTS = {"H2xR": h2xr_chart, "S2xR": s2xr_chart}
_KH = {"H2xR": -1.0, "S2xR": 1.0}


def _which(which):
    key = {"h2xr": "H2xR", "s2xr": "S2xR"}.get(str(which).lower().replace("²", "2").replace("×", "x"))
    if key is None:
        raise ValueError(f"unknown product manifold {which!r}")
    return key


# ---------------------------------------------------------------------------
# product manifolds


def product_curvature(which, X, Y, Z, W, gH=None, convention="paper"):
    """Curvature tensor of H^2 x R or S^2 x R on vectors split as (h1, h2, t).

    ``convention="paper"`` matches ``riemann()``:
        R(X,Y,Z,W) = K_H [g_H(X,Z) g_H(Y,W) - g_H(X,W) g_H(Y,Z)], K_H = -1 or +1.
    ``convention="display"`` is the opposite-sign arrangement, in which the
    H^2 x R tensor reads g_H(X,Z) g_H(Y,W) - g_H(X,W) g_H(Y,Z).
    The first two components of each vector are horizontal and measured
    with ``gH`` (identity by default, i.e. an orthonormal horizontal frame).
    """
    key = _which(which)
    gH = np.eye(2) if gH is None else np.asarray(gH, dtype=float)
    h = lambda A, B: float(np.asarray(A)[:2] @ gH @ np.asarray(B)[:2])
    core = h(X, Z) * h(Y, W) - h(X, W) * h(Y, Z)
    val = _KH[key] * core
    if convention == "paper":
        return val
    if convention == "display":
        return -val
    raise ValueError("convention must be 'paper' or 'display'")


def product_tensor(which, frame, convention="paper"):
    """All components R_abcd of ``product_curvature`` for frame rows (h1, h2, t)."""
    E = np.asarray(frame, dtype=float)
    R = np.zeros((3, 3, 3, 3))
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    R[a, b, c, d] = product_curvature(which, E[a], E[b], E[c], E[d], convention=convention)
    return R


def adapted_frame_split(theta):
    """Frame (e1, e2, e3) in (h1, h2, t) components with d_t = sin(th) e1 + cos(th) e3.

    e1 = sin(th) d_t + cos(th) h1, e2 = h2, e3 = cos(th) d_t - sin(th) h1.
    """
    s, c = np.sin(theta), np.cos(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def adapted_frame(which, theta, x):
    """The same frame expressed in chart components of the product chart at x."""
    key = _which(which)
    metric = PRODUCT_CHARTS[key]()
    lam = metric.metric(x)[0, 0]
    split = adapted_frame_split(theta)
    scale = np.array([1.0 / np.sqrt(lam), 1.0 / np.sqrt(lam), 1.0])
    return split * scale[None, :]


# ---------------------------------------------------------------------------
# surfaces in charts


def _surface_derivs(chart, u, v, h=FD_STEP):
    F = lambda a, b: np.asarray(chart(a, b), dtype=float)
    d = lambda f, t: (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)
    d2 = lambda f, t: (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h)
    x = F(u, v)
    Fu = d(lambda t: F(t, v), u)
    Fv = d(lambda t: F(u, t), v)
    Fuu = d2(lambda t: F(t, v), u)
    Fvv = d2(lambda t: F(u, t), v)
    Fuv = d(lambda s: d(lambda t: F(s, t), v), u)
    return x, Fu, Fv, Fuu, Fuv, Fvv


def _unit_normal(metric, x, Fu, Fv):
    G = metric.metric(x, check=False)
    cov = np.cross(Fu, Fv)
    xi = np.linalg.solve(G, cov)
    return xi / np.sqrt(xi @ G @ xi)


def _covariant(Gam, A, B, dAB):
    return dAB + np.einsum("kij,i,j->k", Gam, A, B)


@dataclass
class ObstructionResult:
    point: np.ndarray
    R1223: float
    R2113: float
    geodesic_residual: float
    h: np.ndarray  # 2x2 second fundamental form in (e1, e2)
    K_ext: float
    frame: np.ndarray
    asymptotic_angle: float  # angle between e2 and the v-curve

    @property
    def ruled_here(self):
        return abs(self.R1223) < 1e-6


def surface_frame_data(metric, chart, u, v):
    """Adapted frame, second fundamental form and v-curve geodesic residual at (u, v)."""
    x, Fu, Fv, Fuu, Fuv, Fvv = _surface_derivs(chart, u, v)
    G = metric.metric(x)
    Gam = _christoffel_unchecked(metric, x)
    xi = _unit_normal(metric, x, Fu, Fv)
    hc = np.array([[_covariant(Gam, Fu, Fu, Fuu) @ G @ xi, _covariant(Gam, Fu, Fv, Fuv) @ G @ xi],
                   [0.0, _covariant(Gam, Fv, Fv, Fvv) @ G @ xi]])
    hc[1, 0] = hc[0, 1]
    # orthonormal tangent basis (f1, f2) with f2 along the v-curve
    f2 = Fv / np.sqrt(Fv @ G @ Fv)
    w = Fu - (f2 @ G @ Fu) * f2
    f1 = w / np.sqrt(w @ G @ w)
    # coefficients of f1, f2 in the (Fu, Fv) basis
    B = np.linalg.lstsq(np.column_stack([Fu, Fv]), np.column_stack([f1, f2]), rcond=None)[0].T
    hf = B @ hc @ B.T
    # snap e2 to the kernel of the shape operator unless the point is planar
    evals, evecs = np.linalg.eigh(hf)
    if np.max(np.abs(evals)) < 1e-9:
        c = np.array([0.0, 1.0])
    else:
        c = evecs[:, int(np.argmin(np.abs(evals)))]
        if c[1] < 0:
            c = -c
    e2 = c[0] * f1 + c[1] * f2
    e1 = c[1] * f1 - c[0] * f2
    rot = np.array([[c[1], -c[0]], [c[0], c[1]]])
    h_frame = rot @ hf @ rot.T
    angle = float(np.arccos(np.clip(abs(c[1]), 0.0, 1.0)))
    acc = _covariant(Gam, Fv, Fv, Fvv)
    nv2 = Fv @ G @ Fv
    perp = acc - (acc @ G @ Fv) / nv2 * Fv
    geo = float(np.sqrt(max(perp @ G @ perp, 0.0)) / nv2)
    frame = np.array([e1, e2, xi])
    return x, frame, h_frame, geo, angle


def ruledness_obstruction(metric, chart, u, v, tol=1e-6):
    """R_1223 in the frame adapted to a flat surface, with e2 asymptotic.

    A vanishing value certifies that the asymptotic curve through the point
    is a geodesic of the ambient manifold there. Raises PreconditionViolated
    if the surface is not extrinsically flat at (u, v).
    """
    x, frame, hf, geo, angle = surface_frame_data(metric, chart, u, v)
    K_ext = float(np.linalg.det(hf))
    scale = max(1.0, float(np.max(np.abs(hf))))
    if abs(K_ext) > tol * scale or abs(hf[0, 1]) > tol * scale or abs(hf[1, 1]) > tol * scale:
        raise PreconditionViolated(f"surface not extrinsically flat at (u, v) = ({u:g}, {v:g}): "
                                   f"h = {hf.tolist()}")
    R = riemann(metric, x, frame).R
    return ObstructionResult(x, float(R[0, 1, 1, 2]), float(R[1, 0, 0, 2]), geo, hf, K_ext, frame, angle)


def ruling_jacobi_curvature(metric, chart, u, v, h=5e-3):
    """-(dA/dv + A^2) for a chart with nabla_{d_u} d_v = A d_u.

    On an extrinsically flat ruled surface with orthogonal unit-speed rulings
    this is the intrinsic curvature, i.e. the ambient K0 in a space form.
    Returns (value, A, parallel_residual) where the residual measures how far
    nabla_{d_u} d_v is from being a multiple of d_u.
    """

    def A_and_res(t):
        x, Fu, Fv, Fuu, Fuv, Fvv = _surface_derivs(chart, u, t)
        G = metric.metric(x, check=False)
        Gam = _christoffel_unchecked(metric, x)
        D = _covariant(Gam, Fu, Fv, Fuv)
        nu2 = Fu @ G @ Fu
        A = (D @ G @ Fu) / nu2
        rest = D - A * Fu
        return A, float(np.sqrt(max(rest @ G @ rest, 0.0)) / np.sqrt(nu2))

    A0, res = A_and_res(v)
    Av = (A_and_res(v - 2 * h)[0] - 8 * A_and_res(v - h)[0] + 8 * A_and_res(v + h)[0]
          - A_and_res(v + 2 * h)[0]) / (12 * h)
    return float(-(Av + A0 * A0)), float(A0), res


def integrate_geodesic(metric, x0, v0, t_eval, rtol=1e-11, atol=1e-12):
    """Solve x'' + Gamma(x', x') = 0 from (x0, v0); returns positions at t_eval."""
    def rhs(t, y):
        x, dx = y[:3], y[3:]
        Gam = _christoffel_unchecked(metric, x)
        return np.concatenate([dx, -np.einsum("kij,i,j->k", Gam, dx, dx)])

    t_eval = np.asarray(t_eval, dtype=float)
    sol = integrate.solve_ivp(rhs, (0.0, float(t_eval[-1])), np.concatenate([x0, v0]), method="DOP853",
                              t_eval=t_eval, rtol=rtol, atol=atol)
    return sol.y[:3].T


# ---------------------------------------------------------------------------
# space-form test


@dataclass
class SpaceFormVerdict:
    is_space_form: bool
    K0: Optional[float]
    residual: float
    sectional: np.ndarray  # per sample: K(e1,e2), K(e1,e3), K(e2,e3)
    symmetry: float


def space_form_check(metric, samples, tol=1e-4):
    """Test R_abcd = K0 (delta_ac delta_bd - delta_ad delta_bc) in orthonormal frames."""
    Rs = []
    secs = []
    sym = 0.0
    for x in samples:
        T = riemann(metric, x)
        Rs.append(T.R)
        secs.append([T.R[0, 1, 0, 1], T.R[0, 2, 0, 2], T.R[1, 2, 1, 2]])
        sym = max(sym, max(T.symmetry_residuals().values()))
    secs = np.array(secs)
    K0 = float(np.mean(secs))
    d = np.eye(3)
    model = np.einsum("ac,bd->abcd", d, d) - np.einsum("ad,bc->abcd", d, d)
    residual = max(float(np.max(np.abs(R - K0 * model))) for R in Rs)
    ok = residual < tol
    return SpaceFormVerdict(ok, K0 if ok else None, residual, secs, sym)


# ---------------------------------------------------------------------------
# constant-angle surfaces


def _lorentz(a, b):
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def default_base_curve(which, rho=0.6):
    """A unit-speed circle with its outward unit normal in H^2 or S^2."""
    key = _which(which)
    if key == "H2xR":
        ch, sh = np.cosh(rho), np.sinh(rho)

        def curve(s):
            a = s / sh
            f = np.array([ch, sh * np.cos(a), sh * np.sin(a)])
            N = np.array([sh, ch * np.cos(a), ch * np.sin(a)])
            return f, N
    else:
        # circle of polar angle rho about the south pole, away from the projection pole
        c, s_ = np.cos(rho), np.sin(rho)

        def curve(s):
            a = s / s_
            f = np.array([s_ * np.cos(a), s_ * np.sin(a), -c])
            N = np.array([c * np.cos(a), c * np.sin(a), s_])
            return f, N
    return curve


class ConstantAngleSurface:
    """F(u, v) = (exp_{f(u)}(v cos(th) N(u)), v sin(th)) in a product chart.

    f is a unit-speed curve in H^2 (hyperboloid model) or S^2 with unit
    normal N. The normal of F is -sin(th) N_v + cos(th) d_t, so its angle
    with d_t is th everywhere, and the v-curves are ambient geodesics.
    """

    def __init__(self, which, theta, base_curve=None, t0=0.0):
        self.which = _which(which)
        theta = float(theta)
        if not (0.0 <= theta <= np.pi / 2 + 1e-15):
            raise InvalidAngle(f"theta must lie in [0, pi/2], got {theta}")
        self.theta = theta
        self.base_curve = base_curve or default_base_curve(self.which)
        self.t0 = float(t0)
        self.metric = PRODUCT_CHARTS[self.which]()

    def horizontal(self, u, s):
        f, N = self.base_curve(u)
        if self.which == "H2xR":
            X = np.cosh(s) * f + np.sinh(s) * N
            return X[1:] / (1.0 + X[0])
        X = np.cos(s) * f + np.sin(s) * N
        return X[:2] / (1.0 - X[2])

    def __call__(self, u, v):
        xy = self.horizontal(u, v * np.cos(self.theta))
        return np.array([xy[0], xy[1], self.t0 + v * np.sin(self.theta)])

    def normal_angle_residual(self, u, v):
        x, Fu, Fv, *_ = _surface_derivs(self, u, v)
        xi = _unit_normal(self.metric, x, Fu, Fv)
        G = self.metric.metric(x)
        cos_angle = abs(xi @ G @ np.array([0.0, 0.0, 1.0]))
        return abs(cos_angle - np.cos(self.theta))

    def ruling_geodesic_deviation(self, u, length=0.5, n=11):
        """Max chart distance between the v-curve and an integrated geodesic."""
        x0 = self(u, 0.0)
        h = FD_STEP
        v0 = (self(u, -2 * h) - 8 * self(u, -h) + 8 * self(u, h) - self(u, 2 * h)) / (12 * h)
        ts = np.linspace(0.0, length, n)
        geo = integrate_geodesic(self.metric, x0, v0, ts[1:])
        ref = np.array([self(u, t) for t in ts[1:]])
        return float(np.max(np.linalg.norm(geo - ref, axis=1)))


def constant_angle_surface(which, theta, base_curve=None):
    return ConstantAngleSurface(which, theta, base_curve)


@dataclass
class VerticalFrameData:
    theta: float  # angle between the unit normal and d_t
    frame: np.ndarray  # rows e1, e2, e3 with d_t = sin(theta) e1 + cos(theta) e3
    R1223: float
    R2113: float


def vertical_frame(metric, x, xi):
    """Frame (e1, e2, e3 = xi) with d_t = sin(theta) e1 + cos(theta) e3, theta in [0, pi/2].

    e1 is the normalized tangential part of d_t and e2 is orthogonal to d_t.
    At horizontal points (theta = 0) e1 is any unit tangent vector.
    """
    G = metric.metric(x, check=False)
    dt = np.zeros(3)
    dt[metric.vertical] = 1.0
    xi = np.asarray(xi, dtype=float)
    if dt @ G @ xi < 0:
        xi = -xi
    c = float(dt @ G @ xi)
    T = dt - c * xi
    nT = np.sqrt(max(T @ G @ T, 0.0))
    e1 = T / nT if nT >= 1e-12 else None
    frame = None
    for k in range(3):
        try:
            if e1 is None:
                frame = gram_schmidt(metric, x, [xi, np.eye(3)[k], np.eye(3)[(k + 1) % 3]])
            else:
                frame = gram_schmidt(metric, x, [xi, e1, np.eye(3)[k]])
            break
        except DegeneratePlane:
            continue
    e1, e2 = frame[1], frame[2]
    theta = float(np.arctan2(nT, c))
    return theta, np.array([e1, e2, xi])


def vertical_frame_components(metric, chart, u, v):
    """R_1223 and R_2113 of a surface in a product chart, in its vertical frame."""
    x, Fu, Fv, *_ = _surface_derivs(chart, u, v)
    xi = _unit_normal(metric, x, Fu, Fv)
    theta, E = vertical_frame(metric, x, xi)
    R = riemann(metric, x, E).R
    return VerticalFrameData(theta, E, float(R[0, 1, 1, 2]), float(R[1, 0, 0, 2]))
