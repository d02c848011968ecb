"""Ruled surfaces psi(u, v) = exp_{alpha(u)}(v Z(u)) in the space forms.

All curvature formulas are written once in terms of the model functions
C(v), S(v), K0 (see ``ambient``) and a per-ruling table of invariants of
the directrix alpha and the ruling field Z. With D = nabla_{alpha'}::

    na = <alpha',alpha'>   a = <alpha',Z>   b = <alpha',DZ>   m = <DZ,DZ>
    T0 = (alpha',Z,DZ)     T1 = (Dalpha',alpha',Z)   T2 = (Dalpha',DZ,Z)
    T3 = (D^2Z,alpha',Z)   T4 = (D^2Z,DZ,Z)

where (X,Y,W) is the mixed product at alpha(u). Then

    g11 = C^2 na + 2CS b + S^2 m + K0 S^2 a^2,  g12 = a,  g22 = 1
    h12 = T0/sqrt(g),  h22 = 0
    h11 = (C^2 T1 + CS (T2 + T3) + S^2 T4 + K0 a S^2 T0)/sqrt(g)
    K_ext = -T0^2/g^2

with g = g11 - a^2 and the normal xi = psi_u x psi_v / sqrt(g).
"""
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
import sympy as sp
from scipy import integrate, optimize

from . import _kernels
from .ambient import (det4, exp_map, gauss_correction,
                      parallel_transport_along_ruling, vector_product)
from .curve import (Curve, FrameField, VectorFunction, curve_from_expressions,
                    normalized_field, unit_tangent_field)
from .errors import (ArctanhDomain, CylindricalSurface, DegenerateCurve, NotFlat,
                     NotNormal, NotStriction, OutOfDomain, SingularPoint)

#: half-width of the excluded band around cos(v/r) = 0 on the sphere
SEC_BAND = 1e-3
SINGULAR_TOL = 1e-12
CYLINDER_TOL = 1e-8
STRICTION_TOL = 1e-7

FORM_NAMES = ("g11", "g12", "g_det", "h11", "h12", "K_ext", "H")


def sphere_band_ok(v_lo, v_hi, r):
    """True when [v_lo, v_hi] keeps |cos(v/r)| > SEC_BAND."""
    # cos(v/r) = 0 at v/r = pi/2 + k pi; the band around each is |x - x_k| <= arcsin(SEC_BAND)
    half = np.arcsin(SEC_BAND)
    x_lo, x_hi = v_lo / r, v_hi / r
    k_lo = int(np.floor((x_lo - np.pi / 2 - half) / np.pi))
    k_hi = int(np.ceil((x_hi - np.pi / 2 + half) / np.pi))
    for k in range(k_lo, k_hi + 1):
        xk = np.pi / 2 + k * np.pi
        if x_lo <= xk + half and x_hi >= xk - half:
            return False
    return True


class DirectrixData(NamedTuple):
    """Per-ruling vectors and the invariant table (shape (n, 9))."""
    u: np.ndarray
    alpha: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    Z: np.ndarray
    Z1: np.ndarray
    Z2: np.ndarray
    Dd1: np.ndarray
    DZ: np.ndarray
    D2Z: np.ndarray
    table: np.ndarray

    @property
    def na(self):
        return self.table[:, 0]

    @property
    def a(self):
        return self.table[:, 1]

    @property
    def b(self):
        return self.table[:, 2]

    @property
    def m(self):
        return self.table[:, 3]

    @property
    def T0(self):
        return self.table[:, 4]


class FundamentalForms(NamedTuple):
    g11: float
    g12: float
    g22: float
    h11: float
    h12: float
    h22: float
    g_det: float


class CurvatureReport(NamedTuple):
    forms: FundamentalForms
    K_ext: float
    K_int: float
    H: float
    lam: Optional[float]
    K_sec: float
    singular: bool


class RuledSurface:
    """psi(u, v) = C(v) alpha(u) + S(v) Z(u) over u_domain x v_domain."""

    def __init__(self, sf, directrix, ruling, u_domain=None, v_domain=(-1.0, 1.0),
                 orientation=1, check=True, name="ruled"):
        self.sf = sf
        self.directrix = directrix
        self.ruling = ruling
        self.u_domain = tuple(float(x) for x in (u_domain if u_domain is not None else directrix.domain))
        self.v_domain = tuple(float(x) for x in v_domain)
        self.orientation = 1 if orientation >= 0 else -1
        self.name = name
        if self.v_domain[0] > self.v_domain[1] or self.u_domain[0] > self.u_domain[1]:
            raise ValueError("empty parameter domain")
        if sf.kind == "sphere" and not sphere_band_ok(*self.v_domain, sf.r):
            raise OutOfDomain(f"v_domain {self.v_domain} enters the band |cos(v/r)| <= {SEC_BAND}")
        if check:
            lo, hi = self.u_domain
            if np.isfinite(lo) and np.isfinite(hi):
                us = np.linspace(lo, hi, 9)
                for u in us:
                    q = directrix(u)
                    Z = ruling(u)
                    sf.check_point(q)
                    sf.check_tangent(q, Z)
                    sf.check_unit(Z)

    def flipped(self):
        """Same surface with the opposite unit normal."""
        return RuledSurface(self.sf, self.directrix, self.ruling, self.u_domain, self.v_domain,
                            -self.orientation, check=False, name=self.name)

    def with_domain(self, u_domain=None, v_domain=None):
        return RuledSurface(self.sf, self.directrix, self.ruling,
                            u_domain or self.u_domain, v_domain or self.v_domain,
                            self.orientation, check=False, name=self.name)

    def _check_uv(self, u, v):
        lo, hi = self.u_domain
        eps = 1e-9 * max(1.0, abs(lo), abs(hi))
        if np.any(np.asarray(u) < lo - eps) or np.any(np.asarray(u) > hi + eps):
            raise OutOfDomain(f"u outside {self.u_domain}")
        lo, hi = self.v_domain
        eps = 1e-9 * max(1.0, abs(lo), abs(hi))
        if np.any(np.asarray(v) < lo - eps) or np.any(np.asarray(v) > hi + eps):
            raise OutOfDomain(f"v outside {self.v_domain}")

    # -- evaluation --------------------------------------------------------

    def eval(self, u, v):
        self._check_uv(u, v)
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return exp_map(self.directrix(u), self.ruling(u), v, self.sf, check=False)

    __call__ = eval

    def eval_tangents(self, u, v):
        self._check_uv(u, v)
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        C, S = self.sf.cs(v)
        alpha = self.directrix(u)
        Z = self.ruling(u)
        psi_u = C[..., None] * self.directrix.derivative(u, 1) + S[..., None] * self.ruling.derivative(u, 1)
        psi_v = parallel_transport_along_ruling(alpha, Z, v, self.sf, check=False)
        return psi_u, psi_v

    def directrix_data(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        sf = self.sf
        K0 = sf.K0
        alpha, d1, d2 = self.directrix.jet(u, 2)
        Z, Z1, Z2 = self.ruling.jet(u, 2)
        ip = sf.inner
        na = ip(d1, d1)
        a = ip(d1, Z)
        Dd1 = d2 + (K0 * na)[:, None] * alpha
        DZ = Z1 + (K0 * a)[:, None] * alpha
        da = ip(d2, Z) + ip(d1, Z1)
        b = ip(d1, DZ)
        D2Z = Z2 + K0 * (da[:, None] * alpha + a[:, None] * d1) + (K0 * b)[:, None] * alpha
        m = ip(DZ, DZ)
        n = sf.normal(alpha)
        T = [det4(n, d1, Z, DZ), det4(n, Dd1, d1, Z), det4(n, Dd1, DZ, Z),
             det4(n, D2Z, d1, Z), det4(n, D2Z, DZ, Z)]
        table = np.column_stack([na, a, b, m] + T)
        return DirectrixData(u, alpha, d1, d2, Z, Z1, Z2, Dd1, DZ, D2Z, table)

    def forms_grid(self, u, v, data=None):
        """Array (nu, nv, 7) of g11, g12, g_det, h11, h12, K_ext, H on the grid u x v."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        self._check_uv(u, v)
        if data is None:
            data = self.directrix_data(u)
        C, S = self.sf.cs(v)
        out = _kernels.forms_grid(data.table, C, S, self.sf.K0)
        # curvatures are undefined at singular points; don't report 0/0 noise
        sing = ~(out[..., 2] > SINGULAR_TOL)
        out[..., 3:][sing] = np.nan
        if self.orientation < 0:
            out[..., 3] *= -1.0
            out[..., 4] *= -1.0
            out[..., 6] *= -1.0
        return out

    def _point_forms(self, u, v):
        return self.forms_grid([u], [v])[0, 0]

    def unit_normal(self, u, v):
        psi = self.eval(u, v)
        psi_u, psi_v = self.eval_tangents(u, v)
        xi = vector_product(psi_u, psi_v, psi, self.sf, normalized=True, check=False)
        g = self._point_forms(u, v)[2] if np.ndim(u) == 0 else None
        if g is None:
            nrm = self.sf.norm(xi)[..., None]
        else:
            nrm = np.sqrt(g)
        return self.orientation * xi / nrm


# ---------------------------------------------------------------------------
# fundamental forms and curvatures


def first_fundamental_form(surface, u, v):
    f = surface._point_forms(u, v)
    return float(f[0]), float(f[1]), 1.0


def _require_regular(f, u, v, tol=SINGULAR_TOL):
    if not f[2] > tol:
        raise SingularPoint(f"g_det = {f[2]:.3e} at (u, v) = ({u:g}, {v:g})")


def second_fundamental_form(surface, u, v):
    f = surface._point_forms(u, v)
    _require_regular(f, u, v)
    return float(f[3]), float(f[4]), 0.0


def fundamental_forms(surface, u, v):
    f = surface._point_forms(u, v)
    _require_regular(f, u, v)
    return FundamentalForms(float(f[0]), float(f[1]), 1.0, float(f[3]), float(f[4]), 0.0, float(f[2]))


def mean_curvature(surface, u, v):
    """H = (h11 g22 - 2 h12 g12 + h22 g11) / (2 g), no orthogonality shortcut."""
    f = surface._point_forms(u, v)
    _require_regular(f, u, v)
    return float(f[6])


def extrinsic_curvature(surface, u, v):
    """K_ext = det(h)/det(g) = -h12^2/g."""
    f = surface._point_forms(u, v)
    _require_regular(f, u, v)
    return float(f[5])


def extrinsic_curvature_displayed(surface, u, v):
    """-(T0 / g)^2 evaluated directly from the mixed product; same value as -h12^2/g."""
    d = surface.directrix_data(u)
    f = surface._point_forms(u, v)
    _require_regular(f, u, v)
    return float(-(d.T0[0] / f[2]) ** 2)


def curvature_report(surface, u, v, lam=None):
    f = surface._point_forms(u, v)
    singular = not f[2] > SINGULAR_TOL
    forms = FundamentalForms(float(f[0]), float(f[1]), 1.0, float(f[3]), float(f[4]), 0.0, float(f[2]))
    K_sec = surface.sf.K0
    K_ext = float(f[5])
    return CurvatureReport(forms, K_ext, K_ext + K_sec, float(f[6]), lam, K_sec, singular)


# ---------------------------------------------------------------------------
# striction curve


def _g11(sf, data, v):
    C, S = sf.cs(v)
    return C * C * data.na + 2 * C * S * data.b + S * S * data.m + sf.K0 * S * S * data.a ** 2


def _striction_v(sf, data, branch="principal"):
    """v(u) solving <beta', nabla_{beta'} PZ> = 0, plus a per-u status string.

    On the sphere the equation has solutions every pi r/2 along a ruling,
    alternating between minima and maxima of |psi_u|. ``branch="principal"``
    returns the one in (-pi r/4, pi r/4]; ``branch="minimal"`` returns the
    minimizer of |psi_u| in (-pi r/2, pi r/2].
    """
    na, a, b, m = data.na, data.a, data.b, data.m
    g0 = na - a * a
    n = len(na)
    v = np.empty(n)
    status = ["ok"] * n
    if sf.is_euclidean:
        v[:] = -b / m
        return v, status
    r = sf.r
    if sf.kind == "sphere":
        num = -(2.0 / r) * b
        den = m - g0 / r ** 2
        scale = np.maximum(np.abs(m), np.abs(g0) / r ** 2)
        for i in range(n):
            if abs(den[i]) <= 1e-14 * max(scale[i], 1e-300):
                if abs(num[i]) <= 1e-14 * max(scale[i], 1e-300):
                    v[i] = 0.0
                    status[i] = "indeterminate"
                else:
                    v[i] = np.copysign(np.pi * r / 4.0, num[i])
                    status[i] = "limit"
            else:
                v[i] = 0.5 * r * np.arctan(num[i] / den[i])
        if branch == "minimal":
            other = v - np.copysign(np.pi * r / 2.0, v)
            other = np.where(v == 0.0, np.pi * r / 2.0, other)
            swap = _g11(sf, data, other) < _g11(sf, data, v)
            v = np.where(swap, other, v)
        return v, status
    num = -(2.0 / r) * b
    den = m + g0 / r ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = num / den
    for i in range(n):
        if np.isfinite(arg[i]) and abs(arg[i]) < 1.0:
            v[i] = 0.5 * r * np.arctanh(arg[i])
        else:
            v[i] = np.nan
            status[i] = "arctanh_domain"
    return v, status


def striction_residual_closed_form(sf, data, v):
    """<beta', nabla PZ> expressed through the invariants: CS(m - K0 g0) + b(C^2 - K0 S^2)."""
    C, S = sf.cs(v)
    g0 = data.na - data.a ** 2
    return C * S * (data.m - sf.K0 * g0) + data.b * (C * C - sf.K0 * S * S)


def _fd5(f, u, h):
    return (f(u - 2 * h) - 8 * f(u - h) + 8 * f(u + h) - f(u + 2 * h)) / (12 * h)


@dataclass
class StrictionResult:
    surface: "RuledSurface"
    u: np.ndarray
    v: np.ndarray
    status: List[str]
    beta: Curve
    residuals: np.ndarray
    residuals_closed_form: np.ndarray
    antipodal: bool = False
    branch: str = "principal"

    @property
    def residual(self):
        ok = np.isfinite(self.residuals)
        return float(np.max(np.abs(self.residuals[ok]))) if ok.any() else float("nan")

    @property
    def failed(self):
        return [u for u, s in zip(self.u, self.status) if s == "arctanh_domain"]

    def v_of_u(self, u):
        return _striction_param(self.surface, u, self.antipodal, self.branch)

    def antipodal_copy(self):
        """The striction curve shifted by pi r (sphere only)."""
        sf = self.surface.sf
        if sf.kind != "sphere":
            raise ValueError("antipodal striction curves exist only on the sphere")
        return _build_striction(self.surface, self.u, antipodal=not self.antipodal, branch=self.branch)


def _striction_param(surface, u, antipodal=False, branch="principal"):
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    data = surface.directrix_data(u_arr)
    v, _ = _striction_v(surface.sf, data, branch)
    if antipodal:
        v = v + np.pi * surface.sf.r
    return v if np.ndim(u) else float(v[0])


def _build_striction(surface, u, antipodal=False, check_cylinder=True, branch="principal"):
    sf = surface.sf
    data = surface.directrix_data(u)
    if check_cylinder:
        normDZ = np.sqrt(np.maximum(data.m, 0.0))
        if np.any(normDZ < CYLINDER_TOL):
            k = int(np.argmin(normDZ))
            raise CylindricalSurface(f"nabla_(alpha') Z vanishes near u={u[k]:g}; no striction curve")
    v, status = _striction_v(sf, data, branch)
    if antipodal:
        v = v + np.pi * sf.r

    def beta_fn(x):
        x = np.asarray(x, dtype=float)
        vv = _striction_param(surface, x, antipodal, branch)
        return exp_map(surface.directrix(x), surface.ruling(x), vv, sf, check=False)

    def pz_fn(x):
        vv = _striction_param(surface, x, antipodal, branch)
        return parallel_transport_along_ruling(surface.directrix(x), surface.ruling(x), vv, sf, check=False)

    beta = Curve(beta_fn, None, surface.u_domain, sf, check=False)
    res = np.full(len(u), np.nan)
    lo, hi = surface.u_domain
    for i, x in enumerate(u):
        if status[i] == "arctanh_domain":
            continue
        h = 1e-3 * max(1.0, abs(x))
        db = _fd5(beta_fn, x, h)
        dpz = _fd5(pz_fn, x, h)
        # <beta', nabla_{beta'} PZ> = <beta', PZ'> because beta' is tangent at beta
        res[i] = sf.inner(db, dpz)
    res_cf = striction_residual_closed_form(sf, data, v)
    return StrictionResult(surface, u, v, status, beta, res, res_cf, antipodal, branch)


def striction_curve(surface, u=None, n=101, branch="principal"):
    """Striction curve beta(u) = exp_{alpha(u)}(v(u) Z(u)) sampled on u.

    Sphere: principal arctan branch, v in (-pi r/4, pi r/4); where the
    arctan denominator vanishes the limiting value +-pi r/4 is used and the
    sample is marked "limit". Hyperbolic: where the arctanh argument leaves
    (-1, 1) there is no striction point on that ruling; the sample is marked
    "arctanh_domain" with v = nan. Residuals are finite-difference values of
    <beta', nabla_{beta'} PZ>.
    """
    if u is None:
        u = np.linspace(*surface.u_domain, n)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return _build_striction(surface, u, branch=branch)


def striction_or_raise(surface, u=None, n=101):
    """Like ``striction_curve`` but raises ArctanhDomain if any ruling has no striction point."""
    res = striction_curve(surface, u, n)
    if res.failed:
        raise ArctanhDomain(f"no striction point on the rulings at u = {res.failed[:5]}")
    return res


def striction_surface(surface, n=101):
    """Reparametrize so that the directrix is the striction curve.

    The new directrix is beta(u) and the new ruling is PZ along beta; the
    v-parameter is shifted by -v(u), so the underlying point set is unchanged.
    """
    sf = surface.sf

    def vfun(x):
        return _striction_param(surface, x)

    def beta(x):
        return exp_map(surface.directrix(x), surface.ruling(x), vfun(x), sf, check=False)

    def pz(x):
        return parallel_transport_along_ruling(surface.directrix(x), surface.ruling(x), vfun(x), sf, check=False)

    d = Curve(beta, None, surface.u_domain, sf, check=False)
    Z = FrameField(d, pz, None, check=False)
    return RuledSurface(sf, d, Z, surface.u_domain, surface.v_domain, surface.orientation,
                        check=False, name=surface.name + "/striction")


# ---------------------------------------------------------------------------
# distribution parameter and singularities


def _require_striction(data, tol=STRICTION_TOL):
    normDZ = np.sqrt(np.maximum(data.m, 0.0))
    if np.any(normDZ < CYLINDER_TOL):
        raise CylindricalSurface("nabla_(alpha') Z vanishes; the distribution parameter is undefined")
    scale = np.sqrt(np.maximum(data.na, 0.0)) * normDZ
    bad = np.abs(data.b) > tol * np.maximum(scale, 1.0)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise NotStriction(f"directrix is not the striction curve: <alpha', DZ> = {data.b[k]:.3e} at u={data.u[k]:g}")


def distribution_parameter(surface, u):
    """lambda = (alpha', Z, DZ) / <DZ, DZ> for a striction directrix."""
    data = surface.directrix_data(u)
    _require_striction(data)
    lam = data.T0 / data.m
    return lam if np.ndim(u) else float(lam[0])


def extrinsic_curvature_striction_form(surface, u, v):
    """K_ext = -lambda^2 / (C^2 lambda^2 + S^2)^2 for a striction directrix.

    Follows from g = (C^2 lambda^2 + S^2) <DZ,DZ> when <alpha', DZ> = 0.
    """
    lam = distribution_parameter(surface, np.atleast_1d(u))
    C, S = surface.sf.cs(np.asarray(v, dtype=float))
    denom = (C * C * lam * lam + S * S) ** 2
    K = -(lam * lam) / denom
    return K if np.ndim(K) and np.size(K) > 1 else float(np.ravel(K)[0])


def singular_values_of_v(surface):
    """v-values on a striction ruling where S(v) = 0: 0, and pi r on the sphere.

    The antipodal value is reported even when it lies outside v_domain,
    since it marks the antipodal copy of the striction curve.
    """
    if surface.sf.kind == "sphere":
        return [0.0, float(np.pi * surface.sf.r)]
    return [0.0]


def singular_points(surface, n=401, tol=1e-10):
    """Points with g_det = 0 on a surface whose directrix is the striction curve.

    g = (C^2 lambda^2 + S^2) <DZ,DZ> vanishes exactly where lambda(u) = 0 and
    S(v) = 0. Zeros of lambda are located by sign changes on an n-point grid
    refined with Brent's method; grid nodes where |lambda| < tol are returned
    as they are (a tangent surface is singular along its whole directrix).
    """
    us = np.linspace(*surface.u_domain, n)
    lam = distribution_parameter(surface, us)
    zeros = []
    flat = np.abs(lam) < tol
    zeros.extend(us[flat].tolist())
    for i in range(n - 1):
        if flat[i] or flat[i + 1]:
            continue
        if np.sign(lam[i]) != np.sign(lam[i + 1]):
            root = optimize.brentq(lambda x: distribution_parameter(surface, x), us[i], us[i + 1],
                                   xtol=1e-14, rtol=4 * np.finfo(float).eps)
            zeros.append(root)
    zeros = sorted(set(zeros))
    vs = singular_values_of_v(surface)
    return [(float(u), float(v)) for u in zeros for v in vs]


# ---------------------------------------------------------------------------
# flat surfaces


@dataclass
class FlatClassification:
    u: np.ndarray
    labels: List[str]
    pieces: List[tuple]  # (kind, u_start, u_end)
    boundaries: List[float]
    max_abs_K: float


def classify_flat(surface, nu=101, nv=9, tol=1e-8, min_run=3):
    """Split the u-domain of an extrinsically flat ruled surface into pieces.

    Per sample: "cylinder" if |nabla Z| < tol, "cone" if the striction curve
    is stationary, "tangent_surface" if beta' is parallel to the ruling.
    Runs shorter than ``min_run`` samples become "undetermined".
    """
    us = np.linspace(*surface.u_domain, nu)
    vs = np.linspace(*surface.v_domain, nv)
    F = surface.forms_grid(us, vs)
    K = F[..., 5]
    ok = np.isfinite(K)
    maxK = float(np.max(np.abs(K[ok]))) if ok.any() else 0.0
    if maxK > tol:
        raise NotFlat(f"sampled |K_ext| reaches {maxK:.3e}")
    sf = surface.sf
    data = surface.directrix_data(us)
    normDZ = np.sqrt(np.maximum(data.m, 0.0))
    labels = []
    for i, x in enumerate(us):
        if normDZ[i] < tol ** 0.5:
            labels.append("cylinder")
            continue
        res = _build_striction(surface, np.array([x]), check_cylinder=False, branch="minimal")
        v0 = res.v[0]
        h = 1e-3 * max(1.0, abs(x))
        bfn = res.beta
        db = _fd5(lambda t: bfn(t), x, h)
        nb = float(sf.norm(db))
        if nb < 1e-6:
            labels.append("cone")
            continue
        pz = parallel_transport_along_ruling(surface.directrix(x), surface.ruling(x), v0, sf, check=False)
        perp = db - sf.inner(db, pz) * pz
        if float(sf.norm(perp)) < 1e-6 * max(nb, 1.0):
            labels.append("tangent_surface")
        else:
            labels.append("undetermined")
    # group into runs
    runs = []
    start = 0
    for i in range(1, nu + 1):
        if i == nu or labels[i] != labels[start]:
            runs.append((labels[start], start, i - 1))
            start = i
    pieces = []
    boundaries = []
    for j, (kind, i0, i1) in enumerate(runs):
        if i1 - i0 + 1 < min_run:
            kind = "undetermined"
        pieces.append((kind, float(us[i0]), float(us[i1])))
        if j > 0:
            boundaries.append(float(0.5 * (us[i0 - 1] + us[i0])))
    # merge adjacent pieces of the same kind created by demotion
    merged = []
    for p in pieces:
        if merged and merged[-1][0] == p[0]:
            merged[-1] = (p[0], merged[-1][1], p[2])
        else:
            merged.append(p)
    bounds = [0.5 * (merged[k][2] + merged[k + 1][1]) for k in range(len(merged) - 1)]
    return FlatClassification(us, labels, merged, bounds, maxK)


def rotation_minimizing_residual(alpha, Z, u):
    """|DZ wedge alpha'| / |alpha'|, zero iff nabla_{alpha'} Z is parallel to alpha'."""
    sf = alpha.sf
    q = alpha(u)
    d1 = alpha.derivative(u, 1)
    Zv = Z(u)
    DZ = Z.derivative(u, 1) + gauss_correction(d1, Zv, q, sf)
    na = sf.inner(d1, d1)
    w2 = sf.inner(DZ, DZ) * na - sf.inner(DZ, d1) ** 2
    return float(np.sqrt(max(w2, 0.0) / na))


def rotation_minimizing_check(alpha, Z, u=None, n=101, tol=1e-6):
    """True iff the normal field Z along alpha is rotation minimizing at every sample."""
    sf = alpha.sf
    if u is None:
        u = np.linspace(*alpha.domain, n)
    worst = 0.0
    for x in np.atleast_1d(u):
        d1 = alpha.derivative(x, 1)
        a = float(sf.inner(d1, Z(x)))
        if abs(a) > tol * max(1.0, float(sf.norm(d1))):
            raise NotNormal(f"<alpha', Z> = {a:.3e} at u={x:g}")
        worst = max(worst, rotation_minimizing_residual(alpha, Z, x))
    return worst < tol


# ---------------------------------------------------------------------------
# constructors


def _sym(x):
    x = float(x)
    return sp.Integer(int(x)) if x.is_integer() else sp.Float(x)


def model_functions_sym(sf, v):
    """Symbolic (C(v), S(v), K0)."""
    if sf.kind == "sphere":
        r = _sym(sf.r)
        return sp.cos(v / r), r * sp.sin(v / r), 1 / r ** 2
    if sf.kind == "hyperbolic":
        r = _sym(sf.r)
        return sp.cosh(v / r), r * sp.sinh(v / r), -1 / r ** 2
    return sp.Integer(1), v, sp.Integer(0)


def helicoid_expressions(sf, omega, u, offset=0.0):
    w = _sym(omega)
    if sf.is_euclidean:
        alpha = [0, u, 0, 0]
    elif sf.kind == "sphere":
        r = _sym(sf.r)
        alpha = [r * sp.cos(u / r), r * sp.sin(u / r), 0, 0]
    else:
        r = _sym(sf.r)
        alpha = [r * sp.cosh(u / r), r * sp.sinh(u / r), 0, 0]
    Z = [0, 0, sp.cos(w * u), sp.sin(w * u)]
    if offset:
        C, S, K0 = model_functions_sym(sf, _sym(offset))
        alpha, Z = ([C * a + S * z for a, z in zip(alpha, Z)],
                    [-K0 * S * a + C * z for a, z in zip(alpha, Z)])
    return alpha, Z


def helicoid(sf, omega, offset=0.0, u_domain=(0.0, 2 * np.pi), v_domain=(-1.0, 1.0)):
    """Helicoid swept by the helicoidal motion of angular pitch omega.

    Directrix is the unit-speed axis (r cos(u/r), r sin(u/r), 0, 0) on S^3,
    its cosh/sinh analogue on H^3 and (0, u, 0, 0) in E^3; the ruling is
    (0, 0, cos(omega u), sin(omega u)). A nonzero ``offset`` moves the
    directrix to v = offset along every ruling, so the striction curve is
    then found at v = -offset.
    """
    u = sp.Symbol("u", real=True)
    a_ex, z_ex = helicoid_expressions(sf, omega, u, offset)
    alpha = curve_from_expressions(sf, a_ex, u, u_domain)
    Z = FrameField.from_expressions(alpha, z_ex, u)
    return RuledSurface(sf, alpha, Z, u_domain, v_domain, name=f"helicoid(omega={omega:g})")


def tangent_surface(c, u_domain=None, v_domain=(-1.0, 1.0)):
    """Rulings tangent to c: Z = c'/|c'|."""
    Z = unit_tangent_field(c)
    return RuledSurface(c.sf, c, Z, u_domain or c.domain, v_domain, name="tangent_surface")


def constant_curve(sf, p, domain):
    p = sf.check_point(p)
    zero = lambda u: np.zeros(np.shape(u) + (4,))
    return Curve(lambda u: np.broadcast_to(p, np.shape(u) + (4,)).copy(),
                 {1: zero, 2: zero, 3: zero, 4: zero}, domain, sf, check=False)


def cone(sf, apex, direction_exprs, u_domain=(0.0, 2 * np.pi), v_domain=(-1.0, 1.0), symbol=None):
    """All rulings through ``apex`` with directions given by expressions in u.

    The directions are projected to the tangent space at the apex and
    normalized before use.
    """
    u = symbol if symbol is not None else sp.Symbol("u", real=True)
    apex = np.asarray(apex, dtype=float)
    base = constant_curve(sf, apex, u_domain)
    Y = VectorFunction.from_expressions([parse_expr(e, u) for e in direction_exprs], u, u_domain, order=3)
    Z = normalized_field(base, Y)
    return RuledSurface(sf, base, Z, u_domain, v_domain, name="cone")


def _transport_field(alpha, Z0, u0, rhs_extra, domain, name, rtol=1e-12, atol=1e-13):
    """Integrate Z' = -K0 <alpha', Z> alpha + extra(u, Z) with DOP853 (dense output)."""
    sf = alpha.sf
    lo, hi = domain
    # pad so finite-difference stencils at the ends stay inside the solution
    pad = 0.01 * (hi - lo) + 1e-2
    lo, hi = lo - pad, hi + pad
    Z0 = np.asarray(Z0, dtype=float)
    sf.check_tangent(alpha(u0), Z0)
    sf.check_unit(Z0)

    def rhs(u, Z):
        d1 = alpha.derivative(u, 1)
        return -sf.K0 * sf.inner(d1, Z) * alpha(u) + rhs_extra(u, Z)

    sols = []
    if hi > u0:
        sols.append(integrate.solve_ivp(rhs, (u0, hi), Z0, method="DOP853", rtol=rtol, atol=atol, dense_output=True))
    if lo < u0:
        sols.append(integrate.solve_ivp(rhs, (u0, lo), Z0, method="DOP853", rtol=rtol, atol=atol, dense_output=True))
    for s in sols:
        if not s.success:
            raise DegenerateCurve(f"{name}: integration failed: {s.message}")

    def value(u):
        u_arr = np.asarray(u, dtype=float)
        flat = u_arr.ravel()
        out = np.empty((flat.size, 4))
        for k, x in enumerate(flat):
            if x == u0 or not sols:
                out[k] = Z0
            elif x > u0:
                out[k] = sols[0].sol(x)
            else:
                out[k] = sols[-1].sol(x)
        return out.reshape(u_arr.shape + (4,))

    return value, rhs


def cylinder(alpha, Z0, u0=None, u_domain=None, v_domain=(-1.0, 1.0)):
    """Rulings along a parallel field: nabla_{alpha'} Z = 0 integrated from Z(u0) = Z0."""
    sf = alpha.sf
    domain = u_domain or alpha.domain
    u0 = domain[0] if u0 is None else u0
    value, rhs = _transport_field(alpha, Z0, u0, lambda u, Z: 0.0, domain, "cylinder")

    def d1(u):
        return _vec_apply(lambda x: rhs(x, value(x)), u)

    def d2(u):
        def one(x):
            Z = value(x)
            a1 = alpha.derivative(x, 1)
            Z1 = rhs(x, Z)
            da = sf.inner(alpha.derivative(x, 2), Z) + sf.inner(a1, Z1)
            return -sf.K0 * (da * alpha(x) + sf.inner(a1, Z) * a1)
        return _vec_apply(one, u)

    Z = FrameField(alpha, value, {1: d1, 2: d2}, domain, check=False)
    return RuledSurface(sf, alpha, Z, domain, v_domain, name="cylinder")


def _vec_apply(fn, u):
    u_arr = np.asarray(u, dtype=float)
    if u_arr.ndim == 0:
        return np.asarray(fn(float(u_arr)))
    return np.stack([fn(float(x)) for x in u_arr.ravel()]).reshape(u_arr.shape + (4,))


def rotation_minimizing_field(alpha, Z0, u0=None, domain=None):
    """Normal field Z along alpha with nabla_{alpha'} Z parallel to alpha'.

    Solves Z' = -K0 <alpha',Z> alpha - (<Z, Dalpha'>/|alpha'|^2) alpha'
    from a unit normal Z0 at u0.
    """
    sf = alpha.sf
    domain = domain or alpha.domain
    u0 = domain[0] if u0 is None else u0
    d1_0 = alpha.derivative(u0, 1)
    if abs(sf.inner(d1_0, Z0)) > 1e-8 * max(1.0, float(sf.norm(d1_0))):
        raise NotNormal("initial vector must be orthogonal to alpha'")

    def jets(u):
        c, a1, a2, a3 = alpha.jet(u, 3)
        na = sf.inner(a1, a1)
        Da1 = a2 + sf.K0 * na * c
        return c, a1, a2, a3, na, Da1

    def extra(u, Z):
        c, a1, a2, a3, na, Da1 = jets(u)
        return -(sf.inner(Z, Da1) / na) * a1

    value, rhs = _transport_field(alpha, Z0, u0, extra, domain, "rotation-minimizing field")

    def d1(u):
        return _vec_apply(lambda x: rhs(x, value(x)), u)

    def d2(u):
        def one(x):
            c, a1, a2, a3, na, Da1 = jets(x)
            Z = value(x)
            Z1 = rhs(x, Z)
            K0 = sf.K0
            a = sf.inner(a1, Z)
            da = sf.inner(a2, Z) + sf.inner(a1, Z1)
            dna = 2.0 * sf.inner(a1, a2)
            dDa1 = a3 + K0 * (dna * c + na * a1)
            mu = sf.inner(Z, Da1) / na
            dmu = (sf.inner(Z1, Da1) + sf.inner(Z, dDa1)) / na - mu * dna / na
            return -K0 * (da * c + a * a1) - dmu * a1 - mu * a2
        return _vec_apply(one, u)

    return FrameField(alpha, value, {1: d1, 2: d2}, domain, check=False)


def parse_expr(e, u):
    """sympify ``e`` and identify any symbol named like ``u`` with ``u`` itself."""
    ex = sp.sympify(e, locals={u.name: u})
    return ex.subs({s: u for s in ex.free_symbols if s.name == u.name and s != u})


def custom_surface(sf, directrix_exprs, ruling_exprs, u_domain, v_domain=(-1.0, 1.0), symbol="u",
                   normalize=True):
    """Ruled surface from component expressions (strings or sympy) in one parameter."""
    u = sp.Symbol(symbol, real=True) if isinstance(symbol, str) else symbol
    a_ex = [parse_expr(e, u) for e in directrix_exprs]
    y_ex = [parse_expr(e, u) for e in ruling_exprs]
    alpha = curve_from_expressions(sf, a_ex, u, u_domain)
    if normalize:
        Z = normalized_field(alpha, VectorFunction.from_expressions(y_ex, u, u_domain, order=3))
    else:
        Z = FrameField.from_expressions(alpha, y_ex, u)
    return RuledSurface(sf, alpha, Z, u_domain, v_domain, name="custom")


def lifted_surface(sf, x_exprs, y_exprs, u_domain, v_domain=(-1.0, 1.0), symbol="u"):
    """Carry Euclidean ruled-surface data (x(u), y(u)) in R^3 into a space form.

    E^3: alpha = (0, x), Z = (0, y)/|y|. S^3(r): alpha = (sqrt(r^2 - |x|^2), x);
    H^3(r): alpha = (sqrt(r^2 + |x|^2), x); Z is (0, y) projected to the
    tangent space and normalized. As r grows the lifted surface converges to
    the Euclidean one with O(1/r^2) errors in all local invariants.
    """
    u = sp.Symbol(symbol, real=True) if isinstance(symbol, str) else symbol
    x = [parse_expr(e, u) for e in x_exprs]
    y = [parse_expr(e, u) for e in y_exprs]
    x2 = sum(e * e for e in x)
    if sf.is_euclidean:
        a_ex = [sp.Integer(0)] + x
    elif sf.kind == "sphere":
        a_ex = [sp.sqrt(_sym(sf.r) ** 2 - x2)] + x
    else:
        a_ex = [sp.sqrt(_sym(sf.r) ** 2 + x2)] + x
    return custom_surface(sf, a_ex, [sp.Integer(0)] + y, u_domain, v_domain, u)
