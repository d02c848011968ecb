"""Curves and vector fields along curves in the embedded space-form models."""
from math import factorial
from typing import NamedTuple, Optional

import numpy as np
import sympy as sp
from scipy import integrate, optimize

from .ambient import SpaceForm, gauss_correction, vector_product
from .errors import DegenerateCurve, NotUnit, UnsupportedModel

MAX_ORDER = 4

# central-difference steps per derivative order, scaled by max(1, |u|);
# each balances truncation against round-off for its stencil
_FD_STEP = {1: 1e-5, 2: 1e-4, 3: 1e-3, 4: 2e-3}


def _fd(f, u, k):
    h = _FD_STEP[k] * max(1.0, abs(u))
    if k == 1:
        return (f(u + h) - f(u - h)) / (2 * h)
    if k == 2:
        return (f(u + h) - 2 * f(u) + f(u - h)) / (h * h)
    if k == 3:
        return (f(u + 2 * h) - 2 * f(u + h) + 2 * f(u - h) - f(u - 2 * h)) / (2 * h ** 3)
    return (f(u + 2 * h) - 4 * f(u + h) + 6 * f(u) - 4 * f(u - h) + f(u - 2 * h)) / h ** 4


class VectorFunction:
    """u -> R^4 together with its derivatives.

    ``derivatives`` maps an order k (1..4) to an analytic evaluator. Missing
    orders fall back to central finite differences of the next lower order
    that is available analytically.
    """

    def __init__(self, func, derivatives=None, domain=(-np.inf, np.inf)):
        self._func = func
        if derivatives is None:
            derivatives = {}
        elif not isinstance(derivatives, dict):
            derivatives = {k + 1: d for k, d in enumerate(derivatives)}
        self._derivs = dict(derivatives)
        lo, hi = domain
        self.domain = (float(lo), float(hi))

    def _eval(self, fn, u):
        u_arr = np.asarray(u, dtype=float)
        if u_arr.ndim == 0:
            return np.asarray(fn(float(u_arr)), dtype=float)
        out = np.asarray(fn(u_arr), dtype=float)
        if out.shape == u_arr.shape + (4,):
            return out
        return np.stack([np.asarray(fn(float(x)), dtype=float) for x in u_arr.ravel()]).reshape(u_arr.shape + (4,))

    def __call__(self, u):
        return self._eval(self._func, u)

    def has_analytic(self, k):
        return k in self._derivs

    def derivative(self, u, k=1):
        if k == 0:
            return self(u)
        if not 1 <= k <= MAX_ORDER:
            raise ValueError(f"derivative order must be in 0..{MAX_ORDER}")
        if k in self._derivs:
            return self._eval(self._derivs[k], u)
        # differentiate the highest analytic order below k
        base = max([j for j in self._derivs if j < k], default=0)
        g = (lambda x: self.derivative(x, base)) if base else self
        u_arr = np.asarray(u, dtype=float)
        if u_arr.ndim == 0:
            return _fd(lambda x: g(x), float(u_arr), k - base)
        return np.stack([_fd(lambda x: g(x), float(x), k - base) for x in u_arr.ravel()]).reshape(u_arr.shape + (4,))

    def jet(self, u, order=3):
        """Array of shape (order+1, ..., 4): value and derivatives at u."""
        return np.stack([self.derivative(u, k) for k in range(order + 1)])

    @classmethod
    def from_expressions(cls, exprs, symbol, domain=(-np.inf, np.inf), order=MAX_ORDER, **kwargs):
        """Build from four sympy expressions in ``symbol``; derivatives are exact."""
        # identify same-named symbols with ``symbol`` so that d/d(symbol) sees them
        exprs = [sp.sympify(e, locals={symbol.name: symbol}) for e in exprs]
        exprs = [e.subs({x: symbol for x in e.free_symbols if x.name == symbol.name and x != symbol})
                 for e in exprs]
        if len(exprs) != 4:
            raise ValueError("need exactly four component expressions")
        funcs = [_lambdify_vec(exprs, symbol)]
        cur = exprs
        for _ in range(order):
            cur = [sp.diff(e, symbol) for e in cur]
            funcs.append(_lambdify_vec(cur, symbol))
        derivs = {k: funcs[k] for k in range(1, order + 1)}
        obj = cls(funcs[0], derivs, domain, **kwargs)
        obj.expressions = exprs
        obj.symbol = symbol
        return obj


def _lambdify_vec(exprs, symbol):
    fn = sp.lambdify(symbol, list(exprs), "numpy", cse=True)

    def f(u):
        u = np.asarray(u, dtype=float)
        cols = [np.broadcast_to(np.asarray(c, dtype=float), u.shape) for c in fn(u)]
        return np.stack(cols, axis=-1)

    return f


class Curve(VectorFunction):
    """A curve in a space form, c(u) with ambient derivatives."""

    def __init__(self, func, derivatives=None, domain=(-np.inf, np.inf), sf=None, check=True):
        super().__init__(func, derivatives, domain)
        self.sf = sf
        if check and sf is not None:
            for u in _sample_domain(self.domain):
                sf.check_point(self(u))

    def speed(self, u):
        return self.sf.norm(self.derivative(u, 1))

    def covariant_jet(self, u):
        """(c', nabla_{c'} c', nabla_{c'} nabla_{c'} c') at u."""
        sf = self.sf
        c, d1, d2, d3 = self.jet(u, 3)
        K0 = sf.K0
        n1 = sf.inner(d1, d1)
        acc = d2 + K0 * n1 * c
        dacc = d3 + K0 * (2.0 * sf.inner(d1, d2) * c + n1 * d1)
        jerk = dacc + gauss_correction(d1, acc, c, sf)
        return d1, acc, jerk


class FrameField(VectorFunction):
    """Unit tangent vector field Z(u) along a base curve."""

    def __init__(self, base, func, derivatives=None, domain=None, check=True):
        super().__init__(func, derivatives, base.domain if domain is None else domain)
        self.base = base
        if check:
            sf = base.sf
            for u in _sample_domain(self.domain):
                Z = self(u)
                sf.check_tangent(base(u), Z)
                sf.check_unit(Z)

    @classmethod
    def from_expressions(cls, base, exprs, symbol, order=MAX_ORDER, check=True):
        tmp = VectorFunction.from_expressions(exprs, symbol, base.domain, order)
        obj = cls(base, tmp._func, tmp._derivs, check=check)
        obj.expressions = tmp.expressions
        obj.symbol = symbol
        return obj


def _sample_domain(domain, n=9):
    lo, hi = domain
    lo = lo if np.isfinite(lo) else -1.0
    hi = hi if np.isfinite(hi) else 1.0
    return np.linspace(lo, hi, n)


def curve_from_expressions(sf, exprs, symbol=None, domain=(-np.inf, np.inf), check=True):
    """Curve from sympy-parsable component expressions in one symbol."""
    if symbol is None:
        symbol = sp.Symbol("u", real=True)
    base = VectorFunction.from_expressions(exprs, symbol, domain)
    c = Curve(base._func, base._derivs, domain, sf, check=check)
    c.expressions = base.expressions
    c.symbol = symbol
    return c


# ---------------------------------------------------------------------------
# Frenet data


class FrenetData(NamedTuple):
    kappa: float
    tau: Optional[float]  # None where the binormal is undefined (kappa = 0)


def frenet_kappa_tau(c, u, sf=None, strict=False, tol=1e-9):
    """Curvature and torsion from covariant derivatives and the vector product.

    kappa = |g' x g''| / |g'|^3,  tau = <g' x g'', g'''> / |g' x g''|^2
    with g'' = nabla_{g'} g' and g''' = nabla_{g'} nabla_{g'} g'. Where the
    curve is a geodesic or has an inflection, tau is returned as None; pass
    ``strict=True`` to raise ``DegenerateCurve`` instead.
    """
    sf = sf or c.sf
    q = c(u)
    d1, acc, jerk = c.covariant_jet(u)
    speed = sf.norm(d1)
    if speed < 1e-12:
        raise DegenerateCurve(f"zero speed at u={u:g}")
    b = vector_product(d1, acc, q, sf, normalized=True, check=False)
    nb2 = sf.inner(b, b)
    kappa = float(np.sqrt(max(nb2, 0.0)) / speed ** 3)
    if kappa <= tol * max(1.0, 1.0 / speed):
        if strict:
            raise DegenerateCurve(f"torsion undefined at u={u:g}: curvature vanishes")
        return FrenetData(kappa, None)
    tau = float(sf.inner(b, jerk) / nb2)
    return FrenetData(kappa, tau)


def frenet_normal(c, u, sf=None):
    """Principal normal N = nabla_T T / kappa of the unit tangent T."""
    sf = sf or c.sf
    d1, acc, _ = c.covariant_jet(u)
    s2 = sf.inner(d1, d1)
    # nabla_T T = (acc - <acc,T>T)/|c'|^2 with T = c'/|c'|
    T = d1 / np.sqrt(s2)
    nT = (acc - sf.inner(acc, T) * T) / s2
    k = sf.norm(nT)
    if k < 1e-12:
        raise DegenerateCurve(f"principal normal undefined at u={u:g}")
    return nT / k


# ---------------------------------------------------------------------------
# helices


def helix_expressions(sf, omega, v, u):
    """Components of u -> lambda_u(beta(v)), the orbit of a helicoidal motion."""
    r = sp.nsimplify(sf.r) if float(sf.r).is_integer() else sp.Float(sf.r)
    w = sp.Float(omega) if not float(omega).is_integer() else sp.Integer(int(omega))
    v = sp.Float(v)
    if sf.kind == "hyperbolic":
        return [r * sp.cosh(v / r) * sp.cosh(u / r), r * sp.cosh(v / r) * sp.sinh(u / r),
                r * sp.sinh(v / r) * sp.cos(w * u), r * sp.sinh(v / r) * sp.sin(w * u)]
    if sf.kind == "sphere":
        return [r * sp.cos(v / r) * sp.cos(u / r), r * sp.cos(v / r) * sp.sin(u / r),
                r * sp.sin(v / r) * sp.cos(w * u), r * sp.sin(v / r) * sp.sin(w * u)]
    raise UnsupportedModel("helix() covers S^3 and H^3; use euclidean_helix() in E^3")


def helix(sf, omega, v, domain=(-np.inf, np.inf)):
    u = sp.Symbol("u", real=True)
    return curve_from_expressions(sf, helix_expressions(sf, omega, v, u), u, domain)


def euclidean_helix(radius, pitch, domain=(-np.inf, np.inf)):
    """(0, a cos u, a sin u, b u) in the x1 = 0 model of E^3."""
    u = sp.Symbol("u", real=True)
    a, b = sp.Float(radius), sp.Float(pitch)
    return curve_from_expressions(SpaceForm.euclidean(), [0, a * sp.cos(u), a * sp.sin(u), b * u], u, domain)


def helix_closed_form(sf, omega, v):
    """Closed-form (kappa, tau) of the helix ``helix(sf, omega, v)``.

    With q = r^2 w^2:
        H^3(r): D = 1 - q + (1 + q) cosh(2v/r),
                kappa = (1 + q) sinh(2v/r) / (r D),   tau = 2 w / D
        S^3(r): D = 1 + q + (1 - q) cos(2v/r),
                kappa = |q - 1| |sin(2v/r)| / (r D), tau = 2 w / D
    """
    r = sf.r
    q = (r * omega) ** 2
    x = 2.0 * v / r
    if sf.kind == "hyperbolic":
        D = 1.0 - q + (1.0 + q) * np.cosh(x)
        return FrenetData(float(abs((1.0 + q) * np.sinh(x)) / (r * D)), float(2.0 * omega / D))
    if sf.kind == "sphere":
        D = 1.0 + q + (1.0 - q) * np.cos(x)
        return FrenetData(float(abs(q - 1.0) * abs(np.sin(x)) / (r * D)), float(2.0 * omega / D))
    raise UnsupportedModel("closed forms are given for S^3 and H^3")


# ---------------------------------------------------------------------------
# arc length


def arc_length(c, u0, u1):
    val, _ = integrate.quad(lambda x: float(c.speed(x)), u0, u1, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


class _ArcLengthCurve(Curve):
    def __init__(self, c, u_lo, u_hi, nodes):
        self.source = c
        self._u_lo = u_lo
        self._nodes = nodes
        knots = np.linspace(u_lo, u_hi, nodes + 1)
        cum = [0.0]
        for a, b in zip(knots[:-1], knots[1:]):
            cum.append(cum[-1] + arc_length(c, a, b))
        self._knots = knots
        self._cum = np.array(cum)
        super().__init__(self._value, {1: self._d1, 2: self._d2, 3: self._d3},
                         (0.0, self._cum[-1]), c.sf, check=False)

    def param(self, s):
        """Original parameter u(s)."""
        s = float(s)
        L = self._cum[-1]
        if s <= 0.0:
            return self._knots[0] if s > -1e-12 else self._knots[0] + s / float(self.source.speed(self._knots[0]))
        if s >= L:
            return self._knots[-1] + (s - L) / float(self.source.speed(self._knots[-1]))
        i = int(np.searchsorted(self._cum, s) - 1)
        i = min(max(i, 0), len(self._knots) - 2)
        a, b = self._knots[i], self._knots[i + 1]
        base = self._cum[i]
        return optimize.brentq(lambda x: base + arc_length(self.source, a, x) - s, a, b,
                               xtol=1e-14, rtol=4 * np.finfo(float).eps)

    def _chain(self, s):
        c = self.source
        sf = c.sf
        u = self.param(s)
        d1, d2, d3 = (c.derivative(u, k) for k in (1, 2, 3))
        sig = float(sf.norm(d1))
        sig1 = float(sf.inner(d1, d2)) / sig
        sig2 = (float(sf.inner(d2, d2) + sf.inner(d1, d3)) - sig1 ** 2) / sig
        us = 1.0 / sig
        uss = -sig1 / sig ** 3
        usss = (-sig2 / sig ** 3 + 3.0 * sig1 ** 2 / sig ** 4) / sig
        return u, d1, d2, d3, us, uss, usss

    def _value(self, s):
        return self.source(self.param(s))

    def _d1(self, s):
        u, d1, d2, d3, us, uss, usss = self._chain(s)
        return d1 * us

    def _d2(self, s):
        u, d1, d2, d3, us, uss, usss = self._chain(s)
        return d2 * us ** 2 + d1 * uss

    def _d3(self, s):
        u, d1, d2, d3, us, uss, usss = self._chain(s)
        return d3 * us ** 3 + 3.0 * d2 * us * uss + d1 * usss


def arc_length_reparametrize(c, domain=None, nodes=32):
    """Return the unit-speed reparametrization s -> c(u(s)), s starting at 0.

    s(u) is integrated with adaptive Gauss-Kronrod quadrature and inverted by
    bracketed root finding; derivatives follow from the chain rule.
    """
    lo, hi = domain if domain is not None else c.domain
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("arc-length reparametrization needs a bounded domain")
    probe = np.linspace(lo, hi, 4 * nodes + 1)
    speeds = np.array([float(c.speed(x)) for x in probe])
    if np.min(speeds) < 1e-10:
        k = int(np.argmin(speeds))
        raise DegenerateCurve(f"zero speed near u={probe[k]:g}")
    return _ArcLengthCurve(c, lo, hi, nodes)


def unit_tangent_field(c, check=True):
    """FrameField Z = c'/|c'| with derivatives up to order 2 by the chain rule."""
    sf = c.sf

    def parts(u):
        d1, d2, d3 = (c.derivative(u, k) for k in (1, 2, 3))
        sig = sf.norm(d1)[..., None]
        sig1 = sf.inner(d1, d2)[..., None] / sig
        sig2 = ((sf.inner(d2, d2) + sf.inner(d1, d3))[..., None] - sig1 ** 2) / sig
        return d1, d2, d3, sig, sig1, sig2

    def f0(u):
        d1 = c.derivative(u, 1)
        return d1 / sf.norm(d1)[..., None]

    def f1(u):
        d1, d2, d3, sig, sig1, sig2 = parts(u)
        return d2 / sig - d1 * sig1 / sig ** 2

    def f2(u):
        d1, d2, d3, sig, sig1, sig2 = parts(u)
        return d3 / sig - 2.0 * d2 * sig1 / sig ** 2 - d1 * sig2 / sig ** 2 + 2.0 * d1 * sig1 ** 2 / sig ** 3

    return FrameField(c, f0, {1: f1, 2: f2}, check=check)


def check_unit_speed(c, samples, tol=1e-6):
    dev = max(abs(float(c.speed(s)) - 1.0) for s in samples)
    if dev > tol:
        raise NotUnit(f"curve speed deviates from 1 by {dev:.3e}")
    return dev


# ---------------------------------------------------------------------------
# Taylor-jet arithmetic: exact derivatives of products, quotients and roots
# without symbolic expression growth. Jets carry Taylor coefficients
# f^(k)/k! along the leading axis.


def _to_taylor(derivs):
    d = np.asarray(derivs, dtype=float)
    fac = np.array([factorial(k) for k in range(d.shape[0])], dtype=float)
    return d / fac.reshape((-1,) + (1,) * (d.ndim - 1))


def _from_taylor(coef):
    fac = np.array([factorial(k) for k in range(coef.shape[0])], dtype=float)
    return coef * fac.reshape((-1,) + (1,) * (coef.ndim - 1))


def jet_mul(a, b):
    """Product of scalar (or broadcastable) Taylor jets."""
    n = min(a.shape[0], b.shape[0])
    out = np.zeros(np.broadcast_shapes(a[0].shape, b[0].shape))
    res = []
    for k in range(n):
        acc = np.zeros_like(out)
        for j in range(k + 1):
            acc = acc + a[j] * b[k - j]
        res.append(acc)
    return np.stack(res)


def jet_inner(sf, A, B):
    n = min(A.shape[0], B.shape[0])
    return np.stack([sum(sf.inner(A[j], B[k - j]) for j in range(k + 1)) for k in range(n)])


def jet_recip(a):
    r = [1.0 / a[0]]
    for k in range(1, a.shape[0]):
        r.append(-sum(a[j] * r[k - j] for j in range(1, k + 1)) / a[0])
    return np.stack(r)


def jet_sqrt(a):
    s = [np.sqrt(a[0])]
    for k in range(1, a.shape[0]):
        s.append((a[k] - sum(s[j] * s[k - j] for j in range(1, k))) / (2.0 * s[0]))
    return np.stack(s)


def jet_scale(c, V):
    """Scalar jet times vector jet."""
    return jet_mul(c[..., None], V)


def tangent_unit_jet(sf, alpha_jet, Y_jet):
    """Jet of Y projected to the tangent space at alpha and normalized.

    Both inputs are derivative jets (value, first, second, ...) of shape
    (k+1, ..., 4); the result has the same layout.
    """
    A = _to_taylor(alpha_jet)
    Y = _to_taylor(Y_jet)
    if sf.is_euclidean:
        n = np.zeros_like(A)
        n[0, ..., 0] = 1.0
    else:
        n = A / sf.r
    coef = jet_mul(jet_inner(sf, Y, n), jet_recip(jet_inner(sf, n, n)))
    P = Y - jet_scale(coef, n)
    Z = jet_scale(jet_recip(jet_sqrt(jet_inner(sf, P, P))), P)
    return _from_taylor(Z)


class JetField(FrameField):
    """Frame field defined through a jet function u -> (Z, Z', ..., Z^(k))."""

    def __init__(self, base, jet_fn, order, check=True):
        self._jet_fn = jet_fn
        self._order = order
        derivs = {k: (lambda u, k=k: self._jet_fn(u)[k]) for k in range(1, order + 1)}
        super().__init__(base, lambda u: self._jet_fn(u)[0], derivs, check=check)

    def jet(self, u, order=3):
        if order <= self._order:
            return self._jet_fn(u)[: order + 1]
        return super().jet(u, order)


def normalized_field(base, Y, order=3, check=True):
    """Unit tangent field along ``base`` obtained by projecting and normalizing Y."""
    sf = base.sf

    def jet_fn(u):
        return tangent_unit_jet(sf, base.jet(u, order), Y.jet(u, order))

    return JetField(base, jet_fn, order, check=check)
