"""Embedded models of the 3d space forms.

Every point and tangent vector is a 4-vector. The sphere S^3(r) and the
hyperbolic space H^3(r) are the usual quadrics in E^4 and E^4_1; Euclidean
3-space is modelled as the hyperplane x1 = 0 of E^4 so that all three cases
share one code path.

The three cases differ only through the "model functions"::

    K0      curvature (+1/r^2, -1/r^2, 0)
    C(v)    cos(v/r), cosh(v/r), 1
    S(v)    r sin(v/r), r sinh(v/r), v

with dC/dv = -K0 S, dS/dv = C and C^2 + K0 S^2 = 1. The geodesic through p
with unit velocity Z is C(v) p + S(v) Z in every model.
"""
import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NotOnManifold, NotTangent, NotUnit, UnsupportedModel

#: relative tolerance for on-manifold / tangency / unit checks
TOL = 1e-8


class Signature(enum.Enum):
    EUCLIDEAN4 = "euclidean4"
    LORENTZ4 = "lorentz4"

    @property
    def diag(self):
        if self is Signature.LORENTZ4:
            return np.array([-1.0, 1.0, 1.0, 1.0])
        return np.ones(4)

    @property
    def lorentz(self):
        return self is Signature.LORENTZ4


def as_vector(x):
    """Validate and convert to a float array whose last axis has length 4."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected 4 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def basis(i):
    """Canonical basis vector e_i, 1-based like the usual coordinates x1..x4."""
    e = np.zeros(4)
    e[i - 1] = 1.0
    return e


def inner(X, Y, s=Signature.EUCLIDEAN4):
    """<X, Y> for the given signature; broadcasts over leading axes."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    prod = X * Y
    if s is Signature.LORENTZ4:
        return prod[..., 1:].sum(axis=-1) - prod[..., 0]
    return prod.sum(axis=-1)


def ternary_product(u, v, w, s=Signature.EUCLIDEAN4):
    """Formal determinant with rows u, v, w and the basis row (e1..e4).

    In the Lorentzian case the basis row is (-e1, e2, e3, e4), which makes
    <u x v x w, W> = det(u, v, w, W) hold for both signatures.
    """
    u, v, w = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (u, v, w)))
    shape = u.shape
    out = _kernels.ternary(u.reshape(-1, 4), v.reshape(-1, 4), w.reshape(-1, 4),
                           s is Signature.LORENTZ4)
    return out.reshape(shape)


def det4(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c, d)))
    shape = a.shape[:-1]
    out = _kernels.det4(a.reshape(-1, 4), b.reshape(-1, 4), c.reshape(-1, 4), d.reshape(-1, 4))
    return out.reshape(shape)


@dataclass(frozen=True)
class SpaceForm:
    kind: str
    r: float = float("inf")

    def __post_init__(self):
        if self.kind not in ("euclidean", "sphere", "hyperbolic"):
            raise UnsupportedModel(f"unknown space form {self.kind!r}")
        if self.kind != "euclidean":
            r = float(self.r)
            if not (np.isfinite(r) and r > 0):
                raise ValueError("radius must be a positive finite number")
            object.__setattr__(self, "r", r)
        else:
            object.__setattr__(self, "r", float("inf"))

    @classmethod
    def euclidean(cls):
        return cls("euclidean")

    @classmethod
    def sphere(cls, r=1.0):
        return cls("sphere", r)

    @classmethod
    def hyperbolic(cls, r=1.0):
        return cls("hyperbolic", r)

    @property
    def K0(self):
        if self.kind == "sphere":
            return 1.0 / self.r ** 2
        if self.kind == "hyperbolic":
            return -1.0 / self.r ** 2
        return 0.0

    @property
    def signature(self):
        return Signature.LORENTZ4 if self.kind == "hyperbolic" else Signature.EUCLIDEAN4

    @property
    def is_euclidean(self):
        return self.kind == "euclidean"

    def __str__(self):
        if self.is_euclidean:
            return "E3"
        return f"{'S3' if self.kind == 'sphere' else 'H3'}({self.r:g})"

    def inner(self, X, Y):
        return inner(X, Y, self.signature)

    def norm(self, X):
        return np.sqrt(np.maximum(self.inner(X, X), 0.0))

    def cs(self, v):
        """(C(v), S(v)) model functions."""
        v = np.asarray(v, dtype=float)
        if self.kind == "sphere":
            return np.cos(v / self.r), self.r * np.sin(v / self.r)
        if self.kind == "hyperbolic":
            return np.cosh(v / self.r), self.r * np.sinh(v / self.r)
        return np.ones_like(v), v.copy()

    def base_point(self):
        """A fixed reference point: r e1 on the quadrics, the origin in E^3."""
        if self.is_euclidean:
            return np.zeros(4)
        return self.r * basis(1)

    def normal(self, q):
        """Unit normal of the model hypersurface at q (q/r, or e1 for E^3)."""
        q = np.asarray(q, dtype=float)
        if self.is_euclidean:
            return np.broadcast_to(basis(1), q.shape).copy()
        return q / self.r

    # -- checks --------------------------------------------------------

    def quadric_residual(self, q):
        """Relative violation of the defining constraint at q."""
        q = np.asarray(q, dtype=float)
        if self.kind == "sphere":
            return np.abs(inner(q, q) - self.r ** 2) / self.r ** 2
        if self.kind == "hyperbolic":
            res = np.abs(inner(q, q, Signature.LORENTZ4) + self.r ** 2) / self.r ** 2
            return np.where(q[..., 0] > 0, res, np.inf)
        return np.abs(q[..., 0]) / np.maximum(1.0, np.linalg.norm(q, axis=-1))

    def check_point(self, q, tol=TOL):
        q = as_vector(q)
        res = np.max(self.quadric_residual(q))
        if not res <= tol:
            raise NotOnManifold(f"point not on {self}: relative residual {res:.3e}")
        return q

    def tangent_residual(self, q, X):
        n = self.normal(q)
        scale = np.maximum(np.linalg.norm(X, axis=-1), 1.0)
        return np.abs(self.inner(X, n)) / scale

    def check_tangent(self, q, X, tol=TOL):
        X = as_vector(X)
        res = np.max(self.tangent_residual(q, X))
        if not res <= tol:
            raise NotTangent(f"vector not tangent to {self}: residual {res:.3e}")
        return X

    def check_unit(self, X, tol=TOL):
        res = np.max(np.abs(self.inner(X, X) - 1.0))
        if not res <= tol:
            raise NotUnit(f"vector not of unit length: |<Z,Z> - 1| = {res:.3e}")
        return X

    def project_tangent(self, q, X):
        """Remove the normal component of X at q."""
        n = self.normal(q)
        nn = self.inner(n, n)
        return X - (self.inner(X, n) / nn)[..., None] * n


def vector_product(X, Y, q, sf, normalized=False, check=True):
    """X x Y at q, defined by <X x Y, W> = det(q, X, Y, W).

    With ``normalized=True`` the unit normal q/r replaces q, which is the
    orientation-preserving product of the tangent space (the one used for
    surface normals and mixed products). In E^3 both variants use e1.
    """
    if check:
        sf.check_point(q)
        sf.check_tangent(q, X)
        sf.check_tangent(q, Y)
    n = sf.normal(q) if (normalized or sf.is_euclidean) else np.asarray(q, dtype=float)
    return ternary_product(X, Y, n, sf.signature)


def mixed_product(X, Y, W, q, sf):
    """(X, Y, W) = <X x Y, W> with the unit-normal product at q."""
    return det4(sf.normal(q), X, Y, W)


def exp_map(p, Z, v, sf, check=True):
    """exp_p(vZ) = C(v) p + S(v) Z. Broadcasts over v."""
    if check:
        sf.check_point(p)
        sf.check_tangent(p, Z)
        sf.check_unit(Z)
    C, S = sf.cs(v)
    p = np.asarray(p, dtype=float)
    Z = np.asarray(Z, dtype=float)
    return C[..., None] * p + S[..., None] * Z


def parallel_transport_along_ruling(p, Z, v, sf, check=True):
    """d/dv exp_p(vZ) = -K0 S(v) p + C(v) Z, the transport of Z along the ruling."""
    if check:
        sf.check_point(p)
        sf.check_tangent(p, Z)
        sf.check_unit(Z)
    C, S = sf.cs(v)
    p = np.asarray(p, dtype=float)
    Z = np.asarray(Z, dtype=float)
    return (-sf.K0 * S)[..., None] * p + C[..., None] * Z


def gauss_correction(X, Y, q, sf):
    """The K0 <X, Y> q term turning an ambient derivative into a covariant one."""
    return (sf.K0 * sf.inner(X, Y))[..., None] * np.asarray(q, dtype=float)


def _fd_first(f, u):
    h = max(1e-5, 1e-5 * abs(u))
    return (np.asarray(f(u + h)) - np.asarray(f(u - h))) / (2.0 * h)


def covariant_derivative(Yfield, curve, u, sf, check=True):
    """nabla_{c'} Y at c(u) via the Gauss formula Y' + K0 <c', Y> c.

    ``Yfield`` is either a callable u -> Y(u) or an object with a
    ``derivative(u, k)`` method (a ``FrameField`` or ``Curve``). The curve
    supplies c(u) and c'(u) through ``curve(u)`` and ``curve.derivative(u, 1)``.
    """
    q = np.asarray(curve(u), dtype=float)
    X = np.asarray(curve.derivative(u, 1), dtype=float)
    Y = np.asarray(Yfield(u), dtype=float)
    if check:
        sf.check_tangent(q, Y)
    if hasattr(Yfield, "derivative"):
        dY = np.asarray(Yfield.derivative(u, 1), dtype=float)
    else:
        dY = _fd_first(Yfield, u)
    return dY + gauss_correction(X, Y, q, sf)
