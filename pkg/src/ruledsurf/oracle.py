"""Independent verification paths.

Nothing here imports ``ruledsurf.ruled``: the oracles only see point
evaluators (u, v) -> R^4 or chart coordinates, so they cannot share a bug
with the closed-form fundamental forms they are used to check.
"""
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _kernels
from .ambient import det4
from .errors import BoundaryNode, StepFailure

FD_STEP = 1e-3


def _d5(f, t, h):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def _d5_second(f, t, h):
    return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h)


# ---------------------------------------------------------------------------
# metric grids and Brioschi


@dataclass
class GridSample:
    u: np.ndarray
    v: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    hu: float = field(init=False)
    hv: float = field(init=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        du, dv = np.diff(self.u), np.diff(self.v)
        if len(du) == 0 or len(dv) == 0:
            raise ValueError("grid needs at least two nodes per direction")
        if np.any(du <= 0) or np.any(dv <= 0):
            raise ValueError("grid spacing must be positive")
        if not (np.allclose(du, du[0], rtol=1e-9) and np.allclose(dv, dv[0], rtol=1e-9)):
            raise ValueError("grid must be uniform")
        self.hu, self.hv = float(du[0]), float(dv[0])
        shape = (len(self.u), len(self.v))
        for name in ("E", "F", "G"):
            if np.shape(getattr(self, name)) != shape:
                raise ValueError(f"{name} must have shape {shape}")

    @property
    def det(self):
        return self.E * self.G - self.F ** 2

    def is_interior(self, i, j):
        nu, nv = self.E.shape
        return 2 <= i < nu - 2 and 2 <= j < nv - 2


def sample_metric_grid(point, inner, u, v, h=FD_STEP):
    """First fundamental form on the lattice u x v from 5-point differences of ``point``.

    ``point(U, V)`` must broadcast over arrays and return (..., 4) (or any
    trailing dimension understood by ``inner``).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    U, V = np.meshgrid(u, v, indexing="ij")
    pu = _d5(lambda t: point(t, V), U, h)
    pv = _d5(lambda t: point(U, t), V, h)
    return GridSample(u, v, inner(pu, pu), inner(pu, pv), inner(pv, pv))


def brioschi_grid(grid):
    """Brioschi intrinsic curvature at every node (NaN on the two-node boundary)."""
    return _kernels.brioschi_grid(grid.E, grid.F, grid.G, grid.hu, grid.hv)


def brioschi_K_int(grid, node):
    i, j = node
    if not grid.is_interior(i, j):
        raise BoundaryNode(f"node {node} lacks a full 5-point stencil")
    sl_u = slice(i - 2, i + 3)
    sl_v = slice(j - 2, j + 3)
    sub = _kernels.brioschi_grid(grid.E[sl_u, sl_v], grid.F[sl_u, sl_v], grid.G[sl_u, sl_v], grid.hu, grid.hv)
    return float(sub[2, 2])


# ---------------------------------------------------------------------------
# finite-difference fundamental forms


def _null_normal(sf, p, pu, pv):
    """Unit vector orthogonal to p-normal, pu, pv, oriented so det(n, pu, pv, xi) > 0."""
    n = sf.normal(p)
    sig = sf.signature.diag
    M = np.stack([n * sig, pu * sig, pv * sig])
    _, _, vt = np.linalg.svd(M)
    w = vt[-1]
    w = w / np.sqrt(abs(sf.inner(w, w)))
    if det4(n, pu, pv, w) < 0:
        w = -w
    return w


def fd_fundamental_forms(point, sf, u, v, h=FD_STEP):
    """(g11, g12, g22, h11, h12, h22) at (u, v) from finite differences of ``point``.

    The unit normal is computed as a null vector, independently of any vector
    product; orientation matches xi = psi_u x psi_v / |psi_u x psi_v|.
    """
    P = lambda a, b: np.asarray(point(a, b), dtype=float)
    p = P(u, v)
    pu = _d5(lambda t: P(t, v), u, h)
    pv = _d5(lambda t: P(u, t), v, h)
    puu = _d5_second(lambda t: P(t, v), u, h)
    pvv = _d5_second(lambda t: P(u, t), v, h)
    puv = _d5(lambda s: _d5(lambda t: P(s, t), v, h), u, h)
    xi = _null_normal(sf, p, pu, pv)
    ip = sf.inner
    # the Gauss-formula correction K0 <X, Y> p is normal to the model, hence orthogonal to xi
    return (float(ip(pu, pu)), float(ip(pu, pv)), float(ip(pv, pv)),
            float(ip(puu, xi)), float(ip(puv, xi)), float(ip(pvv, xi)))


def fd_extrinsic_curvature(point, sf, u, v, h=FD_STEP):
    g11, g12, g22, h11, h12, h22 = fd_fundamental_forms(point, sf, u, v, h)
    return (h11 * h22 - h12 * h12) / (g11 * g22 - g12 * g12)


# ---------------------------------------------------------------------------
# parallel transport by fixed-step RK4


@dataclass
class TransportResult:
    u: np.ndarray
    Z: np.ndarray
    dZ: np.ndarray
    drift: float  # max |<Z,Z> - <Z0,Z0>| per unit parameter
    step: float

    def __call__(self, s):
        return CubicHermiteSpline(self.u, self.Z, self.dZ, axis=0)(s)


def _transport_matrices(curve, sf, metric, us):
    if metric is None:
        K0 = sf.K0
        sig = sf.signature.diag
        q = np.asarray(curve(us))
        d1 = np.asarray(curve.derivative(us, 1))
        # Z' = -K0 <alpha', Z> alpha
        return -K0 * np.einsum("ni,nj->nij", q, d1 * sig)
    from .tensor import christoffel

    h = 1e-5
    out = []
    for s in us:
        x = np.asarray(curve(s), dtype=float)
        dx = (np.asarray(curve(s + h)) - np.asarray(curve(s - h))) / (2 * h)
        Gam = christoffel(metric, x)
        # Z'^k = -Gamma^k_ij x'^i Z^j
        out.append(-np.einsum("kij,i->kj", Gam, dx))
    return np.array(out)


def rk4_parallel_transport(curve, Z0, u0, u1, sf=None, metric=None, h=1e-3, drift_tol=1e-8):
    """Integrate nabla_{c'} Z = 0 with fixed-step RK4, one halving retry.

    Works for embedded space forms (pass ``sf``) or chart metrics (pass
    ``metric`` and a curve returning chart coordinates).
    """
    if (sf is None) == (metric is None):
        raise ValueError("pass exactly one of sf or metric")
    Z0 = np.asarray(Z0, dtype=float)
    length = abs(u1 - u0)
    if length == 0:
        return TransportResult(np.array([u0]), Z0[None], np.zeros((1, len(Z0))), 0.0, h)

    def norm2(Z, s):
        if metric is None:
            return sf.inner(Z, Z)
        G = np.stack([metric.metric(curve(x), check=False) for x in s])
        return np.einsum("ni,nij,nj->n", Z, G, Z)

    step = h
    for attempt in range(2):
        n = max(1, int(np.ceil(length / step)))
        hs = (u1 - u0) / n
        half = u0 + 0.5 * hs * np.arange(2 * n + 1)
        M = _transport_matrices(curve, sf, metric, half)
        Z = _kernels.rk4_linear(M, Z0, hs)
        us = half[::2]
        n2 = norm2(Z, us)
        drift = float(np.max(np.abs(n2 - n2[0])) / length)
        if np.all(np.isfinite(Z)) and drift < drift_tol:
            dZ = np.einsum("nij,nj->ni", M[::2], Z)
            if hs < 0:
                us, Z, dZ = us[::-1], Z[::-1], dZ[::-1]
            return TransportResult(us, Z, dZ, drift, abs(hs))
        step = step / 2
    raise StepFailure(f"parallel transport drift {drift:.3e} exceeds {drift_tol:g} after step halving")


# ---------------------------------------------------------------------------
# Euclidean limits


def fit_convergence_order(radii, errors):
    """Least-squares slope p of log(error) = c - p log(r)."""
    r = np.log(np.asarray(radii, dtype=float))
    e = np.log(np.maximum(np.asarray(errors, dtype=float), 1e-300))
    p = np.polyfit(r, e, 1)[0]
    return float(-p)


@dataclass
class LimitReport:
    radii: Sequence[float]
    errors: Dict[str, list]
    orders: Dict[str, float]
    threshold: float

    @property
    def passed(self):
        return all(o >= self.threshold for o in self.orders.values())


def euclidean_limit_suite(family, reference, radii=(1e2, 1e3, 1e4), threshold=1.8):
    """Convergence of space-form quantities to their Euclidean values as r grows.

    ``family(r)`` returns a dict name -> array of values computed on a space
    form of radius r; ``reference`` maps the same names to the Euclidean
    closed-form values. Errors are max absolute differences.
    """
    errors = {k: [] for k in reference}
    for r in radii:
        vals = family(r)
        for k, ref in reference.items():
            errors[k].append(float(np.max(np.abs(np.asarray(vals[k]) - np.asarray(ref)))))
    orders = {k: fit_convergence_order(radii, e) for k, e in errors.items()}
    return LimitReport(list(radii), errors, orders, threshold)
