"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public names at the bottom dispatch on ``_accel.NUMBA_ENABLED``. Both
flavours are importable directly (``*_numba`` / ``*_numpy``) so tests can
check parity and ``benchmarks/bench_kernels.py`` can time them side by side.

Column layout of the per-ruling invariant table consumed by ``forms_grid``::

    0 |alpha'|^2   1 <alpha',Z>   2 <alpha',DZ>   3 <DZ,DZ>
    4 (alpha',Z,DZ)   5 (Dalpha',alpha',Z)   6 (Dalpha',DZ,Z)
    7 (D^2Z,alpha',Z)   8 (D^2Z,DZ,Z)

Output layout of ``forms_grid``: g11, g12, g_det, h11, h12, K_ext, H.
"""
import numpy as np

from ._accel import NUMBA_ENABLED, njit

N_INVARIANTS = 9
N_FORMS = 7


# --------------------------------------------------------------------------
# 4x4 determinants and the ternary product


def det4_numpy(a, b, c, d):
    return np.linalg.det(np.stack([a, b, c, d], axis=-2))


@njit
def _det3(m00, m01, m02, m10, m11, m12, m20, m21, m22):
    return (m00 * (m11 * m22 - m12 * m21)
            - m01 * (m10 * m22 - m12 * m20)
            + m02 * (m10 * m21 - m11 * m20))


@njit
def det4_numba(a, b, c, d):
    n = a.shape[0]
    out = np.empty(n)
    for k in range(n):
        acc = 0.0
        for j in range(4):
            # expand along the first row
            cols = [0, 0, 0]
            p = 0
            for jj in range(4):
                if jj != j:
                    cols[p] = jj
                    p += 1
            minor = _det3(b[k, cols[0]], b[k, cols[1]], b[k, cols[2]],
                          c[k, cols[0]], c[k, cols[1]], c[k, cols[2]],
                          d[k, cols[0]], d[k, cols[1]], d[k, cols[2]])
            sign = 1.0 if j % 2 == 0 else -1.0
            acc += sign * a[k, j] * minor
        out[k] = acc
    return out


_MINOR_COLS = [[c for c in range(4) if c != j] for j in range(4)]


def ternary_numpy(u, v, w, lorentz):
    rows = np.stack([u, v, w], axis=-2)
    out = np.empty(u.shape)
    for j, cols in enumerate(_MINOR_COLS):
        out[..., j] = (-1.0) ** (3 + j) * np.linalg.det(rows[..., :, cols])
    if lorentz:
        out[..., 0] = -out[..., 0]
    return out


@njit
def ternary_numba(u, v, w, lorentz):
    n = u.shape[0]
    out = np.empty((n, 4))
    for k in range(n):
        for j in range(4):
            cols = [0, 0, 0]
            p = 0
            for jj in range(4):
                if jj != j:
                    cols[p] = jj
                    p += 1
            minor = _det3(u[k, cols[0]], u[k, cols[1]], u[k, cols[2]],
                          v[k, cols[0]], v[k, cols[1]], v[k, cols[2]],
                          w[k, cols[0]], w[k, cols[1]], w[k, cols[2]])
            sign = 1.0 if (3 + j) % 2 == 0 else -1.0
            out[k, j] = sign * minor
        if lorentz:
            out[k, 0] = -out[k, 0]
    return out


# --------------------------------------------------------------------------
# fundamental forms on a (u, v) grid


def forms_grid_numpy(inv, C, S, K0):
    na, a, b, m, t0, t1, t2, t3, t4 = (inv[:, i, None] for i in range(N_INVARIANTS))
    C = C[None, :]
    S = S[None, :]
    g11 = C * C * na + 2.0 * C * S * b + S * S * m + K0 * S * S * a * a
    g12 = np.broadcast_to(a, g11.shape)
    g = g11 - a * a
    with np.errstate(invalid="ignore", divide="ignore"):
        sg = np.where(g > 0.0, np.sqrt(np.where(g > 0.0, g, 1.0)), np.nan)
        h12 = t0 / sg
        h11 = (C * C * t1 + C * S * (t2 + t3) + S * S * t4 + K0 * a * S * S * t0) / sg
        K = -(t0 * t0) / (g * g)
        H = (h11 - 2.0 * h12 * a) / (2.0 * g)
    K = np.where(np.isnan(sg), np.nan, K)
    return np.stack([g11, g12, g, h11, h12, K, H], axis=-1)


@njit
def forms_grid_numba(inv, C, S, K0):
    nu = inv.shape[0]
    nv = C.shape[0]
    out = np.empty((nu, nv, N_FORMS))
    for i in range(nu):
        na = inv[i, 0]
        a = inv[i, 1]
        b = inv[i, 2]
        m = inv[i, 3]
        t0 = inv[i, 4]
        t1 = inv[i, 5]
        t23 = inv[i, 6] + inv[i, 7]
        t4 = inv[i, 8]
        for j in range(nv):
            c = C[j]
            s = S[j]
            g11 = c * c * na + 2.0 * c * s * b + s * s * m + K0 * s * s * a * a
            g = g11 - a * a
            out[i, j, 0] = g11
            out[i, j, 1] = a
            out[i, j, 2] = g
            if g > 0.0:
                sg = np.sqrt(g)
                h12 = t0 / sg
                h11 = (c * c * t1 + c * s * t23 + s * s * t4 + K0 * a * s * s * t0) / sg
                out[i, j, 3] = h11
                out[i, j, 4] = h12
                out[i, j, 5] = -(t0 * t0) / (g * g)
                out[i, j, 6] = (h11 - 2.0 * h12 * a) / (2.0 * g)
            else:
                out[i, j, 3] = np.nan
                out[i, j, 4] = np.nan
                out[i, j, 5] = np.nan
                out[i, j, 6] = np.nan
    return out


# --------------------------------------------------------------------------
# Brioschi intrinsic curvature from sampled metric coefficients


def _d1(f, axis, h):
    sl = [slice(None)] * f.ndim

    def at(k):
        s = list(sl)
        n = f.shape[axis]
        s[axis] = slice(2 + k, n - 2 + k)
        return f[tuple(s)]

    return (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)


def _d2(f, axis, h):
    sl = [slice(None)] * f.ndim

    def at(k):
        s = list(sl)
        n = f.shape[axis]
        s[axis] = slice(2 + k, n - 2 + k)
        return f[tuple(s)]

    return (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h * h)


def _crop(f, axis):
    s = [slice(None)] * f.ndim
    s[axis] = slice(2, f.shape[axis] - 2)
    return f[tuple(s)]


def brioschi_grid_numpy(E, F, G, hu, hv):
    out = np.full(E.shape, np.nan)
    if E.shape[0] < 5 or E.shape[1] < 5:
        return out

    def du(f):
        return _crop(_d1(f, 0, hu), 1)

    def dv(f):
        return _crop(_d1(f, 1, hv), 0)

    Eu, Ev, Fu, Fv, Gu, Gv = du(E), dv(E), du(F), dv(F), du(G), dv(G)
    Evv = _crop(_d2(E, 1, hv), 0)
    Guu = _crop(_d2(G, 0, hu), 1)
    Fuv = _d1(_d1(F, 1, hv), 0, hu)
    e, f, g = _crop(_crop(E, 0), 1), _crop(_crop(F, 0), 1), _crop(_crop(G, 0), 1)

    a11 = -0.5 * Evv + Fuv - 0.5 * Guu
    det1 = (a11 * (e * g - f * f)
            - 0.5 * Eu * ((Fv - 0.5 * Gu) * g - f * 0.5 * Gv)
            + (Fu - 0.5 * Ev) * ((Fv - 0.5 * Gu) * f - e * 0.5 * Gv))
    det2 = (-0.5 * Ev * (0.5 * Ev * g - f * 0.5 * Gu)
            + 0.5 * Gu * (0.5 * Ev * f - e * 0.5 * Gu))
    with np.errstate(divide="ignore", invalid="ignore"):
        W2 = (e * g - f * f) ** 2
        out[2:-2, 2:-2] = np.where(W2 != 0.0, (det1 - det2) / np.where(W2 != 0.0, W2, 1.0), np.nan)
    return out


@njit
def brioschi_grid_numba(E, F, G, hu, hv):
    nu, nv = E.shape
    out = np.full((nu, nv), np.nan)
    c1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    for i in range(2, nu - 2):
        for j in range(2, nv - 2):
            Eu = Ev = Fu = Fv = Gu = Gv = Evv = Guu = Fuv = 0.0
            for k in range(5):
                Eu += c1[k] * E[i + k - 2, j]
                Fu += c1[k] * F[i + k - 2, j]
                Gu += c1[k] * G[i + k - 2, j]
                Ev += c1[k] * E[i, j + k - 2]
                Fv += c1[k] * F[i, j + k - 2]
                Gv += c1[k] * G[i, j + k - 2]
                Guu += c2[k] * G[i + k - 2, j]
                Evv += c2[k] * E[i, j + k - 2]
                for l in range(5):
                    Fuv += c1[k] * c1[l] * F[i + k - 2, j + l - 2]
            Eu /= hu
            Fu /= hu
            Gu /= hu
            Ev /= hv
            Fv /= hv
            Gv /= hv
            Guu /= hu * hu
            Evv /= hv * hv
            Fuv /= hu * hv
            e = E[i, j]
            f = F[i, j]
            g = G[i, j]
            a11 = -0.5 * Evv + Fuv - 0.5 * Guu
            det1 = (a11 * (e * g - f * f)
                    - 0.5 * Eu * ((Fv - 0.5 * Gu) * g - f * 0.5 * Gv)
                    + (Fu - 0.5 * Ev) * ((Fv - 0.5 * Gu) * f - e * 0.5 * Gv))
            det2 = (-0.5 * Ev * (0.5 * Ev * g - f * 0.5 * Gu)
                    + 0.5 * Gu * (0.5 * Ev * f - e * 0.5 * Gu))
            W = e * g - f * f
            # degenerate metric (singular point): leave NaN
            if W != 0.0:
                out[i, j] = (det1 - det2) / (W * W)
    return out


# --------------------------------------------------------------------------
# fixed-step RK4 for linear systems z' = M(u) z


def rk4_linear_numpy(M, z0, h):
    n_steps = (M.shape[0] - 1) // 2
    out = np.empty((n_steps + 1, z0.shape[0]))
    z = np.array(z0, dtype=float)
    out[0] = z
    for k in range(n_steps):
        m0, mh, m1 = M[2 * k], M[2 * k + 1], M[2 * k + 2]
        k1 = m0 @ z
        k2 = mh @ (z + 0.5 * h * k1)
        k3 = mh @ (z + 0.5 * h * k2)
        k4 = m1 @ (z + h * k3)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = z
    return out


@njit
def rk4_linear_numba(M, z0, h):
    n_steps = (M.shape[0] - 1) // 2
    d = z0.shape[0]
    out = np.empty((n_steps + 1, d))
    z = z0.copy()
    out[0] = z
    tmp = np.empty(d)
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    for k in range(n_steps):
        i0 = 2 * k
        for a in range(d):
            acc = 0.0
            for b in range(d):
                acc += M[i0, a, b] * z[b]
            k1[a] = acc
        for a in range(d):
            tmp[a] = z[a] + 0.5 * h * k1[a]
        for a in range(d):
            acc = 0.0
            for b in range(d):
                acc += M[i0 + 1, a, b] * tmp[b]
            k2[a] = acc
        for a in range(d):
            tmp[a] = z[a] + 0.5 * h * k2[a]
        for a in range(d):
            acc = 0.0
            for b in range(d):
                acc += M[i0 + 1, a, b] * tmp[b]
            k3[a] = acc
        for a in range(d):
            tmp[a] = z[a] + h * k3[a]
        for a in range(d):
            acc = 0.0
            for b in range(d):
                acc += M[i0 + 2, a, b] * tmp[b]
            k4[a] = acc
        for a in range(d):
            z[a] += (h / 6.0) * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            out[k + 1, a] = z[a]
    return out


# --------------------------------------------------------------------------
# dispatch

IMPLEMENTATIONS = {
    "numpy": {
        "det4": det4_numpy,
        "ternary": ternary_numpy,
        "forms_grid": forms_grid_numpy,
        "brioschi_grid": brioschi_grid_numpy,
        "rk4_linear": rk4_linear_numpy,
    },
    "numba": {
        "det4": det4_numba,
        "ternary": ternary_numba,
        "forms_grid": forms_grid_numba,
        "brioschi_grid": brioschi_grid_numba,
        "rk4_linear": rk4_linear_numba,
    },
}

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def _pick(name):
    return IMPLEMENTATIONS[BACKEND][name]


def det4(a, b, c, d):
    a, b, c, d = (np.ascontiguousarray(np.atleast_2d(x), dtype=float) for x in (a, b, c, d))
    return _pick("det4")(a, b, c, d)


def ternary(u, v, w, lorentz=False):
    u, v, w = (np.ascontiguousarray(np.atleast_2d(x), dtype=float) for x in (u, v, w))
    return _pick("ternary")(u, v, w, bool(lorentz))


def forms_grid(inv, C, S, K0):
    inv = np.ascontiguousarray(inv, dtype=float)
    C = np.ascontiguousarray(C, dtype=float)
    S = np.ascontiguousarray(S, dtype=float)
    return _pick("forms_grid")(inv, C, S, float(K0))


def brioschi_grid(E, F, G, hu, hv):
    E, F, G = (np.ascontiguousarray(x, dtype=float) for x in (E, F, G))
    return _pick("brioschi_grid")(E, F, G, float(hu), float(hv))


def rk4_linear(M, z0, h):
    M = np.ascontiguousarray(M, dtype=float)
    z0 = np.ascontiguousarray(z0, dtype=float)
    return _pick("rk4_linear")(M, z0, float(h))
