"""Verification suites behind ``ruledsurf verify``.

Each suite runs a fixed, deterministic set of checks and returns a
SuiteResult; ``passed`` is true only if every check is within tolerance.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import oracle, ruled, tensor
from .ambient import SpaceForm
from .curve import frenet_kappa_tau, helix, helix_closed_form


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""
    op: str = "<"  # value op tol is the pass condition

    def to_dict(self):
        v = self.value
        return {"name": self.name, "value": None if v is None or not np.isfinite(v) else float(v),
                "tol": self.tol, "op": self.op, "passed": bool(self.passed), "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, value, tol, detail="", passed=None, op="<"):
        value = float(value)
        if passed is None:
            ok = value < tol if op == "<" else value >= tol
            passed = bool(np.isfinite(value) and ok)
        self.checks.append(Check(name, value, tol, passed, detail, op))

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def summary_lines(self):
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} "
                 f"({sum(c.passed for c in self.checks)}/{len(self.checks)})"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.value:.3e} (need {c.op} {c.tol:g})"
                         + (f"  {c.detail}" if c.detail else ""))
        return lines


# ---------------------------------------------------------------------------
# shared sample sets

CHART_SAMPLES = [np.array([0.7, 1.1, 0.4]), np.array([1.2, 0.9, 2.0]), np.array([2.0, 1.8, -1.0])]
PRODUCT_SAMPLES = [np.array([0.2, -0.1, 0.3]), np.array([0.4, 0.3, -0.5]), np.array([-0.3, 0.25, 1.0])]
THETA_GRID = [k * np.pi / 12 for k in range(7)]

#: Euclidean ruled surfaces (x(u), y(u)) lifted into S^3(r) / H^3(r) for the limit suite
LIMIT_FAMILIES = {
    "twisted": (["0.4*cos(u)", "0.4*sin(u)", "0.15*u"], ["cos(2*u)", "sin(2*u)", "0.5 + 0.2*u"]),
    "saddle": (["u", "0.3*u**2", "0"], ["0", "cos(u)", "sin(u)"]),
}
LIMIT_RADII = (1e2, 1e3, 1e4)


def spaceform_models():
    return [("S3", r, tensor.sphere3_chart(r), 1.0 / r ** 2) for r in (1.0, 2.0)] + \
           [("H3", r, tensor.hyperbolic3_chart(r), -1.0 / r ** 2) for r in (1.0, 2.0)]


def r1223_display_table(thetas=THETA_GRID, x=(0.2, -0.1, 0.3)):
    """(theta, closed-form, chart) values of R_1223 in the display convention on H^2 x R."""
    metric = tensor.h2xr_chart()
    rows = []
    for th in thetas:
        E = tensor.adapted_frame("H2xR", th, np.asarray(x))
        chart_val = -tensor.riemann(metric, np.asarray(x), E).R[0, 1, 1, 2]
        closed = tensor.product_tensor("H2xR", tensor.adapted_frame_split(th), convention="display")[0, 1, 1, 2]
        rows.append((th, float(closed), float(chart_val)))
    return rows


def limit_quantities(x_exprs, y_exprs, us, vs, sf):
    """h12 and K_ext on us x vs and the striction parameter v(u) for a lifted surface."""
    S = ruled.lifted_surface(sf, x_exprs, y_exprs, (float(us[0]), float(us[-1])),
                             (float(vs[0]), float(vs[-1])))
    F = S.forms_grid(us, vs)
    v = ruled.striction_curve(S, us).v
    return {"h12": F[..., 4], "K_ext": F[..., 5], "v_striction": v}


def limit_report(name, us=None, vs=None, radii=LIMIT_RADII, model="sphere"):
    x, y = LIMIT_FAMILIES[name]
    us = np.linspace(0.3, 1.5, 7) if us is None else us
    vs = np.linspace(-0.4, 0.4, 5) if vs is None else vs
    ref = limit_quantities(x, y, us, vs, SpaceForm.euclidean())
    make = SpaceForm.sphere if model == "sphere" else SpaceForm.hyperbolic
    return oracle.euclidean_limit_suite(lambda r: limit_quantities(x, y, us, vs, make(r)), ref, radii)


# ---------------------------------------------------------------------------
# suites


def suite_spaceform():
    res = SuiteResult("spaceform")
    for label, r, metric, K0 in spaceform_models():
        verdict = tensor.space_form_check(metric, CHART_SAMPLES)
        res.add(f"{label}({r:g}) identity residual", verdict.residual, 1e-4)
        res.add(f"{label}({r:g}) K0 error", abs(np.mean(verdict.sectional) - K0), 1e-4,
                f"K0 = {K0:g}")
        res.add(f"{label}({r:g}) symmetries", verdict.symmetry, 1e-6)
    flat = tensor.space_form_check(tensor.flat_chart(), CHART_SAMPLES)
    res.add("E3 identity residual", flat.residual, 1e-4)
    for key, KH in (("H2xR", -1.0), ("S2xR", 1.0)):
        metric = tensor.PRODUCT_CHARTS[key]()
        verdict = tensor.space_form_check(metric, PRODUCT_SAMPLES)
        res.add(f"{key} rejected as space form", verdict.residual, 1e-4,
                "residual must exceed tolerance", op=">=")
        want = np.array([KH, 0.0, 0.0])
        err = float(np.max(np.abs(verdict.sectional - want[None, :])))
        res.add(f"{key} sectional curvatures {{{KH:g}, 0, 0}}", err, 1e-4)
    return res


def suite_ruled():
    res = SuiteResult("ruled")
    # minimality of helicoids
    worst = 0.0
    for make in (SpaceForm.sphere, SpaceForm.hyperbolic):
        for r in (1.0, 2.0):
            for w in (0.5, 1.0, 3.0):
                S = ruled.helicoid(make(r), w, v_domain=(-0.5 * r, 0.5 * r))
                F = S.forms_grid(np.linspace(*S.u_domain, 50), np.linspace(*S.v_domain, 50))
                worst = max(worst, float(np.nanmax(np.abs(F[..., 6]))))
    res.add("helicoid max |H|", worst, 1e-8)
    # Egregium against the Brioschi oracle
    for sf in (SpaceForm.sphere(1.0), SpaceForm.hyperbolic(2.0), SpaceForm.euclidean()):
        S = ruled.helicoid(sf, 3.0, v_domain=(-0.6, 0.6))
        us, vs = np.linspace(0.5, 1.5, 41), np.linspace(-0.5, 0.5, 41)
        grid = oracle.sample_metric_grid(S.eval, sf.inner, us, vs)
        Kint = oracle.brioschi_grid(grid)
        K = S.forms_grid(us, vs)[..., 5]
        res.add(f"Egregium on helicoid in {sf}", np.nanmax(np.abs(Kint - K - sf.K0)), 1e-5)
    # striction curve of an offset helicoid
    S = ruled.helicoid(SpaceForm.sphere(1.0), 3.0, offset=0.3, v_domain=(-0.6, 0.6))
    st = ruled.striction_curve(S, n=41)
    res.add("offset helicoid: recovered v(u) + 0.3", np.max(np.abs(st.v + 0.3)), 1e-6)
    res.add("offset helicoid: striction residual", st.residual, 1e-7)
    # helix closed forms
    worst = 0.0
    for sf in (SpaceForm.sphere(1.0), SpaceForm.hyperbolic(2.0)):
        c = helix(sf, 3.0, 0.2)
        want = helix_closed_form(sf, 3.0, 0.2)
        for u in (0.0, 0.7, 1.9):
            got = frenet_kappa_tau(c, u, sf)
            worst = max(worst, abs(got.kappa - want.kappa), abs(got.tau - want.tau))
    res.add("helix kappa/tau vs closed form", worst, 1e-6)
    return res


def suite_product():
    res = SuiteResult("product")
    rows = r1223_display_table()
    err_closed = max(abs(c - 0.5 * np.sin(2 * th)) for th, c, _ in rows)
    err_chart = max(abs(n - 0.5 * np.sin(2 * th)) for th, _, n in rows)
    res.add("R_1223 = sin(2 theta)/2, closed form, theta in {0, pi/12, .., pi/2}", err_closed, 1e-6)
    res.add("R_1223 = sin(2 theta)/2, chart curvature", err_chart, 1e-6)
    worst_r2113 = 0.0
    worst_geo = 0.0
    for k in range(1, 6):
        th = k * np.pi / 12
        surf = tensor.ConstantAngleSurface("H2xR", th)
        for u, v in ((0.3, 0.1), (1.1, -0.2)):
            vf = tensor.vertical_frame_components(surf.metric, surf, u, v)
            worst_r2113 = max(worst_r2113, abs(vf.R2113))
            _, _, _, geo, _ = tensor.surface_frame_data(surf.metric, surf, u, v)
            worst_geo = max(worst_geo, geo)
    res.add("constant-angle surfaces in H2xR: |R_2113|", worst_r2113, 1e-6)
    res.add("constant-angle surfaces in H2xR: ruling geodesic residual", worst_geo, 1e-6)
    return res


def suite_limits():
    res = SuiteResult("limits")
    for name in LIMIT_FAMILIES:
        rep = limit_report(name)
        for q, order in rep.orders.items():
            res.add(f"{name}: {q} convergence order", order, rep.threshold,
                    "errors " + ", ".join(f"{e:.2e}" for e in rep.errors[q]), op=">=")
    return res


SUITES = {
    "spaceform": suite_spaceform,
    "ruled": suite_ruled,
    "product": suite_product,
    "limits": suite_limits,
}


def run_suite(name):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    return SUITES[name]()
