"""``ruledsurf`` command line.

    ruledsurf report    --config surf.json [--grid 50x50] [--out report.json]
    ruledsurf mesh      --config surf.json [--projection stereo_sphere] --out surf.obj
    ruledsurf striction --config surf.json --out striction.csv   (also writes striction.obj)
    ruledsurf verify    {spaceform,ruled,product,limits} [--out result.json]

Exit status: 0 success, 1 verification failure, 2 bad configuration or
geometric input error (the message names the field or the offending nodes).
"""
import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, export, oracle, ruled, tensor, verify
from ._accel import num_workers
from .config import build_surface, load_config
from .errors import ConfigError, GeometryError, ProjectionPole

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _clean(x):
    """NaN/inf -> None so reports are strict JSON."""
    if isinstance(x, np.ndarray):
        return [_clean(y) for y in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_clean(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _chunks(n, k):
    k = max(1, min(k, n))
    edges = np.linspace(0, n, k + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _parallel_rows(fn, n):
    """Apply fn(i0, i1) to row blocks of 0..n and concatenate in order."""
    blocks = _chunks(n, num_workers())
    if len(blocks) == 1:
        return fn(*blocks[0])
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(lambda b: fn(*b), blocks))
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# report


def _report_space_form(cfg, surface):
    sf = surface.sf
    us, vs = cfg.u_grid(), cfg.v_grid()
    F = _parallel_rows(lambda a, b: surface.forms_grid(us[a:b], vs), len(us))
    K = F[..., 5]
    H = F[..., 6]
    regular = F[..., 2] > ruled.SINGULAR_TOL
    singular = [[int(i), int(j)] for i, j in np.argwhere(~regular)]
    summary = {
        "K_ext_min": float(np.min(K[regular])) if regular.any() else None,
        "K_ext_max": float(np.max(K[regular])) if regular.any() else None,
        "max_abs_H": float(np.max(np.abs(H[regular]))) if regular.any() else None,
        "regular_nodes": int(regular.sum()),
        "singular_nodes": len(singular),
        "K_sec": sf.K0,
    }
    # Egregium residual over interior nodes whose whole stencil is regular. The
    # metric is sampled on the grid minus its outer ring so that the
    # finite-difference steps stay inside the parameter domain.
    egregium = None
    step = 2 * oracle.FD_STEP
    if len(us) >= 7 and len(vs) >= 7 and us[1] - us[0] > step and vs[1] - vs[0] > step:
        grid = oracle.sample_metric_grid(surface.eval, sf.inner, us[1:-1], vs[1:-1])
        Kint = np.full(K.shape, np.nan)
        Kint[1:-1, 1:-1] = oracle.brioschi_grid(grid)
        ok = regular.copy()
        for di in range(-2, 3):
            for dj in range(-2, 3):
                ok &= np.roll(np.roll(regular, di, axis=0), dj, axis=1)
        diff = np.abs(Kint - K - sf.K0)[ok]
        diff = diff[np.isfinite(diff)]
        egregium = float(np.max(diff)) if diff.size else None
    summary["egregium_residual"] = egregium
    fields = {name: F[..., k] for k, name in enumerate(ruled.FORM_NAMES)}
    fields["K_int"] = F[..., 5] + sf.K0
    return {"model": str(sf), "surface": surface.name, "u": us, "v": vs, "fields": fields,
            "singular": singular, "summary": summary}


def _report_product(cfg, surface):
    us, vs = cfg.u_grid(), cfg.v_grid()
    metric = surface.metric

    def rows(a, b):
        out = np.full((b - a, len(vs), 5), np.nan)
        for i in range(a, b):
            for j, v in enumerate(vs):
                _, _, hf, geo, _ = tensor.surface_frame_data(metric, surface, us[i], v)
                vf = tensor.vertical_frame_components(metric, surface, us[i], v)
                out[i - a, j] = (np.linalg.det(hf), 0.5 * np.trace(hf), vf.R1223, vf.R2113, geo)
        return out

    F = _parallel_rows(rows, len(us))
    names = ("K_ext", "H", "R1223", "R2113", "ruling_geodesic_residual")
    fields = {n: F[..., k] for k, n in enumerate(names)}
    summary = {
        "theta": surface.theta,
        "max_abs_K_ext": float(np.max(np.abs(F[..., 0]))),
        "max_abs_R2113": float(np.max(np.abs(F[..., 3]))),
        "max_ruling_geodesic_residual": float(np.max(F[..., 4])),
        "R1223_display_expected": 0.5 * np.sin(2 * surface.theta) * (1 if surface.which == "H2xR" else -1),
    }
    return {"model": surface.which, "surface": f"constant_angle(theta={surface.theta:g})", "u": us, "v": vs,
            "fields": fields, "summary": summary}


def cmd_report(cfg):
    surface = build_surface(cfg)
    body = _report_product(cfg, surface) if cfg.is_product else _report_space_form(cfg, surface)
    body["config"] = cfg.raw
    body["grid"] = list(cfg.grid)
    body["version"] = __version__
    return body


# ---------------------------------------------------------------------------
# mesh


def _default_projection(cfg):
    return {"sphere": "stereo_sphere", "hyperbolic": "stereo_hyperbolic"}.get(cfg.model, "none")


def _check_projection(cfg, projection):
    if projection not in export.PROJECTIONS:
        raise ConfigError("--projection", f"expected one of {', '.join(export.PROJECTIONS)}")
    need = _default_projection(cfg)
    if projection != need:
        raise ConfigError("--projection", f"model {cfg.model} needs projection {need}, got {projection}")


def surface_points(cfg, surface):
    """(nu, nv, 3) mesh vertices before projection, or (nu, nv, 4) model points."""
    us, vs = cfg.u_grid(), cfg.v_grid()
    if cfg.is_product:
        return np.array([[surface(u, v) for v in vs] for u in us])
    U, V = np.meshgrid(us, vs, indexing="ij")
    return surface.eval(U, V)


def cmd_mesh(cfg, projection=None):
    projection = projection or _default_projection(cfg)
    _check_projection(cfg, projection)
    surface = build_surface(cfg)
    P = surface_points(cfg, surface)
    r = cfg.radius if cfg.radius is not None else 1.0
    pts = export.project(P, projection, r)
    nu, nv = cfg.grid
    return export.mesh_obj(pts, comment=f"ruledsurf {__version__} {cfg.model} {cfg.surface['type']} "
                                        f"{nu}x{nv} projection={projection}")


# ---------------------------------------------------------------------------
# striction


def cmd_striction(cfg, projection=None):
    """(csv_text, obj_text) for the striction curve sampled at the grid's u-values."""
    if cfg.is_product:
        raise ConfigError("model", "striction curves are computed for ruled surfaces in space forms")
    surface = build_surface(cfg)
    us = cfg.u_grid()
    st = ruled.striction_curve(surface, us)
    rows = [(float(u), float(v), float(res), s) for u, v, res, s in zip(st.u, st.v, st.residuals, st.status)]
    csv = export.csv_text(["u", "v", "residual", "status"], rows)
    projection = projection or _default_projection(cfg)
    _check_projection(cfg, projection)
    ok = np.isfinite(st.v)
    P = np.full((len(us), 4), np.nan)
    if ok.any():
        P[ok] = st.beta(us[ok])
    r = cfg.radius if cfg.radius is not None else 1.0
    pts = np.full((len(us), 3), np.nan)
    if ok.any():
        pts[ok] = export.project(P[ok], projection, r)
    obj = export.polyline_obj(pts, comment=f"striction curve, {cfg.model}, projection={projection}")
    return csv, obj


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    p = argparse.ArgumentParser(prog="ruledsurf", description="Ruled surfaces in 3d space forms.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--config", required=True, help="JSON surface configuration")
        sp.add_argument("--grid", help="override the config grid, e.g. 50x50")
        sp.add_argument("--out", help=out_help)

    common(sub.add_parser("report", help="fundamental forms and curvatures on a grid (JSON)"),
           "write JSON here instead of stdout")
    mp = sub.add_parser("mesh", help="OBJ mesh of the surface")
    common(mp, "OBJ path (stdout if omitted)")
    mp.add_argument("--projection", choices=export.PROJECTIONS)
    sp = sub.add_parser("striction", help="striction curve as CSV plus an OBJ polyline")
    common(sp, "CSV path; the polyline goes next to it with suffix .obj (stdout: CSV only)")
    sp.add_argument("--projection", choices=export.PROJECTIONS)
    vp = sub.add_parser("verify", help="run a verification suite")
    vp.add_argument("suite", choices=sorted(verify.SUITES))
    vp.add_argument("--out", help="write the JSON result here; otherwise JSON goes to stdout")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            result = verify.run_suite(args.suite)
            text = dumps(result.to_dict())
            summary = "\n".join(result.summary_lines()) + "\n"
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
                sys.stdout.write(summary)
            else:
                sys.stderr.write(summary)
                sys.stdout.write(text)
            return EXIT_OK if result.passed else EXIT_FAIL
        cfg = load_config(args.config, args.grid)
        if args.command == "report":
            _emit(dumps(cmd_report(cfg)), args.out)
        elif args.command == "mesh":
            _emit(cmd_mesh(cfg, args.projection), args.out)
        elif args.command == "striction":
            csv, obj = cmd_striction(cfg, args.projection)
            _emit(csv, args.out)
            if args.out:
                Path(args.out).with_suffix(".obj").write_text(obj, encoding="utf-8")
        return EXIT_OK
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except ProjectionPole as exc:
        sys.stderr.write(f"projection error: {exc}; nodes {list(exc.nodes)[:10]}\n")
        return EXIT_CONFIG
    except GeometryError as exc:
        sys.stderr.write(f"geometry error: {type(exc).__name__}: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
