"""Mesh, polyline and table output.

Numbers are written with 17 significant digits so that binary64 values
survive a round trip through text.
"""
import csv
import io

import numpy as np

from .errors import ProjectionPole

PROJECTIONS = ("none", "stereo_sphere", "stereo_hyperbolic")
POLE_TOL = 1e-9


def fmt(x):
    return format(float(x), ".17g")


def stereo_sphere(P, r=1.0):
    """(x1, x2, x3, x4) -> (x1, x2, x3)/(1 - x4) on S^3(r), after scaling to the unit sphere.

    ``P`` has shape (..., 4); raises ProjectionPole listing the index tuples
    of points too close to the pole x4 = r.
    """
    Q = np.asarray(P, dtype=float) / r
    den = 1.0 - Q[..., 3]
    bad = np.abs(den) < POLE_TOL
    if np.any(bad):
        nodes = [tuple(int(i) for i in idx) for idx in np.argwhere(bad)]
        raise ProjectionPole(f"{len(nodes)} node(s) at the projection pole x4 = r", nodes)
    return Q[..., :3] / den[..., None]


def stereo_hyperbolic(P, r=1.0):
    """(x1, x2, x3, x4) -> (x2, x3, x4)/(1 + x1) on H^3(r): the Poincare ball model."""
    Q = np.asarray(P, dtype=float) / r
    den = 1.0 + Q[..., 0]
    bad = np.abs(den) < POLE_TOL
    if np.any(bad):
        nodes = [tuple(int(i) for i in idx) for idx in np.argwhere(bad)]
        raise ProjectionPole(f"{len(nodes)} node(s) at the projection pole x1 = -r", nodes)
    return Q[..., 1:] / den[..., None]


def project(P, projection, r=1.0):
    """Map model points (..., 4) or chart points (..., 3) to R^3."""
    P = np.asarray(P, dtype=float)
    if projection == "stereo_sphere":
        return stereo_sphere(P, r)
    if projection == "stereo_hyperbolic":
        return stereo_hyperbolic(P, r)
    if projection == "none":
        if P.shape[-1] == 4:
            # E^3 sits in x1 = 0
            return P[..., 1:]
        return P
    raise ValueError(f"unknown projection {projection!r}")


def grid_faces(nu, nv):
    """Triangles (0-based) of the row-major nu x nv grid, two per quad, same winding."""
    faces = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j
            b = (i + 1) * nv + j
            c = (i + 1) * nv + j + 1
            d = i * nv + j + 1
            faces.append((a, b, c))
            faces.append((a, c, d))
    return faces


def obj_text(vertices, faces=(), lines=(), comment=None):
    """ASCII OBJ; faces and lines are 0-based index tuples."""
    out = io.StringIO()
    if comment:
        for row in str(comment).splitlines():
            out.write(f"# {row}\n")
    for v in np.asarray(vertices, dtype=float).reshape(-1, 3):
        out.write(f"v {fmt(v[0])} {fmt(v[1])} {fmt(v[2])}\n")
    for f in faces:
        out.write("f " + " ".join(str(k + 1) for k in f) + "\n")
    for ln in lines:
        out.write("l " + " ".join(str(k + 1) for k in ln) + "\n")
    return out.getvalue()


def mesh_obj(points, comment=None):
    """OBJ for a (nu, nv, 3) grid of points."""
    points = np.asarray(points, dtype=float)
    nu, nv = points.shape[:2]
    if not np.all(np.isfinite(points)):
        bad = [tuple(int(i) for i in idx) for idx in np.argwhere(~np.all(np.isfinite(points), axis=-1))]
        raise ProjectionPole("non-finite vertices in mesh", bad)
    return obj_text(points.reshape(-1, 3), grid_faces(nu, nv), comment=comment)


def polyline_obj(points, comment=None):
    """OBJ polyline through the finite points, split where points are missing."""
    points = np.asarray(points, dtype=float)
    ok = np.all(np.isfinite(points), axis=-1)
    verts = points[ok]
    index = np.cumsum(ok) - 1
    lines = []
    run = []
    for k in range(len(points)):
        if ok[k]:
            run.append(int(index[k]))
        else:
            if len(run) > 1:
                lines.append(run)
            run = []
    if len(run) > 1:
        lines.append(run)
    return obj_text(verts, lines=lines, comment=comment)


def csv_text(header, rows):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return out.getvalue()


def read_obj(text):
    """(vertices, faces, lines) from OBJ text with 0-based indices; enough for round-trip tests."""
    verts, faces, lines = [], [], []
    for row in text.splitlines():
        parts = row.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append(tuple(int(x.split("/")[0]) - 1 for x in parts[1:]))
        elif parts[0] == "l":
            lines.append(tuple(int(x) - 1 for x in parts[1:]))
    return np.array(verts).reshape(-1, 3), faces, lines
