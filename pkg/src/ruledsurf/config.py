"""Surface configurations for the command line.

A configuration is one JSON document. Real numbers are written as decimal
strings (``"0.5"``) and parsed to binary64, so a config file round-trips
through version control without float reformatting. Example::

    {
      "model": "sphere", "radius": "1",
      "surface": {"type": "helicoid", "omega": "3"},
      "u_range": ["0", "6.283185307179586"], "v_range": ["-0.5", "0.5"],
      "grid": [50, 50]
    }

Surface types: helicoid, tangent_surface, cone, cylinder, custom, lifted
(space forms) and constant_angle (h2xr, s2xr).
"""
import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Optional, Tuple

import numpy as np

from .ambient import SpaceForm
from .errors import ConfigError, GeometryError

MODELS = ("euclidean", "sphere", "hyperbolic", "h2xr", "s2xr")
SPACE_FORM_SURFACES = ("helicoid", "tangent_surface", "cone", "cylinder", "custom", "lifted")
PRODUCT_SURFACES = ("constant_angle",)

_GRID_RE = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


def parse_real(value, name):
    """Decimal string -> float. JSON numbers are rejected to keep configs exact."""
    if isinstance(value, bool) or not isinstance(value, str):
        raise ConfigError(name, f"expected a decimal string, got {value!r}")
    try:
        d = Decimal(value.strip())
    except InvalidOperation:
        raise ConfigError(name, f"not a decimal number: {value!r}") from None
    x = float(d)
    if not np.isfinite(x):
        raise ConfigError(name, f"must be finite, got {value!r}")
    return x


def parse_range(value, name):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(name, "expected a pair [lo, hi]")
    lo = parse_real(value[0], f"{name}[0]")
    hi = parse_real(value[1], f"{name}[1]")
    if not lo < hi:
        raise ConfigError(name, f"need lo < hi, got [{lo}, {hi}]")
    return lo, hi


def parse_grid(value, name="grid"):
    """[nu, nv], "NUxNV" or ["nu", "nv"]; both counts >= 2."""
    if isinstance(value, str):
        m = _GRID_RE.match(value)
        if not m:
            raise ConfigError(name, f"expected NUxNV, got {value!r}")
        nu, nv = int(m.group(1)), int(m.group(2))
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        counts = []
        for x in value:
            if isinstance(x, int) and not isinstance(x, bool):
                counts.append(x)
            elif isinstance(x, str) and x.strip().isdigit():
                counts.append(int(x))
            else:
                raise ConfigError(name, f"grid counts must be integers, got {value!r}")
        nu, nv = counts
    else:
        raise ConfigError(name, "expected [nu, nv] or 'NUxNV'")
    if nu < 2 or nv < 2:
        raise ConfigError(name, f"need nu, nv >= 2, got {nu}x{nv}")
    return nu, nv


def _vector(value, name, n=4):
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(name, f"expected {n} components")
    return np.array([parse_real(x, f"{name}[{i}]") for i, x in enumerate(value)])


def _exprs(value, name, n):
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(name, f"expected {n} expressions in u")
    out = []
    for i, e in enumerate(value):
        if not isinstance(e, str) or not e.strip():
            raise ConfigError(f"{name}[{i}]", "expressions must be non-empty strings")
        out.append(e)
    return out


@dataclass
class SurfaceConfig:
    model: str
    radius: Optional[float]
    surface: dict
    u_range: Tuple[float, float]
    v_range: Tuple[float, float]
    grid: Tuple[int, int]
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def is_product(self):
        return self.model in ("h2xr", "s2xr")

    def space_form(self):
        if self.model == "euclidean":
            return SpaceForm.euclidean()
        if self.model == "sphere":
            return SpaceForm.sphere(self.radius)
        if self.model == "hyperbolic":
            return SpaceForm.hyperbolic(self.radius)
        raise ConfigError("model", f"{self.model} is not a space form")

    def u_grid(self):
        return np.linspace(*self.u_range, self.grid[0])

    def v_grid(self):
        return np.linspace(*self.v_range, self.grid[1])


def parse_config(doc, grid_override=None):
    """Validate a decoded JSON object and return a SurfaceConfig."""
    from .ruled import SEC_BAND, sphere_band_ok

    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    model = doc.get("model")
    if model not in MODELS:
        raise ConfigError("model", f"expected one of {', '.join(MODELS)}, got {model!r}")
    radius = None
    if model in ("sphere", "hyperbolic"):
        if "radius" not in doc:
            raise ConfigError("radius", f"required for model {model}")
        radius = parse_real(doc["radius"], "radius")
        if radius <= 0:
            raise ConfigError("radius", "must be positive")
    surface = doc.get("surface")
    if not isinstance(surface, dict) or "type" not in surface:
        raise ConfigError("surface", "expected an object with a 'type' field")
    allowed = PRODUCT_SURFACES if model in ("h2xr", "s2xr") else SPACE_FORM_SURFACES
    if surface["type"] not in allowed:
        raise ConfigError("surface.type", f"for model {model} expected one of {', '.join(allowed)}, "
                                          f"got {surface['type']!r}")
    for key in ("u_range", "v_range"):
        if key not in doc:
            raise ConfigError(key, "required")
    u_range = parse_range(doc["u_range"], "u_range")
    v_range = parse_range(doc["v_range"], "v_range")
    if model == "sphere" and not sphere_band_ok(v_range[0], v_range[1], radius):
        raise ConfigError("v_range", f"[{v_range[0]}, {v_range[1]}] enters the band |cos(v/r)| <= {SEC_BAND} "
                                     f"where the sphere formulas degenerate")
    if grid_override is not None:
        grid = parse_grid(grid_override, "--grid")
    else:
        grid = parse_grid(doc.get("grid", [50, 50]))
    return SurfaceConfig(model, radius, surface, u_range, v_range, grid, doc)


def load_config(path, grid_override=None):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(doc, grid_override)


# ---------------------------------------------------------------------------
# building surfaces


def _curve(spec, sf, u_range, name):
    from .curve import curve_from_expressions, euclidean_helix, helix

    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(name, "expected an object with a 'type' field")
    kind = spec["type"]
    if kind == "helix":
        if sf.is_euclidean:
            radius = parse_real(spec.get("radius", "1"), f"{name}.radius")
            pitch = parse_real(spec.get("pitch", "0.5"), f"{name}.pitch")
            return euclidean_helix(radius, pitch, u_range)
        omega = parse_real(spec.get("omega", "0.5"), f"{name}.omega")
        v = parse_real(spec.get("v", "0.3"), f"{name}.v")
        return helix(sf, omega, v, u_range)
    if kind == "expr":
        import sympy as sp

        from .ruled import parse_expr

        u = sp.Symbol("u", real=True)
        ex = [parse_expr(e, u) for e in _exprs(spec.get("components"), f"{name}.components", 4)]
        return curve_from_expressions(sf, ex, u, u_range)
    raise ConfigError(f"{name}.type", f"expected helix or expr, got {kind!r}")


def build_surface(cfg):
    """RuledSurface (space forms) or ConstantAngleSurface (product models)."""
    from . import ruled, tensor

    s = cfg.surface
    kind = s["type"]
    try:
        if cfg.is_product:
            theta = parse_real(s.get("theta", "0.5"), "surface.theta")
            if not 0.0 <= theta <= np.pi / 2:
                raise ConfigError("surface.theta", "must lie in [0, pi/2]")
            rho = parse_real(s.get("rho", "0.6"), "surface.rho")
            if rho <= 0:
                raise ConfigError("surface.rho", "must be positive")
            which = "H2xR" if cfg.model == "h2xr" else "S2xR"
            return tensor.ConstantAngleSurface(which, theta, tensor.default_base_curve(which, rho))
        sf = cfg.space_form()
        ur, vr = cfg.u_range, cfg.v_range
        if kind == "helicoid":
            omega = parse_real(s.get("omega", "3"), "surface.omega")
            offset = parse_real(s.get("offset", "0"), "surface.offset")
            return ruled.helicoid(sf, omega, offset, ur, vr)
        if kind == "tangent_surface":
            c = _curve(s.get("curve"), sf, ur, "surface.curve")
            return ruled.tangent_surface(c, ur, vr)
        if kind == "cone":
            apex = _vector(s["apex"], "surface.apex") if "apex" in s else sf.base_point()
            dirs = _exprs(s.get("directions"), "surface.directions", 4)
            return ruled.cone(sf, apex, dirs, ur, vr)
        if kind == "cylinder":
            c = _curve(s.get("curve"), sf, ur, "surface.curve")
            u0 = parse_real(s.get("u0", repr(ur[0])), "surface.u0")
            Z0 = _vector(s.get("Z0"), "surface.Z0")
            return ruled.cylinder(c, Z0, u0, ur, vr)
        if kind == "custom":
            d = _exprs(s.get("directrix"), "surface.directrix", 4)
            z = _exprs(s.get("ruling"), "surface.ruling", 4)
            return ruled.custom_surface(sf, d, z, ur, vr)
        if kind == "lifted":
            x = _exprs(s.get("x"), "surface.x", 3)
            y = _exprs(s.get("y"), "surface.y", 3)
            return ruled.lifted_surface(sf, x, y, ur, vr)
    except ConfigError:
        raise
    except (GeometryError, ValueError, TypeError) as exc:
        raise ConfigError("surface", f"cannot build {kind}: {exc}") from None
    raise ConfigError("surface.type", f"unknown surface type {kind!r}")
