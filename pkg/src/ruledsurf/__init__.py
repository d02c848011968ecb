"""Ruled surfaces in the 3d space forms S^3(r), H^3(r) and E^3.

Submodules:
    ambient  embedded models, inner/vector products, exponential map
    curve    curves and frame fields along them, helices, arc length
    ruled    ruled surfaces: fundamental forms, curvatures, striction curves
    tensor   chart metrics, Riemann tensor, product manifolds H^2 x R, S^2 x R
    oracle   independent finite-difference / RK4 checks
    cli      the ``ruledsurf`` command
"""
__version__ = "0.1.0"

from .ambient import SpaceForm, Signature, exp_map, inner, mixed_product, vector_product  # noqa: E402
from .errors import ConfigError, GeometryError  # noqa: E402
from .ruled import (RuledSurface, curvature_report, distribution_parameter,  # noqa: E402
                    extrinsic_curvature, helicoid, striction_curve, tangent_surface)

__all__ = [
    "SpaceForm", "Signature", "inner", "vector_product", "mixed_product", "exp_map",
    "RuledSurface", "helicoid", "tangent_surface", "curvature_report", "extrinsic_curvature",
    "striction_curve", "distribution_parameter", "GeometryError", "ConfigError",
]
