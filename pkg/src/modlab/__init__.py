"""modlab: a grid laboratory for discrete p-moduli of curve families,
ring distortion inequalities, and exponential lower distance bounds."""

from .geometry import (
    Annulus,
    Continuum,
    DiscreteDomain,
    ShapeSpec,
    annulus_shape,
    box_shape,
    disk_shape,
    distance_to_boundary,
    half_plane_shape,
    polygon_shape,
    rasterize,
    separation_ratio,
)
from .curves import (
    Curve,
    CurveFamily,
    annulus_family,
    crossing_subcurve,
    density_length,
    joining_family,
    minorizes,
    shortest_curve,
)
from .modulus import DensityField, ModulusResult, p_modulus, ring_modulus

__version__ = "0.1.0"
