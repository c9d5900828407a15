"""Body representations: planar star bodies and support-function bodies."""

from minksym.geometry.base import (
    Body,
    DimensionMismatchError,
    EmptyBodyError,
    GeometryError,
    GridAlignmentError,
    InvalidBodyError,
    OriginOutsideError,
    ResolutionError,
    SymmetralStep,
)
from minksym.geometry.core import (
    Direction,
    SphereQuadrature,
    random_direction,
    reflect,
    sphere_quadrature,
)
from minksym.geometry.generators import (
    gen_cross,
    gen_disc,
    gen_random_star,
    gen_segment,
    gen_spiky,
)
from minksym.geometry.star2d import GridAngle, Raster, StarBody2D
from minksym.geometry.support import IntervalBody, SupportBody

__all__ = [
    "Body",
    "DimensionMismatchError",
    "Direction",
    "EmptyBodyError",
    "GeometryError",
    "GridAlignmentError",
    "GridAngle",
    "IntervalBody",
    "InvalidBodyError",
    "OriginOutsideError",
    "Raster",
    "ResolutionError",
    "SphereQuadrature",
    "StarBody2D",
    "SupportBody",
    "SymmetralStep",
    "gen_cross",
    "gen_disc",
    "gen_random_star",
    "gen_segment",
    "gen_spiky",
    "random_direction",
    "reflect",
    "sphere_quadrature",
]
