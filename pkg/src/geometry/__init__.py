from .domains import Ball, Box, ConvexDomain, Ellipsoid, GeometryError, lens_volume, make_domain, measure
from .overlap import (
    BoundaryCoefficient,
    MonteCarloEstimate,
    OverlapExpansion,
    boundary_coefficient,
    expansion,
    overlap,
    overlap_monte_carlo,
    remainder_constant,
)
from .sphere import ball_volume, normalize, sphere_area, sphere_nodes
