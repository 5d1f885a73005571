"""Perimeter-fair equal-area fan partitions of convex polygons."""

from .errors import (
    AllInfinite,
    ApexOnVertex,
    BadFractions,
    BadWindow,
    DegenerateEdge,
    EmptyPartition,
    FairFanError,
    MalformedFan,
    NotConvex,
    PointInside,
    PointNotInRegion,
    PointNotInterior,
    TooFewVertices,
)
from .fairness import (
    EXACT,
    SAMPLED,
    ThetaProfile,
    area_weighted_deviation,
    asymptotic_fairness,
    fairness_at_point,
    fairness_ratio,
    fairness_value,
    theta_events,
    theta_profile,
)
from .geometry import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    ConvexPolygon,
    Point,
    Ray,
    area,
    boundary_distance_extremes,
    chord_length,
    classify_point,
    edge_extension_intersections,
    perimeter,
    sector_table,
    validate_polygon,
)
from .partition import (
    INFINITY,
    Fan,
    FanPartition,
    Infeasible,
    Piece,
    exterior_fan,
    fan_partition,
    interior_fan,
    parallel_fan,
)
from .search import (
    ASYMPTOTIC,
    CandidateSet,
    Minimum,
    SearchResult,
    Terrain,
    asymptotic_candidates,
    fairest_fan,
    find_perfect_fan,
    local_minima,
    refine_minimum,
    refined_minima,
    scan_terrain,
)

__version__ = "0.1.0"

__all__ = [
    "ASYMPTOTIC", "AllInfinite", "ApexOnVertex", "BOUNDARY", "BadFractions", "BadWindow",
    "CandidateSet", "ConvexPolygon", "DegenerateEdge", "EXACT", "EXTERIOR", "EmptyPartition",
    "FairFanError", "Fan", "FanPartition", "INFINITY", "INTERIOR", "Infeasible", "MalformedFan",
    "Minimum", "NotConvex", "Piece", "Point", "PointInside", "PointNotInRegion",
    "PointNotInterior", "Ray", "SAMPLED", "SearchResult", "Terrain", "ThetaProfile",
    "TooFewVertices", "area", "area_weighted_deviation", "asymptotic_candidates",
    "asymptotic_fairness", "boundary_distance_extremes", "chord_length", "classify_point",
    "edge_extension_intersections", "exterior_fan", "fairest_fan", "fairness_at_point",
    "fairness_ratio", "fairness_value", "fan_partition", "find_perfect_fan", "interior_fan",
    "local_minima", "parallel_fan", "perimeter", "refine_minimum", "refined_minima",
    "scan_terrain", "sector_table", "theta_events", "theta_profile", "validate_polygon",
]
