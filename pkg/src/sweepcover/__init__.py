"""Coverage measure and explored area of a line-sweep sensor."""
__version__ = "0.1.0"

from .core_geom import Box2, Interval, Vec2  # noqa: E402
from .sweep_model import PoseTrajectory, SensorConfig  # noqa: E402
from .contour import Cycle, build_contour, build_signed_contours  # noqa: E402
from .intersect import AssumptionViolation, find_self_intersections, validate_assumptions  # noqa: E402
from .alexander import alexander_numbering, build_cell_complex, winding_sets  # noqa: E402
from .coverage import (CoverageValue, Paving, build_coverage_model, classify_roi,  # noqa: E402
                       coverage_measure, explored_area, extended_winding)

__all__ = [
    "Box2", "Interval", "Vec2", "PoseTrajectory", "SensorConfig", "Cycle", "build_contour",
    "build_signed_contours", "AssumptionViolation", "find_self_intersections", "validate_assumptions",
    "alexander_numbering", "build_cell_complex", "winding_sets", "CoverageValue", "Paving",
    "build_coverage_model", "classify_roi", "coverage_measure", "explored_area", "extended_winding",
]
