from .types import FundamentalMatrix, Homography, Line2D, Model, PointSet, ProblemDef
from .line import line_from_two_points, line_residuals, weighted_line_fit
from .homography import (
    homography_from_correspondences,
    homography_residuals,
    homography_symmetric_residuals,
)
from .fundamental import (
    oriented_epipolar_consistent,
    sampson_residuals,
    seven_point_solver,
    weighted_eight_point,
)
from .problems import FUNDAMENTAL, HOMOGRAPHY, LINE2D, PROBLEMS, get_problem

__all__ = [
    "FundamentalMatrix",
    "Homography",
    "Line2D",
    "Model",
    "PointSet",
    "ProblemDef",
    "line_from_two_points",
    "line_residuals",
    "weighted_line_fit",
    "homography_from_correspondences",
    "homography_residuals",
    "homography_symmetric_residuals",
    "oriented_epipolar_consistent",
    "sampson_residuals",
    "seven_point_solver",
    "weighted_eight_point",
    "FUNDAMENTAL",
    "HOMOGRAPHY",
    "LINE2D",
    "PROBLEMS",
    "get_problem",
]
