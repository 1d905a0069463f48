"""Problem registry tying models, solvers, residuals and degeneracy tests together."""

from __future__ import annotations

import numpy as np

from . import degeneracy
from .fundamental import (
    oriented_epipolar_consistent,
    sampson_residuals,
    seven_point_solver,
    weighted_eight_point,
)
from .homography import (
    homography_from_correspondences,
    homography_minimal_solver,
    homography_residuals,
)
from .line import line_minimal_solver, line_residuals, weighted_line_fit
from .types import ProblemDef


def _always_valid(model, sample_coords) -> bool:
    return True


def _oriented_check(model, sample_coords) -> bool:
    return oriented_epipolar_consistent(model, sample_coords)


LINE2D = ProblemDef(
    name="line2d",
    m=2,
    rho=1,
    lsq_floor=2,
    residual_fn=line_residuals,
    minimal_solver=line_minimal_solver,
    weighted_solver=weighted_line_fit,
    degeneracy_test=degeneracy.line_sample_ok,
    model_validator=_always_valid,
)

HOMOGRAPHY = ProblemDef(
    name="homography",
    m=4,
    rho=2,
    lsq_floor=4,
    residual_fn=homography_residuals,
    minimal_solver=homography_minimal_solver,
    weighted_solver=homography_from_correspondences,
    degeneracy_test=degeneracy.homography_sample_ok,
    model_validator=_always_valid,
)

# the non-minimal solver for F is the eight-point algorithm, so non-minimal
# fits need one point more than the minimal sample size
FUNDAMENTAL = ProblemDef(
    name="fundamental",
    m=7,
    rho=2,
    lsq_floor=8,
    residual_fn=sampson_residuals,
    minimal_solver=seven_point_solver,
    weighted_solver=weighted_eight_point,
    degeneracy_test=degeneracy.fundamental_sample_ok,
    model_validator=_oriented_check,
)

PROBLEMS = {p.name: p for p in (LINE2D, HOMOGRAPHY, FUNDAMENTAL)}


def get_problem(name: str) -> ProblemDef:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None


def expected_dim(problem: ProblemDef) -> int:
    """Coordinate count per data point for the problem."""
    return 2 if problem.name == "line2d" else 4
