"""Core data containers: point sets, model parameterizations, problem bundles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

FloatArray = np.ndarray


@dataclass
class PointSet:
    """Input data points.

    ``coords`` is an (n, k) float64 array; k=2 for 2D points, k=4 for
    correspondences stored as x1, y1, x2, y2 (pixels).  ``gt_inlier_mask``
    is an optional boolean array used only for evaluation.
    """

    coords: FloatArray
    image1_diag: float | None = None
    image2_diag: float | None = None
    gt_inlier_mask: np.ndarray | None = None

    def __post_init__(self):
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[0] == 0:
            raise ValueError("coords must be a non-empty (n, k) array")
        if self.coords.shape[1] not in (2, 4):
            raise ValueError("points must have 2 or 4 coordinates each")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("all coordinates must be finite")
        if self.gt_inlier_mask is not None:
            self.gt_inlier_mask = np.asarray(self.gt_inlier_mask, dtype=bool)
            if self.gt_inlier_mask.shape != (len(self),):
                raise ValueError("gt_inlier_mask length must equal the point count")

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class Line2D:
    """2D line a*x + b*y + c = 0 with a**2 + b**2 == 1."""

    a: float
    b: float
    c: float

    def as_array(self) -> FloatArray:
        return np.array([self.a, self.b, self.c])

    def check_valid(self, tol: float = 1e-9) -> bool:
        return abs(self.a * self.a + self.b * self.b - 1.0) <= tol


@dataclass(frozen=True)
class Homography:
    """3x3 projective map, Frobenius norm 1, largest-magnitude entry positive."""

    matrix: FloatArray

    def check_valid(self, tol: float = 1e-9) -> bool:
        h = self.matrix
        if h.shape != (3, 3) or not np.all(np.isfinite(h)):
            return False
        if abs(np.linalg.norm(h) - 1.0) > tol:
            return False
        return h.flat[np.argmax(np.abs(h))] > 0


@dataclass(frozen=True)
class FundamentalMatrix:
    """3x3 rank-2 matrix of two-view epipolar geometry, Frobenius norm 1."""

    matrix: FloatArray

    def check_valid(self, tol: float = 1e-9) -> bool:
        f = self.matrix
        if f.shape != (3, 3) or not np.all(np.isfinite(f)):
            return False
        if abs(np.linalg.norm(f) - 1.0) > tol:
            return False
        s = np.linalg.svd(f, compute_uv=False)
        return s[2] < tol * s[0]


Model = Union[Line2D, Homography, FundamentalMatrix]


@dataclass(frozen=True)
class ProblemDef:
    """Per-model-type bundle of solvers and residual machinery.

    ``residual_fn(model, coords)`` is vectorized: it maps an (n, k) array to
    an (n,) array of non-negative pixel residuals (np.inf marks points that
    can never be inliers).  ``minimal_solver`` returns a list of candidate
    models (the seven-point solver has up to three).  ``weighted_solver``
    accepts per-point non-negative weights and needs at least ``lsq_floor``
    positive-weight points.  ``model_validator(model, sample_coords)``
    rejects geometrically impossible models (oriented epipolar test).
    """

    name: str
    m: int
    rho: int
    lsq_floor: int
    residual_fn: Callable[[Model, FloatArray], FloatArray]
    minimal_solver: Callable[[FloatArray], list]
    weighted_solver: Callable[[FloatArray, FloatArray], Model]
    degeneracy_test: Callable[[FloatArray], bool]
    model_validator: Callable[[Model, FloatArray], bool]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("minimal sample size must be >= 1")
        if self.rho not in (1, 2, 3, 4):
            raise ValueError("residual-space dimension must be in 1..4")
