"""2D line model: minimal fit, weighted total-least-squares fit, residuals."""

from __future__ import annotations

import numpy as np

from ..exceptions import DegenerateSample, InsufficientSupport, NumericalFailure
from .types import Line2D


def normalized_line(a: float, b: float, c: float) -> Line2D:
    """Scale coefficients so a**2 + b**2 == 1, with a deterministic sign."""
    norm = np.hypot(a, b)
    if norm < 1e-15:
        raise NumericalFailure("line normal vector is zero")
    a, b, c = a / norm, b / norm, c / norm
    # fix the sign so results do not depend on eigenvector orientation
    if a < 0 or (a == 0 and b < 0):
        a, b, c = -a, -b, -c
    return Line2D(a, b, c)


def line_from_two_points(p1, p2) -> Line2D:
    """Line through two distinct 2D points."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    if np.linalg.norm(d) <= 1e-12:
        raise DegenerateSample("the two sample points coincide")
    a, b = -d[1], d[0]
    c = -(a * p1[0] + b * p1[1])
    return normalized_line(a, b, c)


def line_residuals(model: Line2D, coords: np.ndarray) -> np.ndarray:
    """Perpendicular point-to-line distances in pixels, one per row."""
    return np.abs(coords[:, 0] * model.a + coords[:, 1] * model.b + model.c)


def line_minimal_solver(sample: np.ndarray) -> list:
    return [line_from_two_points(sample[0], sample[1])]


def weighted_line_fit(coords: np.ndarray, weights: np.ndarray) -> Line2D:
    """Weighted orthogonal regression: minimize sum w * (a x + b y + c)^2.

    The normal (a, b) is the eigenvector of the smallest eigenvalue of the
    weighted scatter matrix; c places the line through the weighted centroid.
    """
    weights = np.asarray(weights, dtype=float)
    positive = weights > 0
    if positive.sum() < 2:
        raise InsufficientSupport("weighted line fit needs >= 2 positive-weight points")
    pts = coords[positive]
    w = weights[positive]
    total = w.sum()
    centroid = (w[:, None] * pts).sum(axis=0) / total
    centered = pts - centroid
    scatter = (w[:, None] * centered).T @ centered
    if not np.all(np.isfinite(scatter)) or np.abs(scatter).max() < 1e-24:
        raise NumericalFailure("degenerate weighted scatter for line fit")
    eigvals, eigvecs = np.linalg.eigh(scatter)
    a, b = eigvecs[:, 0]
    c = -(a * centroid[0] + b * centroid[1])
    return normalized_line(a, b, c)
