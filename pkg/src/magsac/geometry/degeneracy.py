"""Sample degeneracy tests run before the minimal solvers."""

from __future__ import annotations

from itertools import combinations

import numpy as np

# thresholds are fixed constants: triangle area below this means collinear,
# point distance below the other means coincident
COLLINEAR_AREA = 1e-9
COINCIDENT_DIST = 1e-12


def _triangle_area(pts: np.ndarray, i: int, j: int, k: int) -> float:
    v1 = pts[j] - pts[i]
    v2 = pts[k] - pts[i]
    return 0.5 * abs(v1[0] * v2[1] - v1[1] * v2[0])


def _has_collinear_triple(pts: np.ndarray) -> bool:
    n = pts.shape[0]
    for i, j, k in combinations(range(n), 3):
        if _triangle_area(pts, i, j, k) <= COLLINEAR_AREA:
            return True
    return False


def _max_collinear_count(pts: np.ndarray) -> int:
    """Size of the largest subset lying on one line."""
    n = pts.shape[0]
    best = 2
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[j] - pts[i]) <= COINCIDENT_DIST:
                continue
            count = 2
            for k in range(n):
                if k in (i, j):
                    continue
                if _triangle_area(pts, i, j, k) <= COLLINEAR_AREA:
                    count += 1
            best = max(best, count)
    return best


def line_sample_ok(sample: np.ndarray) -> bool:
    """Two distinct points."""
    return np.linalg.norm(sample[1] - sample[0]) > COINCIDENT_DIST


def homography_sample_ok(sample: np.ndarray) -> bool:
    """No three of the four points collinear in either image."""
    return not (_has_collinear_triple(sample[:, :2]) or _has_collinear_triple(sample[:, 2:]))


def fundamental_sample_ok(sample: np.ndarray) -> bool:
    """No five of the seven points collinear in either image."""
    return _max_collinear_count(sample[:, :2]) < 5 and _max_collinear_count(sample[:, 2:]) < 5
