"""Homography estimation via the Hartley-normalized direct linear transform."""

from __future__ import annotations

import numpy as np

from ..exceptions import InsufficientSupport, NumericalFailure
from .normalization import conditioning_transform
from .types import Homography

# singular-value ratio above which the DLT nullspace is treated as ill-defined
CONDITION_LIMIT = 1e12


def normalized_homography(matrix: np.ndarray) -> Homography:
    """Frobenius-normalize and fix the sign of the largest-magnitude entry."""
    norm = np.linalg.norm(matrix)
    if not np.isfinite(norm) or norm < 1e-15:
        raise NumericalFailure("homography matrix is zero or non-finite")
    h = matrix / norm
    if h.flat[np.argmax(np.abs(h))] < 0:
        h = -h
    return Homography(h)


def _dlt_rows(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Two DLT constraint rows per correspondence, (2n, 9)."""
    n = src.shape[0]
    x, y = src[:, 0], src[:, 1]
    u, v = dst[:, 0], dst[:, 1]
    rows = np.zeros((2 * n, 9))
    rows[0::2, 0] = -x
    rows[0::2, 1] = -y
    rows[0::2, 2] = -1.0
    rows[0::2, 6] = u * x
    rows[0::2, 7] = u * y
    rows[0::2, 8] = u
    rows[1::2, 3] = -x
    rows[1::2, 4] = -y
    rows[1::2, 5] = -1.0
    rows[1::2, 6] = v * x
    rows[1::2, 7] = v * y
    rows[1::2, 8] = v
    return rows


def _solve_dlt(rows: np.ndarray) -> np.ndarray:
    try:
        _, s, vh = np.linalg.svd(rows)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK hiccup
        raise NumericalFailure("SVD failed in the DLT solve") from exc
    # pad singular values to the 9 DLT dimensions so the conditioning test is
    # uniform for minimal (8x9) and overdetermined systems
    s9 = np.zeros(9)
    s9[: s.shape[0]] = s
    if s9[7] <= 0 or s9[0] / s9[7] > CONDITION_LIMIT:
        raise NumericalFailure("DLT nullspace is ill-conditioned")
    return vh[-1].reshape(3, 3)


def homography_from_correspondences(coords: np.ndarray, weights: np.ndarray | None = None) -> Homography:
    """Hartley-normalized (optionally weighted) DLT homography fit.

    Parameters
    ----------
    coords : (n, 4) correspondences x1, y1, x2, y2
    weights : optional non-negative per-point weights; rows are scaled by
        sqrt(w) and the conditioning transforms use weighted statistics, so
        integer weights reproduce the fit of the replicated multiset.
    """
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        keep = weights > 0
        if keep.sum() < 4:
            raise InsufficientSupport("weighted homography fit needs >= 4 positive-weight points")
        coords = coords[keep]
        weights = weights[keep]
    elif coords.shape[0] < 4:
        raise InsufficientSupport("homography fit needs >= 4 points")
    src, dst = coords[:, :2], coords[:, 2:]
    T1, src_n = conditioning_transform(src, weights)
    T2, dst_n = conditioning_transform(dst, weights)
    rows = _dlt_rows(src_n, dst_n)
    if weights is not None:
        rows *= np.sqrt(np.repeat(weights, 2))[:, None]
    h_norm = _solve_dlt(rows)
    h = np.linalg.inv(T2) @ h_norm @ T1
    return normalized_homography(h)


def homography_minimal_solver(sample: np.ndarray) -> list:
    """Normalized four-point DLT on a minimal sample."""
    return [homography_from_correspondences(sample)]


def homography_residuals(model: Homography, coords: np.ndarray) -> np.ndarray:
    """One-directional re-projection error in image 2, pixels.

    Points mapped to infinity (tiny homogeneous depth) get np.inf and are
    therefore never inliers.
    """
    h = model.matrix
    x, y = coords[:, 0], coords[:, 1]
    w = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    out = np.full(coords.shape[0], np.inf)
    ok = np.abs(w) > 1e-12
    u = (h[0, 0] * x[ok] + h[0, 1] * y[ok] + h[0, 2]) / w[ok]
    v = (h[1, 0] * x[ok] + h[1, 1] * y[ok] + h[1, 2]) / w[ok]
    out[ok] = np.hypot(u - coords[ok, 2], v - coords[ok, 3])
    return out


def homography_symmetric_residuals(model: Homography, coords: np.ndarray) -> np.ndarray:
    """Symmetric transfer error: RMS of the forward and backward distances."""
    forward = homography_residuals(model, coords)
    try:
        inv = np.linalg.inv(model.matrix)
    except np.linalg.LinAlgError:
        return np.full(coords.shape[0], np.inf)
    swapped = coords[:, [2, 3, 0, 1]]
    backward = homography_residuals(Homography(inv), swapped)
    return np.sqrt(0.5 * (forward**2 + backward**2))
