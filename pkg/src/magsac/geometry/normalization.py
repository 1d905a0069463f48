"""Hartley-style point conditioning for the DLT solvers."""

from __future__ import annotations

import numpy as np

from ..exceptions import NumericalFailure


def conditioning_transform(xy: np.ndarray, weights: np.ndarray | None = None):
    """Similarity transform mapping points to zero centroid, mean distance sqrt(2).

    Parameters
    ----------
    xy : (n, 2) array of image points
    weights : optional non-negative weights; centroid and scale are then
        weight-averaged, so integer weights condition exactly like the
        replicated multiset.

    Returns
    -------
    T : (3, 3) similarity transform
    xy_n : (n, 2) transformed points
    """
    if weights is None:
        centroid = xy.mean(axis=0)
        mean_dist = np.linalg.norm(xy - centroid, axis=1).mean()
    else:
        total = weights.sum()
        if total <= 0:
            raise NumericalFailure("conditioning needs positive total weight")
        centroid = (weights[:, None] * xy).sum(axis=0) / total
        mean_dist = (weights * np.linalg.norm(xy - centroid, axis=1)).sum() / total
    if mean_dist < 1e-12:
        raise NumericalFailure("points are (nearly) coincident; cannot condition")
    s = np.sqrt(2.0) / mean_dist
    T = np.array(
        [
            [s, 0.0, -s * centroid[0]],
            [0.0, s, -s * centroid[1]],
            [0.0, 0.0, 1.0],
        ]
    )
    return T, (xy - centroid) * s


def homogeneous(xy: np.ndarray) -> np.ndarray:
    """Append a unit homogeneous coordinate: (n, 2) -> (n, 3)."""
    return np.hstack([xy, np.ones((xy.shape[0], 1))])
