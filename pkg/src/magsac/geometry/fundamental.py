"""Fundamental matrix solvers, Sampson distance and the oriented epipolar test."""

from __future__ import annotations

import numpy as np

from ..exceptions import InsufficientSupport, NoRealSolution, NumericalFailure
from .normalization import conditioning_transform, homogeneous
from .types import FundamentalMatrix

CONDITION_LIMIT = 1e12


def normalized_fundamental(matrix: np.ndarray) -> FundamentalMatrix:
    norm = np.linalg.norm(matrix)
    if not np.isfinite(norm) or norm < 1e-15:
        raise NumericalFailure("fundamental matrix is zero or non-finite")
    return FundamentalMatrix(matrix / norm)


def _epipolar_rows(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """One row x2^T F x1 = 0 per correspondence, (n, 9), F flattened row-major."""
    x1, y1 = src[:, 0], src[:, 1]
    x2, y2 = dst[:, 0], dst[:, 1]
    one = np.ones_like(x1)
    return np.column_stack(
        [x2 * x1, x2 * y1, x2, y2 * x1, y2 * y1, y2, x1, y1, one]
    )


def _real_cubic_roots(c0: float, c1: float, c2: float, c3: float) -> list[float]:
    """Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (closed form, trig/Cardano).

    Degrades to the quadratic/linear case when the leading coefficients
    vanish.  Roots of the complex pair are discarded; each kept root gets a
    Newton polish on the original cubic.
    """
    scale = max(abs(c0), abs(c1), abs(c2), abs(c3), 1e-300)
    if abs(c3) < 1e-12 * scale:
        if abs(c2) < 1e-12 * scale:
            if abs(c1) < 1e-12 * scale:
                return []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0:
            return []
        sq = np.sqrt(disc)
        return [(-c1 + sq) / (2.0 * c2), (-c1 - sq) / (2.0 * c2)]
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    eps = 1e-14 * max(1.0, abs(p), abs(q))
    if abs(p) < eps and abs(q) < eps:
        roots = [shift]
    else:
        disc = -4.0 * p**3 - 27.0 * q * q
        if disc >= 0 and p < 0:
            # three real roots via the trigonometric branch
            m = 2.0 * np.sqrt(-p / 3.0)
            arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
            theta = np.arccos(arg) / 3.0
            roots = [m * np.cos(theta - 2.0 * np.pi * k / 3.0) + shift for k in range(3)]
        else:
            s = np.sqrt(max(q * q / 4.0 + p**3 / 27.0, 0.0))
            u = np.cbrt(-q / 2.0 + s)
            v = np.cbrt(-q / 2.0 - s)
            roots = [u + v + shift]

    def _polish(x: float) -> float:
        for _ in range(2):
            f = ((c3 * x + c2) * x + c1) * x + c0
            df = (3.0 * c3 * x + 2.0 * c2) * x + c1
            if abs(df) < 1e-300:
                break
            x -= f / df
        return x

    return [_polish(r) for r in roots]


def seven_point_solver(sample: np.ndarray) -> list:
    """Seven-point fundamental matrix solver: 1 to 3 candidates.

    Hartley-normalizes the sample, spans the two-dimensional nullspace of the
    epipolar constraint matrix, and picks the rank-2 combinations by solving
    det(F1 + x F2) = 0 in closed form.
    """
    if sample.shape[0] != 7:
        raise ValueError("the seven-point solver needs exactly 7 correspondences")
    T1, src_n = conditioning_transform(sample[:, :2])
    T2, dst_n = conditioning_transform(sample[:, 2:])
    rows = _epipolar_rows(src_n, dst_n)
    try:
        _, s, vh = np.linalg.svd(rows)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure("SVD failed in the seven-point solve") from exc
    if s[6] <= 0 or s[0] / s[6] > CONDITION_LIMIT:
        raise NumericalFailure("seven-point system is rank deficient")
    f1 = vh[-1].reshape(3, 3)
    f2 = vh[-2].reshape(3, 3)
    # det(f1 + x f2) is cubic in x; its coefficients follow from four values
    d0 = np.linalg.det(f1)
    d3 = np.linalg.det(f2)
    dp = np.linalg.det(f1 + f2)
    dm = np.linalg.det(f1 - f2)
    c2 = 0.5 * (dp + dm) - d0
    c1 = 0.5 * (dp - dm) - d3
    roots = [r for r in _real_cubic_roots(d0, c1, c2, d3) if np.isfinite(r)]
    if not roots:
        raise NoRealSolution("no real root for the seven-point cubic")
    models = []
    for r in roots:
        f = f1 + r * f2
        if np.linalg.norm(f) < 1e-12:
            continue
        f = T2.T @ f @ T1
        try:
            models.append(normalized_fundamental(f))
        except NumericalFailure:
            continue
    if not models:
        raise NoRealSolution("all seven-point roots were degenerate")
    return models


def weighted_eight_point(coords: np.ndarray, weights: np.ndarray | None = None) -> FundamentalMatrix:
    """Weighted, Hartley-normalized eight-point fit with rank-2 enforcement.

    Equal weights reduce to the plain normalized eight-point algorithm; the
    smallest singular value is truncated in the normalized frame before the
    back-transfer, which keeps the rank exactly 2.
    """
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        keep = weights > 0
        if keep.sum() < 8:
            raise InsufficientSupport("weighted eight-point fit needs >= 8 positive-weight points")
        coords = coords[keep]
        weights = weights[keep]
    elif coords.shape[0] < 8:
        raise InsufficientSupport("eight-point fit needs >= 8 points")
    T1, src_n = conditioning_transform(coords[:, :2], weights)
    T2, dst_n = conditioning_transform(coords[:, 2:], weights)
    rows = _epipolar_rows(src_n, dst_n)
    if weights is not None:
        rows *= np.sqrt(weights)[:, None]
    try:
        _, s, vh = np.linalg.svd(rows)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure("SVD failed in the eight-point solve") from exc
    s9 = np.zeros(9)
    s9[: s.shape[0]] = s
    if s9[7] <= 0 or s9[0] / s9[7] > CONDITION_LIMIT:
        raise NumericalFailure("eight-point system is ill-conditioned")
    f = vh[-1].reshape(3, 3)
    u, sv, vt = np.linalg.svd(f)
    f = u @ np.diag([sv[0], sv[1], 0.0]) @ vt
    return normalized_fundamental(T2.T @ f @ T1)


def sampson_residuals(model: FundamentalMatrix, coords: np.ndarray) -> np.ndarray:
    """Sampson distances in pixels; np.inf where the constraint gradient vanishes."""
    f = model.matrix
    x1h = homogeneous(coords[:, :2])
    x2h = homogeneous(coords[:, 2:])
    fx1 = x1h @ f.T          # epipolar lines in image 2
    ftx2 = x2h @ f           # epipolar lines in image 1
    value = np.einsum("ij,ij->i", x2h, fx1)
    grad = fx1[:, 0] ** 2 + fx1[:, 1] ** 2 + ftx2[:, 0] ** 2 + ftx2[:, 1] ** 2
    out = np.full(coords.shape[0], np.inf)
    ok = grad > 1e-15
    out[ok] = np.abs(value[ok]) / np.sqrt(grad[ok])
    return out


def right_epipole(f: np.ndarray) -> np.ndarray:
    """Unit-norm right null vector e with F e = 0 (the image-1 epipole)."""
    _, _, vh = np.linalg.svd(f)
    return vh[-1]


def oriented_epipolar_consistent(model: FundamentalMatrix, coords: np.ndarray) -> bool:
    """True iff all correspondences share the same epipolar orientation sign.

    For each correspondence the epipolar line of the second point in image 1
    is compared against the line joining the image-1 epipole with the first
    point; a genuine camera pair with points in front of both cameras gives
    one consistent sign.  Degenerate epipoles (rank < 2) return False.
    """
    if coords.shape[0] == 1:
        return True
    f = model.matrix
    s = np.linalg.svd(f, compute_uv=False)
    if s[1] < 1e-12 * s[0]:
        return False
    e1 = right_epipole(f)
    x1h = homogeneous(coords[:, :2])
    x2h = homogeneous(coords[:, 2:])
    lines1 = x2h @ f
    joins = np.cross(np.broadcast_to(e1, x1h.shape), x1h)
    signs = np.einsum("ij,ij->i", lines1, joins)
    return bool(np.all(signs > 0) or np.all(signs < 0))
