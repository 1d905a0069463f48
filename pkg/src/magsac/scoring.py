"""Residual noise model and model quality functions.

Inlier residuals are modeled by a chi distribution with ``rho`` degrees of
freedom scaled by the unknown noise sigma; outliers are uniform on
[0, outlier_bound].  The marginalized quality integrates the model
log-likelihood over sigma in (0, sigma_max] instead of fixing a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, exp, lgamma, log, sqrt

import numpy as np
from scipy.stats import chi2

from .exceptions import MagsacError
from .geometry.types import Model, PointSet, ProblemDef

# residuals below this floor are lifted before taking logarithms; keeps the
# log-likelihood finite on exact fits without drowning them in the
# vanishing-density artifact of the chi(rho >= 2) model at r = 0
DEFAULT_RESIDUAL_FLOOR = 0.5


@dataclass(frozen=True)
class NoiseConfig:
    """Noise-marginalization parameters for one problem/dataset pair."""

    rho: int
    outlier_bound: float
    sigma_max: float = 10.0
    partitions: int = 10
    quantile: float = 0.99
    residual_floor: float = DEFAULT_RESIDUAL_FLOOR

    def __post_init__(self):
        if self.rho < 1:
            raise ValueError("rho must be >= 1")
        if self.sigma_max <= 0:
            raise ValueError("sigma_max must be positive")
        if self.partitions < 2:
            raise ValueError("at least 2 partitions are required")
        if not 0.0 < self.quantile < 1.0:
            raise ValueError("quantile must lie in (0, 1)")
        if self.outlier_bound <= 0:
            raise ValueError("outlier_bound must be positive")
        if residual_threshold(self.sigma_max, self.rho, self.quantile) > self.outlier_bound:
            raise ValueError("outlier_bound must be >= the threshold at sigma_max")

    @property
    def gate(self) -> float:
        """Inlier gate in pixels: the threshold at sigma_max."""
        return residual_threshold(self.sigma_max, self.rho, self.quantile)


def chi_norm_constant(rho: int) -> float:
    """Normalization constant of the chi residual density, 1 / (2^(rho/2) Gamma(rho/2))."""
    return 1.0 / (2.0 ** (rho / 2.0) * exp(lgamma(rho / 2.0)))


@lru_cache(maxsize=64)
def threshold_slope(rho: int, quantile: float) -> float:
    """Slope of the threshold function: threshold = slope * sigma."""
    return sqrt(chi2.ppf(quantile, rho))


def residual_threshold(sigma: float, rho: int, quantile: float = 0.99) -> float:
    """Inlier-outlier threshold implied by noise sigma: the chi quantile, linear in sigma."""
    return sigma * threshold_slope(rho, quantile)


def inlier_residual_density(r, sigma: float, rho: int):
    """Density of inlier residuals: 2 C(rho) sigma^-rho exp(-r^2 / 2 sigma^2) r^(rho-1)."""
    r = np.asarray(r, dtype=float)
    value = (
        2.0
        * chi_norm_constant(rho)
        * sigma ** (-rho)
        * np.exp(-(r**2) / (2.0 * sigma**2))
        * r ** (rho - 1)
    )
    return value if value.ndim else float(value)


def default_outlier_bound(points: PointSet, problem: ProblemDef) -> float:
    """Outlier support bound: image diagonal, else the bounding-box diagonal
    of the residual-bearing image's points."""
    if points.k == 2:
        if points.image1_diag is not None:
            return float(points.image1_diag)
        xy = points.coords
    else:
        if points.image2_diag is not None:
            return float(points.image2_diag)
        xy = points.coords[:, 2:]
    span = xy.max(axis=0) - xy.min(axis=0)
    diag = float(np.hypot(span[0], span[1]))
    return max(diag, 1.0)


def default_noise_config(
    points: PointSet,
    problem: ProblemDef,
    sigma_max: float = 10.0,
    partitions: int = 10,
    quantile: float = 0.99,
    residual_floor: float = DEFAULT_RESIDUAL_FLOOR,
) -> NoiseConfig:
    bound = default_outlier_bound(points, problem)
    bound = max(bound, residual_threshold(sigma_max, problem.rho, quantile))
    return NoiseConfig(
        rho=problem.rho,
        outlier_bound=bound,
        sigma_max=sigma_max,
        partitions=partitions,
        quantile=quantile,
        residual_floor=residual_floor,
    )


# ---------------------------------------------------------------------------
# fixed-threshold qualities


def ransac_quality(model: Model, sigma: float, points: PointSet, problem: ProblemDef) -> float:
    """Inlier count with sigma used directly as the residual threshold."""
    res = problem.residual_fn(model, points.coords)
    return float(np.count_nonzero(res < sigma))


def msac_quality(model: Model, sigma: float, points: PointSet, problem: ProblemDef) -> float:
    """Truncated-quadratic score over points with squared residual < (9/4) sigma^2."""
    res = problem.residual_fn(model, points.coords)
    cutoff = 2.25 * sigma * sigma
    sq = res * res
    gated = sq[sq < cutoff]
    return float(np.sum(1.0 - gated / cutoff))


# ---------------------------------------------------------------------------
# marginalized qualities


def marginalized_ransac_quality(
    model: Model, points: PointSet, problem: ProblemDef, cfg: NoiseConfig
) -> float:
    """Inlier count averaged over the threshold in (0, sigma_max]:
    sum over residuals below sigma_max of (1 - D / sigma_max)."""
    res = problem.residual_fn(model, points.coords)
    gated = res[res < cfg.sigma_max]
    return float(np.sum(1.0 - gated / cfg.sigma_max))


def uniform_loglik_quality(
    model: Model, points: PointSet, problem: ProblemDef, cfg: NoiseConfig
) -> float:
    """Marginalized log-likelihood under uniform inlier (0, sigma) and outlier
    (0, outlier_bound) densities; closed form of the sigma average."""
    res = problem.residual_fn(model, points.coords)
    n = res.shape[0]
    l = cfg.outlier_bound
    gated = res[res < cfg.sigma_max]
    k = gated.shape[0]
    value = k * (log(l / cfg.sigma_max) + 1.0) - n * log(l)
    if k:
        pos = gated > 0
        terms = np.zeros_like(gated)
        terms[pos] = gated[pos] * (1.0 + np.log(l / gated[pos]))
        value -= terms.sum() / cfg.sigma_max
    return float(value)


@dataclass(frozen=True)
class ResidualProfile:
    """Sorted residuals plus the prefix statistics feeding the marginalized scores.

    ``K`` counts residuals below the gate at sigma_max; ``sigmas`` is the
    induced grid (residual / threshold slope); ``half_sq_prefix`` holds
    0.5 * cumulative sum of squared residuals and ``log_prefix`` the
    cumulative sum of log residuals (floored) for the first K entries.
    """

    sorted_residuals: np.ndarray
    order: np.ndarray
    slope: float
    K: int
    sigmas: np.ndarray
    half_sq_prefix: np.ndarray
    log_prefix: np.ndarray
    n: int

    def count_below(self, threshold: float) -> int:
        """Number of points with residual strictly below ``threshold``."""
        return int(np.searchsorted(self.sorted_residuals, threshold, side="left"))


def build_residual_profile(
    model: Model, points: PointSet, problem: ProblemDef, cfg: NoiseConfig
) -> ResidualProfile:
    res = problem.residual_fn(model, points.coords)
    res = np.where(np.isnan(res), np.inf, res)
    order = np.argsort(res, kind="stable")
    sorted_res = res[order]
    slope = threshold_slope(cfg.rho, cfg.quantile)
    K = int(np.searchsorted(sorted_res, cfg.gate, side="left"))
    gated = sorted_res[:K]
    return ResidualProfile(
        sorted_residuals=sorted_res,
        order=order,
        slope=slope,
        K=K,
        sigmas=gated / slope,
        half_sq_prefix=0.5 * np.cumsum(gated**2),
        log_prefix=np.cumsum(np.log(np.maximum(gated, cfg.residual_floor))),
        n=res.shape[0],
    )


def magsac_quality(profile: ResidualProfile, cfg: NoiseConfig) -> float:
    """Noise-marginalized log-likelihood quality; higher is better.

    The inlier set is constant between consecutive grid values, so the
    sigma average of the log-likelihood is integrated piece by piece in
    closed form over (sigma_i, sigma_i+1] with the tail piece ending at
    sigma_max; a model with no gated point scores -n * ln(outlier_bound).
    """
    n = profile.n
    l = cfg.outlier_bound
    base = -n * log(l)
    K = profile.K
    if K == 0:
        return base
    lo = profile.sigmas
    hi = np.concatenate([profile.sigmas[1:], [cfg.sigma_max]])
    widths = hi - lo
    live = widths > 0
    if not live.any():
        return base
    lo, hi, widths = lo[live], hi[live], widths[live]
    counts = np.arange(1, K + 1, dtype=float)[live]
    half_sq = profile.half_sq_prefix[live]
    log_pref = profile.log_prefix[live]

    const = log(2.0 * chi_norm_constant(cfg.rho) * l)
    int_log = hi * np.log(hi) - hi - np.where(lo > 0, lo * np.log(np.maximum(lo, 1e-300)) - lo, 0.0)
    pieces = counts * (const * widths - cfg.rho * int_log)
    # integral of R_i / sigma^2 over the piece; R_i > 0 implies lo > 0
    pos = half_sq > 0
    pieces[pos] -= half_sq[pos] * (1.0 / lo[pos] - 1.0 / hi[pos])
    pieces += (cfg.rho - 1) * log_pref * widths
    return base + float(pieces.sum()) / cfg.sigma_max
