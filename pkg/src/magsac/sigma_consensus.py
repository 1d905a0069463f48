"""Noise-marginalized model refinement (sigma-consensus).

Given a rough model, gate the points by the threshold at sigma_max, fit a
least-squares model on each prefix of the noise-scale partition, accumulate
per-point inlier likelihoods marginalized over sigma, and polish with one
weighted least-squares fit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import log

import numpy as np

from .exceptions import MagsacError
from .geometry.types import Model, PointSet, ProblemDef
from .scoring import NoiseConfig, chi_norm_constant, threshold_slope

# below this effective sigma range the gated points are an exact fit and the
# partition sweep would only chase rounding noise
EXACT_FIT_SIGMA = 1e-9


@dataclass(frozen=True)
class PartitionSchedule:
    """Uniform partition of the (shrunk) sigma range into ``d`` bins."""

    delta_sigma: float
    bin_uppers: np.ndarray

    @classmethod
    def build(cls, sigma_max: float, partitions: int) -> "PartitionSchedule":
        delta = sigma_max / partitions
        return cls(delta_sigma=delta, bin_uppers=delta * np.arange(1, partitions + 1))


@dataclass
class SigmaConsensusResult:
    refined_model: Model
    weights: np.ndarray
    bins_used: int
    gated_inlier_indices: np.ndarray
    refinement_skipped: bool = False


def point_weight_contribution(
    theta_sigma: Model,
    point: np.ndarray,
    sigma_i: float,
    delta: float,
    cfg: NoiseConfig,
    problem: ProblemDef,
) -> float:
    """One partition's summand of the marginalized inlier likelihood of a point.

    2 C(rho) * delta * sigma^-rho * D^(rho-1) * exp(-D^2 / (2 sigma^2)), with
    the residual D taken against the partition's model.  The global
    1 / sigma_max factor is applied by the accumulator.
    """
    d = problem.residual_fn(theta_sigma, np.atleast_2d(point))[0]
    return float(_weight_terms(np.array([d]), sigma_i, delta, cfg)[0])


def _weight_terms(residuals: np.ndarray, sigma_i: float, delta: float, cfg: NoiseConfig) -> np.ndarray:
    out = np.zeros_like(residuals)
    ok = np.isfinite(residuals)
    r = residuals[ok]
    out[ok] = (
        2.0
        * chi_norm_constant(cfg.rho)
        * delta
        * sigma_i ** (-cfg.rho)
        * r ** (cfg.rho - 1)
        * np.exp(-(r**2) / (2.0 * sigma_i**2))
    )
    return out


def sigma_consensus(
    points: PointSet,
    theta: Model,
    problem: ProblemDef,
    cfg: NoiseConfig,
    residuals: np.ndarray | None = None,
    workers: int = 1,
) -> SigmaConsensusResult:
    """Refine ``theta`` by marginalized weighted least squares.

    Points farther than the sigma_max gate keep weight zero.  Each partition
    fits the prefix of gated points reachable at its sigma with unit weights;
    every gated point then accumulates its likelihood under that fit.  Bins
    whose prefix is smaller than the solver floor are skipped, as are bins
    whose fit fails.  If the final weighted fit is impossible the input model
    is returned with ``refinement_skipped`` set; the caller never sees an
    exception.

    ``workers`` > 1 evaluates the partition fits on a thread pool; the
    accumulation order stays deterministic, so the weights match the
    sequential run.
    """
    n = len(points)
    weights = np.zeros(n)
    if residuals is None:
        residuals = problem.residual_fn(theta, points.coords)
    gate = cfg.gate
    gated_mask = residuals < gate
    gated_idx = np.flatnonzero(gated_mask)
    if gated_idx.shape[0] < problem.m:
        return SigmaConsensusResult(theta, weights, 0, gated_idx, refinement_skipped=True)

    order = np.argsort(residuals[gated_idx], kind="stable")
    gated_idx = gated_idx[order]
    gated_coords = points.coords[gated_idx]
    slope = threshold_slope(cfg.rho, cfg.quantile)
    sigmas = residuals[gated_idx] / slope

    sigma_range = float(sigmas[-1])
    if sigma_range <= EXACT_FIT_SIGMA:
        # every gated point sits on the model: plain unit-weight fit
        try:
            refined = problem.weighted_solver(gated_coords, np.ones(gated_idx.shape[0]))
        except MagsacError:
            return SigmaConsensusResult(theta, weights, 0, gated_idx, refinement_skipped=True)
        weights[gated_idx] = 1.0
        return SigmaConsensusResult(refined, weights, 0, gated_idx)

    schedule = PartitionSchedule.build(sigma_range, cfg.partitions)
    prefix_sizes = np.searchsorted(sigmas, schedule.bin_uppers, side="right")

    fit_cache: dict[int, Model | None] = {}

    def _bin_model(size: int) -> Model | None:
        if size < problem.lsq_floor:
            return None
        if size not in fit_cache:
            try:
                fit_cache[size] = problem.weighted_solver(gated_coords[:size], np.ones(size))
            except MagsacError:
                fit_cache[size] = None
        return fit_cache[size]

    def _bin_weights(bin_index: int) -> np.ndarray | None:
        model = _bin_model(int(prefix_sizes[bin_index]))
        if model is None:
            return None
        res = problem.residual_fn(model, gated_coords)
        return _weight_terms(res, float(schedule.bin_uppers[bin_index]), schedule.delta_sigma, cfg)

    bins_used = 0
    gated_weights = np.zeros(gated_idx.shape[0])
    if workers > 1:
        # prefill the fit cache sequentially (cheap, deterministic), then
        # evaluate the per-bin weight vectors concurrently
        for size in sorted(set(int(s) for s in prefix_sizes)):
            _bin_model(size)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bin_weights, range(cfg.partitions)))
    else:
        results = [_bin_weights(b) for b in range(cfg.partitions)]
    for contribution in results:
        if contribution is None:
            continue
        bins_used += 1
        gated_weights += contribution
    gated_weights /= sigma_range

    weights[gated_idx] = gated_weights
    if np.count_nonzero(gated_weights > 0) < problem.m:
        return SigmaConsensusResult(theta, weights, bins_used, gated_idx, refinement_skipped=True)
    try:
        refined = problem.weighted_solver(gated_coords, gated_weights)
    except MagsacError:
        return SigmaConsensusResult(theta, weights, bins_used, gated_idx, refinement_skipped=True)
    return SigmaConsensusResult(refined, weights, bins_used, gated_idx)


def post_process(
    points: PointSet,
    theta: Model,
    problem: ProblemDef,
    cfg: NoiseConfig,
    workers: int = 1,
) -> Model:
    """Apply sigma-consensus once to polish an estimator's output model."""
    return sigma_consensus(points, theta, problem, cfg, workers=workers).refined_model
