"""Post-fit arithmetic: shrinkage rescaling, power-law estimation, bootstrap
confidence intervals, and aggregate error summaries.

Penalized estimates in the regime where the ML estimate does not exist are
shrunk by a factor well approximated by a power law in (kappa, gamma,
gamma0); dividing by that factor recovers the signal on aggregate.  The
power law's exponents are estimated from training summaries with a
Gamma-log GLM (or a log-scale OLS variant) and given case-resampling BCa
intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateBootstrap,
    DegenerateObservations,
    LengthMismatch,
    NonPositiveInput,
    NonPositiveResponse,
    NonPositiveScale,
)
from .glm import fit_gamma_log

__all__ = [
    "RescaleCoefficients",
    "DEFAULT_RESCALE_COEFFICIENTS",
    "BcaInterval",
    "PowerLawFit",
    "shrinkage_factor",
    "rescale_estimates",
    "aggregate_bias",
    "aggregate_mse",
    "fit_power_law",
    "bootstrap_bca",
    "out_of_sample_r2",
]


@dataclass(frozen=True)
class RescaleCoefficients:
    """Power-law constants: the shrinkage factor is
    kappa^b1 * gamma^b2 * gamma0^b3 (b0 is diagnostic only); ``phi`` is the
    dispersion of the multiplicative fit that produced them."""

    b0: float
    b1: float
    b2: float
    b3: float
    phi: float = 0.0


# Shipped defaults: estimates from the large reference experiment.
DEFAULT_RESCALE_COEFFICIENTS = RescaleCoefficients(
    b0=-0.033, b1=-1.172, b2=-1.869, b3=0.817, phi=0.004
)


@dataclass
class BcaInterval:
    lower: float
    upper: float
    level: float
    resamples: int


@dataclass
class PowerLawFit:
    coefficients: RescaleCoefficients
    deviance_explained: float
    n_points: int
    method: str


def shrinkage_factor(
    kappa: float,
    gamma: float,
    gamma0: float,
    coefficients: RescaleCoefficients = DEFAULT_RESCALE_COEFFICIENTS,
    mle_exists: bool = False,
) -> float:
    """Approximate multiplicative shrinkage of the penalized estimator.

    Equals 1 when the ML estimate exists asymptotically, and
    kappa^b1 * gamma^b2 * gamma0^b3 otherwise (b0 plays no role).
    """
    if kappa <= 0.0 or gamma <= 0.0 or gamma0 <= 0.0:
        raise NonPositiveInput("kappa, gamma, and gamma0 must be positive")
    if mle_exists:
        return 1.0
    b = coefficients
    return float(kappa**b.b1 * gamma**b.b2 * gamma0**b.b3)


def rescale_estimates(beta_tilde: np.ndarray, q: float) -> np.ndarray:
    """Divide estimates elementwise by a positive scale factor."""
    if q <= 0.0:
        raise NonPositiveScale(f"scale factor must be positive, got {q}")
    return np.asarray(beta_tilde, dtype=float) / q


def aggregate_bias(estimates: np.ndarray, truth: np.ndarray) -> float:
    """Mean over coordinates of (estimate - truth)."""
    estimates, truth = _paired(estimates, truth)
    return float(np.mean(estimates - truth))


def aggregate_mse(estimates: np.ndarray, truth: np.ndarray) -> float:
    """Mean over coordinates of (estimate - truth)^2."""
    estimates, truth = _paired(estimates, truth)
    return float(np.mean((estimates - truth) ** 2))


def _paired(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 1:
        raise LengthMismatch("need at least one coordinate")
    return a, b


def fit_power_law(
    kappa: np.ndarray,
    gamma: np.ndarray,
    gamma0: np.ndarray,
    delta1: np.ndarray,
    exists: np.ndarray | None = None,
    rho2: np.ndarray | None = None,
    cutoff: float = 0.7,
    method: str = "gamma",
) -> PowerLawFit:
    """Estimate the shrinkage power law from training-point slope summaries.

    Fits E(delta1) = exp(b0) * kappa^b1 * gamma^b2 * gamma0^b3 on the points
    where the ML estimate does not exist (``exists`` false) and
    ``rho2 <= cutoff``; either filter is skipped when the array is omitted.
    ``method="gamma"`` is a Gamma-response GLM with log link (constant
    coefficient of variation); ``method="ols"`` regresses log(delta1)
    directly, with ``phi`` the residual variance.  The two nearly coincide
    when the dispersion is small.
    """
    kappa = np.asarray(kappa, dtype=float).ravel()
    gamma = np.asarray(gamma, dtype=float).ravel()
    gamma0 = np.asarray(gamma0, dtype=float).ravel()
    delta1 = np.asarray(delta1, dtype=float).ravel()
    if not (kappa.size == gamma.size == gamma0.size == delta1.size):
        raise LengthMismatch("kappa, gamma, gamma0, delta1 must align")

    mask = np.isfinite(delta1)
    if exists is not None:
        mask &= ~np.asarray(exists, dtype=bool).ravel()
    if rho2 is not None:
        mask &= np.asarray(rho2, dtype=float).ravel() <= cutoff
    if np.any(delta1[mask] <= 0.0):
        raise NonPositiveResponse("slope summaries must be positive")
    n_points = int(mask.sum())
    if n_points < 5:
        raise ValueError(f"need at least 5 usable points, got {n_points}")

    design = np.column_stack(
        [
            np.ones(n_points),
            np.log(kappa[mask]),
            np.log(gamma[mask]),
            np.log(gamma0[mask]),
        ]
    )
    response = delta1[mask]

    if method == "gamma":
        fit = fit_gamma_log(design, response)
        coefs = fit.coefficients
        phi = fit.dispersion
        explained = fit.deviance_explained
    elif method == "ols":
        log_response = np.log(response)
        coefs, *_ = np.linalg.lstsq(design, log_response, rcond=None)
        residuals = log_response - design @ coefs
        dof = n_points - design.shape[1]
        phi = float(residuals @ residuals) / dof if dof > 0 else 0.0
        total = float(np.sum((log_response - log_response.mean()) ** 2))
        explained = 1.0 - float(residuals @ residuals) / total if total > 0 else 1.0
    else:
        raise ValueError(f"unknown method {method!r}")

    return PowerLawFit(
        coefficients=RescaleCoefficients(
            b0=float(coefs[0]),
            b1=float(coefs[1]),
            b2=float(coefs[2]),
            b3=float(coefs[3]),
            phi=float(phi),
        ),
        deviance_explained=float(explained),
        n_points=n_points,
        method=method,
    )


def bootstrap_bca(
    points: np.ndarray,
    statistic: Callable[[np.ndarray], np.ndarray],
    n_resamples: int = 9999,
    level: float = 0.95,
    seed: int = 0,
) -> list[BcaInterval]:
    """Case-resampling bootstrap with BCa intervals, one per statistic
    coordinate.

    ``points`` is an array of cases (rows resampled with replacement);
    ``statistic`` maps such an array to a vector.  The bias correction z0 is
    the normal quantile of the fraction of resample statistics below the
    point estimate; the acceleration comes from jackknife skewness; interval
    endpoints are linearly interpolated quantiles at the adjusted levels.
    Deterministic given the seed.

    Raises
    ------
    DegenerateBootstrap
        If, for some coordinate, every resample statistic is identical.
    """
    if n_resamples < 999:
        raise ValueError("need at least 999 resamples")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    points = np.asarray(points)
    n = points.shape[0]
    if n < 2:
        raise ValueError("need at least two cases")

    estimate = np.atleast_1d(np.asarray(statistic(points), dtype=float))
    rng = np.random.Generator(np.random.PCG64(seed))
    boot = np.empty((n_resamples, estimate.size))
    for b in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        boot[b] = np.atleast_1d(statistic(points[idx]))

    jack = np.empty((n, estimate.size))
    for i in range(n):
        jack[i] = np.atleast_1d(statistic(np.delete(points, i, axis=0)))
    jack_centered = jack.mean(axis=0) - jack

    alpha_lo = (1.0 - level) / 2.0
    z_lo, z_hi = norm.ppf(alpha_lo), norm.ppf(1.0 - alpha_lo)

    intervals = []
    for j in range(estimate.size):
        column = boot[:, j]
        if np.all(column == column[0]):
            raise DegenerateBootstrap(
                f"all {n_resamples} resample statistics equal for coordinate {j}"
            )
        frac_below = np.mean(column < estimate[j])
        # Guard the normal quantile; 0 or 1 only in near-degenerate cases.
        frac_below = min(max(frac_below, 0.5 / n_resamples), 1.0 - 0.5 / n_resamples)
        z0 = norm.ppf(frac_below)
        denom = float(np.sum(jack_centered[:, j] ** 2) ** 1.5)
        accel = float(np.sum(jack_centered[:, j] ** 3)) / (6.0 * denom) if denom > 0 else 0.0
        adj_lo = norm.cdf(z0 + (z0 + z_lo) / (1.0 - accel * (z0 + z_lo)))
        adj_hi = norm.cdf(z0 + (z0 + z_hi) / (1.0 - accel * (z0 + z_hi)))
        lower, upper = np.quantile(column, [adj_lo, adj_hi])
        if lower > upper:
            lower, upper = upper, lower
        intervals.append(
            BcaInterval(
                lower=float(lower),
                upper=float(upper),
                level=level,
                resamples=n_resamples,
            )
        )
    return intervals


def out_of_sample_r2(observed: np.ndarray, predicted: np.ndarray) -> float:
    """1 - SS_res / SS_tot for externally supplied predictions.

    At most 1, with equality exactly at perfect prediction; unbounded below.

    Raises
    ------
    DegenerateObservations
        If the observations have no variance.
    """
    observed, predicted = _paired(observed, predicted)
    if observed.size < 2:
        raise LengthMismatch("need at least two observations")
    total = float(np.sum((observed - observed.mean()) ** 2))
    if total == 0.0:
        raise DegenerateObservations("observed values are all equal")
    residual = float(np.sum((observed - predicted) ** 2))
    return 1.0 - residual / total
