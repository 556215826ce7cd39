"""Data-generating process for the simulation experiments.

Covariate rows are drawn i.i.d. either from N(0, Sigma) with AR(1)
correlation ``psi^|i-j|`` or from independent Bernoulli(lambda) entries.
The signal vector is a named template rescaled so that var(x'beta) equals
the target ``gamma0^2``; the intercept is ``gamma * sqrt(rho2)``.

Reproducibility contract: every stream is seeded with a SplitMix64 hash of
(seed, point_id, replicate) feeding numpy's PCG64 generator; normal variates
use numpy's ziggurat.  Identical configurations therefore give bitwise
identical samples, independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import UnknownConfig
from .glm import LogisticData
from .numerics import cholesky

__all__ = [
    "SIGNAL_CONFIGS",
    "COVARIATE_FAMILIES",
    "SimConfig",
    "GeneratedSample",
    "splitmix64",
    "derive_seed",
    "rng_from",
    "make_signal",
    "ar1_matrix",
    "generate_dataset",
]

SIGNAL_CONFIGS = ("train-grid", "s1", "s2", "u1", "u2")
COVARIATE_FAMILIES = ("normal-ar1", "bernoulli")

_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """One round of the SplitMix64 mixing function (public-domain constants)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(*parts: int) -> int:
    """Fold integer parts into one 64-bit stream key: acc <- mix(acc ^ part)."""
    acc = 0
    for part in parts:
        acc = splitmix64(acc ^ (int(part) & _MASK64))
    return acc


def rng_from(*parts: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(*parts)))


@dataclass(frozen=True)
class SimConfig:
    """One cell of an experiment grid.

    ``p`` is ceil(n * kappa); the intercept and limiting signal strength
    derive from (gamma, rho2) as beta0 = gamma * sqrt(rho2) and
    gamma0 = gamma * sqrt(1 - rho2).
    """

    n: int
    kappa: float
    gamma: float
    rho2: float = 0.0
    psi: float = 0.0
    signal_config: str = "train-grid"
    covariate_family: str = "normal-ar1"
    bernoulli_p: float = 0.1
    seed: int = 0
    replicate: int = 0
    point_id: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must be in (0, 1), got {self.kappa}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 <= self.rho2 < 1.0:
            raise ValueError(f"rho2 must be in [0, 1), got {self.rho2}")
        if not -1.0 < self.psi < 1.0:
            raise ValueError(f"psi must be in (-1, 1), got {self.psi}")
        if self.signal_config not in SIGNAL_CONFIGS:
            raise UnknownConfig(f"unknown signal config {self.signal_config!r}")
        if self.covariate_family not in COVARIATE_FAMILIES:
            raise ValueError(f"unknown covariate family {self.covariate_family!r}")
        if not 0.0 < self.bernoulli_p < 1.0:
            raise ValueError("bernoulli_p must be in (0, 1)")

    @property
    def p(self) -> int:
        return max(1, math.ceil(self.n * self.kappa))

    @property
    def beta0(self) -> float:
        return self.gamma * math.sqrt(self.rho2)

    @property
    def gamma0(self) -> float:
        return self.gamma * math.sqrt(1.0 - self.rho2)


@dataclass
class GeneratedSample:
    """A simulated dataset plus the truth that produced it;
    ``realized_signal`` is var(x'beta) under the covariate distribution."""

    data: LogisticData
    beta_true: np.ndarray
    beta0_true: float
    realized_signal: float


def make_signal(config: str, p: int) -> np.ndarray:
    """Untruncated signal template; rescaled to the target strength later.

    train-grid: equi-spaced 1..10; s1: equi-spaced -10..10;
    s2: first ceil(p/5) entries -10, next ceil(p/5) entries 10, rest 0;
    u1: blocks of ceil(p/5) at -3 and -1 leading, 1 trailing, rest 0;
    u2: same as train-grid.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if config in ("train-grid", "u2"):
        return np.linspace(1.0, 10.0, p)
    if config == "s1":
        return np.linspace(-10.0, 10.0, p)
    m = math.ceil(p / 5)
    v = np.zeros(p)
    if config == "s2":
        v[0:m] = -10.0
        v[m : min(2 * m, p)] = 10.0
        return v
    if config == "u1":
        v[0:m] = -3.0
        v[m : min(2 * m, p)] = -1.0
        v[p - m : p] = 1.0
        return v
    raise UnknownConfig(f"unknown signal config {config!r}")


def ar1_matrix(p: int, psi: float) -> np.ndarray:
    """Correlation matrix with entries psi^|i-j|."""
    idx = np.arange(p)
    return psi ** np.abs(idx[:, None] - idx[None, :]) if psi != 0.0 else np.eye(p)


def generate_dataset(cfg: SimConfig) -> GeneratedSample:
    """Draw one dataset: covariates, rescaled signal, Bernoulli responses.

    The template beta* is rescaled to beta = gamma0 * beta* / ||L' beta*||
    (L the Cholesky factor of Sigma), which pins var(x'beta) at gamma0^2 for
    the normal family.  For Bernoulli covariates the denominator picks up a
    sqrt(lambda (1 - lambda)) factor, giving the same variance when psi = 0.
    """
    rng = rng_from(cfg.seed, cfg.point_id, cfg.replicate)
    p = cfg.p
    sigma = ar1_matrix(p, cfg.psi)
    chol = cholesky(sigma)
    template = make_signal(cfg.signal_config, p)
    scale = float(np.linalg.norm(chol.T @ template))
    if scale == 0.0:
        raise ValueError("signal template has zero strength under Sigma")

    if cfg.covariate_family == "normal-ar1":
        beta = cfg.gamma0 * template / scale
        x = rng.standard_normal((cfg.n, p)) @ chol.T
        realized = float(beta @ sigma @ beta)
    else:
        lam = cfg.bernoulli_p
        beta = cfg.gamma0 * template / (math.sqrt(lam * (1.0 - lam)) * scale)
        x = (rng.random((cfg.n, p)) < lam).astype(float)
        realized = float(lam * (1.0 - lam) * (beta @ beta))

    eta = cfg.beta0 + x @ beta
    y = (rng.random(cfg.n) < expit(eta)).astype(float)
    return GeneratedSample(
        data=LogisticData(y=y, x=x, has_intercept=True),
        beta_true=beta,
        beta0_true=cfg.beta0,
        realized_signal=realized,
    )
