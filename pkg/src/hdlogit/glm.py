"""Logistic likelihoods and the three fitters used throughout the package.

* ``fit_ml`` -- maximum likelihood via iteratively reweighted least squares,
  with a divergence guard because the ML estimate need not exist.
* ``fit_mjpl`` -- maximum Jeffreys'-prior penalized likelihood via
  quasi-Fisher scoring with step halving; its estimates are finite even on
  separated data.
* ``fit_gamma_log`` -- Gamma-response GLM with log link, used to estimate
  multiplicative models with constant coefficient of variation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import expit

from .errors import NonPositiveResponse, NotPositiveDefinite, SingularInformation
from .numerics import cholesky, weighted_xtx

__all__ = [
    "LogisticData",
    "GlmControl",
    "FitResult",
    "GammaFit",
    "log_likelihood",
    "jeffreys_penalty",
    "penalized_loglik",
    "penalized_score",
    "fit_ml",
    "fit_mjpl",
    "fit_gamma_log",
]

# FitResult.status values.
CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
DIVERGING = "diverging"

# Guard on the ML coefficient sup-norm; beyond this the fit is declared
# diverging (infinite estimates under separation).
ML_DIVERGENCE_GUARD = 1e4


@dataclass
class LogisticData:
    """Binary responses with an n-by-p covariate matrix.

    When ``has_intercept`` is set, fitters prepend a column of ones, and
    coefficient vectors carry the intercept first.
    """

    y: np.ndarray
    x: np.ndarray
    has_intercept: bool = True

    def __post_init__(self) -> None:
        self.y = np.asarray(self.y, dtype=float).ravel()
        self.x = np.asarray(self.x, dtype=float)
        if self.x.ndim != 2:
            raise ValueError("x must be a 2-d array")
        if self.x.shape[0] != self.y.size:
            raise ValueError(
                f"{self.y.size} responses but {self.x.shape[0]} covariate rows"
            )
        if not np.all((self.y == 0.0) | (self.y == 1.0)):
            raise ValueError("responses must be 0 or 1")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("covariates must be finite")

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def design(self) -> np.ndarray:
        """Model matrix actually used by the fitters."""
        if self.has_intercept:
            return np.hstack([np.ones((self.n, 1)), self.x])
        return self.x


@dataclass(frozen=True)
class GlmControl:
    """Fitter knobs.

    ``tol`` is the sup-norm of the proposed update at which iterations stop;
    the default targets third-decimal accuracy.  ``clamp_eps`` bounds fitted
    probabilities away from 0 and 1 so weights never vanish exactly.
    """

    tol: float = 1e-3
    max_iter: int = 300
    clamp_eps: float = 1e-10
    max_step_halvings: int = 10

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class FitResult:
    """Outcome of a logistic fit; ``theta`` is (intercept, slopes) when the
    data carry an intercept."""

    theta: np.ndarray
    converged: bool
    iterations: int
    score_norm: float
    elapsed: float
    status: str = CONVERGED


@dataclass
class GammaFit:
    """Gamma-GLM fit: coefficients on the log scale, moment-based dispersion,
    and the fraction of null deviance explained."""

    coefficients: np.ndarray
    dispersion: float
    deviance_explained: float


def _probabilities(design: np.ndarray, theta: np.ndarray, clamp_eps: float) -> np.ndarray:
    mu = expit(design @ theta)
    return np.clip(mu, clamp_eps, 1.0 - clamp_eps)


def log_likelihood(theta: np.ndarray, data: LogisticData) -> float:
    """Logistic log-likelihood sum(y*eta - log(1 + exp(eta))), overflow-safe."""
    theta = np.asarray(theta, dtype=float)
    eta = data.design() @ theta
    return float(data.y @ eta - np.logaddexp(0.0, eta).sum())


def jeffreys_penalty(
    theta: np.ndarray, data: LogisticData, clamp_eps: float = 1e-10
) -> float:
    """Half the log-determinant of the Fisher information X'W(theta)X.

    Probabilities are clamped to [clamp_eps, 1 - clamp_eps] so the penalty
    stays finite at extreme linear predictors.

    Raises
    ------
    SingularInformation
        If the information matrix has no Cholesky factor.
    """
    design = data.design()
    theta = np.asarray(theta, dtype=float)
    mu = _probabilities(design, theta, clamp_eps)
    try:
        chol = cholesky(weighted_xtx(design, mu * (1.0 - mu)))
    except NotPositiveDefinite as exc:
        raise SingularInformation(str(exc)) from None
    return float(np.log(np.diag(chol)).sum())


def penalized_loglik(
    theta: np.ndarray, data: LogisticData, clamp_eps: float = 1e-10
) -> float:
    """Log-likelihood plus the Jeffreys penalty."""
    return log_likelihood(theta, data) + jeffreys_penalty(theta, data, clamp_eps)


def _adjusted_residual(
    design: np.ndarray, y: np.ndarray, theta: np.ndarray, clamp_eps: float
) -> tuple[np.ndarray, np.ndarray]:
    """Working residual of the penalized score and the weight vector.

    The residual is y - mu + h*(1/2 - mu) with h the hat diagonals at the
    current weights, so the penalized score is design' @ residual.
    """
    mu = _probabilities(design, theta, clamp_eps)
    w = mu * (1.0 - mu)
    try:
        chol = cholesky(weighted_xtx(design, w))
    except NotPositiveDefinite as exc:
        raise SingularInformation(str(exc)) from None
    v = solve_triangular(chol, design.T, lower=True)
    h = w * np.einsum("ji,ji->i", v, v)
    return y - mu + h * (0.5 - mu), w


def penalized_score(
    theta: np.ndarray, data: LogisticData, clamp_eps: float = 1e-10
) -> np.ndarray:
    """Gradient of the Jeffreys-penalized log-likelihood.

    Component j is sum_i {y_i - mu_i + h_i (1/2 - mu_i)} x_ij.
    """
    design = data.design()
    theta = np.asarray(theta, dtype=float)
    residual, _ = _adjusted_residual(design, data.y, theta, clamp_eps)
    return design.T @ residual


def fit_mjpl(data: LogisticData, control: GlmControl | None = None) -> FitResult:
    """Maximize the Jeffreys-penalized log-likelihood by quasi-Fisher scoring.

    Starts at zero.  Each iteration solves the Fisher system for the adjusted
    score, tries the full step, and halves it (up to
    ``control.max_step_halvings`` times) until the penalized objective
    increases; if no trial step increases it, the smallest step is accepted
    and iteration continues.  Convergence is declared once the sup-norm of
    the full proposed step drops below ``control.tol``; the proposed step is
    the inverse information times the score, so a small one certifies
    stationarity, which a halved step never can.

    The returned coefficients are finite for any full-rank design, separated
    or not.

    Raises
    ------
    SingularInformation
        If the information matrix at the current iterate cannot be factored
        (rank-deficient design).
    """
    control = control or GlmControl()
    start_time = time.perf_counter()
    design = data.design()
    y = data.y
    theta = np.zeros(design.shape[1])
    objective = penalized_loglik(theta, data, control.clamp_eps)

    converged = False
    iterations = 0
    for iterations in range(1, control.max_iter + 1):
        residual, w = _adjusted_residual(design, y, theta, control.clamp_eps)
        chol = cholesky(weighted_xtx(design, w))
        step = cho_solve((chol, True), design.T @ residual)

        theta, objective = _backtrack(
            data, theta, step, objective, control, penalized=True
        )
        if float(np.max(np.abs(step))) < control.tol:
            converged = True
            break

    score = penalized_score(theta, data, control.clamp_eps)
    return FitResult(
        theta=theta,
        converged=converged,
        iterations=iterations,
        score_norm=float(np.max(np.abs(score))),
        elapsed=time.perf_counter() - start_time,
        status=CONVERGED if converged else MAX_ITERATIONS,
    )


def fit_ml(
    data: LogisticData,
    control: GlmControl | None = None,
    start: np.ndarray | None = None,
    guard: float = ML_DIVERGENCE_GUARD,
) -> FitResult:
    """Maximum likelihood by Fisher scoring (IRLS) with a divergence guard.

    On separated data the likelihood has no interior maximum; once the
    coefficient sup-norm exceeds ``guard`` the fit stops with status
    ``"diverging"`` and ``converged=False``.  A factorization failure after
    the coefficients have started to blow up is reported the same way.

    Raises
    ------
    SingularInformation
        If the design is rank-deficient at the starting point.
    """
    control = control or GlmControl()
    start_time = time.perf_counter()
    design = data.design()
    y = data.y
    theta = (
        np.zeros(design.shape[1])
        if start is None
        else np.asarray(start, dtype=float).copy()
    )
    objective = log_likelihood(theta, data)

    converged = False
    status = MAX_ITERATIONS
    iterations = 0
    for iterations in range(1, control.max_iter + 1):
        mu = _probabilities(design, theta, control.clamp_eps)
        try:
            chol = cholesky(weighted_xtx(design, mu * (1.0 - mu)))
        except NotPositiveDefinite as exc:
            if iterations == 1:
                raise SingularInformation(str(exc)) from None
            status = DIVERGING
            break
        step = cho_solve((chol, True), design.T @ (y - mu))

        theta, objective = _backtrack(
            data, theta, step, objective, control, penalized=False
        )
        if np.max(np.abs(theta)) > guard:
            status = DIVERGING
            break
        if float(np.max(np.abs(step))) < control.tol:
            converged = True
            status = CONVERGED
            break

    mu = _probabilities(design, theta, control.clamp_eps)
    score = design.T @ (y - mu)
    return FitResult(
        theta=theta,
        converged=converged,
        iterations=iterations,
        score_norm=float(np.max(np.abs(score))),
        elapsed=time.perf_counter() - start_time,
        status=status,
    )


def _backtrack(
    data: LogisticData,
    theta: np.ndarray,
    step: np.ndarray,
    objective: float,
    control: GlmControl,
    penalized: bool,
) -> tuple[np.ndarray, float]:
    """Step halving: first trial step that increases the objective wins.

    If none does, the smallest trial step is accepted so iteration can
    continue from a fresh point.  Trial points where the penalty is not
    computable are treated as objective -inf.
    """

    def evaluate(point: np.ndarray) -> float:
        if not penalized:
            return log_likelihood(point, data)
        try:
            return penalized_loglik(point, data, control.clamp_eps)
        except SingularInformation:
            return -np.inf

    scale = 1.0
    candidate = theta + step
    cand_obj = evaluate(candidate)
    for _ in range(control.max_step_halvings):
        if cand_obj > objective:
            return candidate, cand_obj
        scale *= 0.5
        candidate = theta + scale * step
        cand_obj = evaluate(candidate)
    return candidate, cand_obj


def fit_gamma_log(
    x_design: np.ndarray,
    y: np.ndarray,
    control: GlmControl | None = None,
) -> GammaFit:
    """Gamma-response GLM with log link, fit by IRLS.

    With a log link the working weights are identically one, so each
    iteration is an ordinary least-squares solve of the working response
    ``eta + (y - mu)/mu`` on the design.  The dispersion is the moment
    estimator: Pearson statistic divided by residual degrees of freedom.

    ``control=None`` uses a tighter tolerance (1e-8) than the logistic
    default since downstream exponent estimates feed confidence intervals.

    Raises
    ------
    NonPositiveResponse
        If any response is zero or negative.
    SingularInformation
        If the design is rank-deficient.
    """
    control = control or GlmControl(tol=1e-8, max_iter=100)
    x = np.asarray(x_design, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError("design and response shapes do not match")
    if np.any(y <= 0.0):
        raise NonPositiveResponse("Gamma responses must be strictly positive")

    try:
        chol = cholesky(x.T @ x)
    except NotPositiveDefinite as exc:
        raise SingularInformation(str(exc)) from None

    def ols(target: np.ndarray) -> np.ndarray:
        return cho_solve((chol, True), x.T @ target)

    theta = ols(np.log(y))
    for _ in range(control.max_iter):
        eta = x @ theta
        mu = np.exp(eta)
        new_theta = ols(eta + (y - mu) / mu)
        delta = float(np.max(np.abs(new_theta - theta)))
        theta = new_theta
        if delta < control.tol:
            break

    mu = np.exp(x @ theta)
    dof = y.size - x.shape[1]
    pearson = float(np.sum(((y - mu) / mu) ** 2))
    dispersion = pearson / dof if dof > 0 else 0.0

    deviance = _gamma_deviance(y, mu)
    null_deviance = _gamma_deviance(y, np.full_like(y, y.mean()))
    if null_deviance <= 1e-12:
        explained = 1.0
    else:
        explained = 1.0 - deviance / null_deviance
    return GammaFit(
        coefficients=theta,
        dispersion=dispersion,
        deviance_explained=explained,
    )


def _gamma_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    return float(2.0 * np.sum((y - mu) / mu - np.log(y / mu)))
