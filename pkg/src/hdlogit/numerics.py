"""Dense linear algebra, quadrature, and optimization primitives.

Everything operates on float64 numpy arrays.  All functions are pure, so
concurrent callers never share mutable state.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular
from scipy.optimize import minimize

from .errors import DegenerateDesign, NonFiniteObjective, NotPositiveDefinite

__all__ = [
    "cholesky",
    "weighted_xtx",
    "hat_diagonals",
    "gauss_hermite",
    "nelder_mead",
    "simple_linreg",
]

# Symmetry tolerance for Cholesky inputs.
_SYM_TOL = 1e-10


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix.

    A single retry with jitter ``1e-10 * trace(a) / dim`` on the diagonal is
    attempted before giving up; information matrices only fail here when the
    weights have degenerated.

    Raises
    ------
    NotPositiveDefinite
        If the (possibly jittered) factorization hits a non-positive pivot.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > _SYM_TOL * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    a = 0.5 * (a + a.T)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-10 * np.trace(a) / a.shape[0]
    try:
        return np.linalg.cholesky(a + jitter * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            "matrix is not positive definite (non-positive pivot)"
        ) from None


def weighted_xtx(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted cross-product ``X' diag(w) X``, symmetrized."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if w.shape != (x.shape[0],):
        raise ValueError(
            f"weight length {w.shape} does not match {x.shape[0]} rows"
        )
    m = (x * w[:, None]).T @ x
    return 0.5 * (m + m.T)


def hat_diagonals(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Diagonal of the weighted projection ``W^1/2 X (X'WX)^-1 X' W^1/2``.

    Each entry lies in [0, 1] and the total equals the column count of a
    full-rank ``x``.

    Raises
    ------
    SingularInformation
        If ``X'WX`` has no Cholesky factor.
    """
    from .errors import SingularInformation

    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    try:
        chol = cholesky(weighted_xtx(x, w))
    except NotPositiveDefinite as exc:
        raise SingularInformation(str(exc)) from None
    # h_i = w_i * || L^-1 x_i ||^2, via one triangular solve against X'.
    v = solve_triangular(chol, x.T, lower=True)
    return w * np.einsum("ji,ji->i", v, v)


def gauss_hermite(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the m-point Gauss-Hermite rule (weight e^{-x^2}).

    The weights sum to sqrt(pi).  For expectations under N(0, 1) evaluate
    ``sum(w * f(sqrt(2) * x)) / sqrt(pi)``, exact for polynomials up to
    degree ``2m - 1``.
    """
    if m < 1:
        raise ValueError(f"node count must be >= 1, got {m}")
    return np.polynomial.hermite.hermgauss(m)


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 2000,
) -> tuple[np.ndarray, float]:
    """Minimize ``f`` by the Nelder-Mead simplex method.

    Stops when the simplex diameter drops below ``tol`` or after ``max_iter``
    iterations, returning the best vertex either way.

    Raises
    ------
    NonFiniteObjective
        If ``f`` returns NaN or infinity at the start point or during
        iteration.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))

    def guarded(x: np.ndarray) -> float:
        value = float(f(x))
        if not np.isfinite(value):
            raise NonFiniteObjective(f"objective is {value!r} at {x!r}")
        return value

    guarded(x0)
    result = minimize(
        guarded,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": tol,
            "fatol": float("inf"),
            "maxiter": max_iter,
            "maxfev": 50 * max_iter,
        },
    )
    return np.atleast_1d(result.x), float(result.fun)


def simple_linreg(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least squares of ``y`` on ``x``; returns (intercept, slope).

    Raises
    ------
    DegenerateDesign
        If ``x`` is constant, so the slope is undefined.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise DegenerateDesign("all x values are equal")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    return intercept, slope
