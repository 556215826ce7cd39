"""Finite-sample existence of the logistic ML estimate via linear programming.

The ML estimate exists if and only if the data are not separated: no
direction ``b`` satisfies ``(2y_i - 1) xbar_i' b >= 0`` for every
observation with strict inequality somewhere.  Searching for such a
direction is a linear program; box bounds on ``b`` keep it bounded, and any
strictly positive optimum certifies separation regardless of scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .glm import LogisticData

__all__ = [
    "LinearProgram",
    "LpSolution",
    "SeparationVerdict",
    "solve_lp",
    "detect_separation",
]

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

# An LP optimum above this is read as genuinely positive (separation).
SEPARATION_TOL = 1e-7


@dataclass
class LinearProgram:
    """maximize objective @ b  subject to  constraints @ b >= rhs,
    lower <= b <= upper (elementwise; entries may be +-inf)."""

    objective: np.ndarray
    constraints: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float)
        self.constraints = np.asarray(self.constraints, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        d = self.objective.size
        if self.constraints.ndim != 2 or self.constraints.shape[1] != d:
            raise ValueError("constraint matrix width must match objective length")
        if self.rhs.size != self.constraints.shape[0]:
            raise ValueError("one rhs entry per constraint row required")
        if self.lower.size != d or self.upper.size != d:
            raise ValueError("box bounds must match objective length")


@dataclass
class LpSolution:
    status: str
    value: float | None = None
    point: np.ndarray | None = None


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve a maximization LP; statuses are optimal/unbounded/infeasible.

    Backed by the HiGHS solver with a 1e-9 primal feasibility tolerance, so
    reported optima satisfy the constraints to that accuracy.
    """
    result = linprog(
        c=-lp.objective,
        A_ub=-lp.constraints,
        b_ub=-lp.rhs,
        bounds=list(zip(lp.lower, lp.upper)),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-9},
    )
    if result.status == 0:
        return LpSolution(OPTIMAL, value=-float(result.fun), point=np.asarray(result.x))
    if result.status == 2:
        return LpSolution(INFEASIBLE)
    if result.status == 3:
        return LpSolution(UNBOUNDED)
    raise RuntimeError(f"LP solver failed: {result.message}")


@dataclass
class SeparationVerdict:
    """``certificate`` is a separating direction over the design columns
    (intercept coordinate first when the data carry one); present only when
    separated."""

    separated: bool
    certificate: np.ndarray | None = None
    optimum: float = 0.0


def detect_separation(data: LogisticData, tol: float = SEPARATION_TOL) -> SeparationVerdict:
    """Decide complete or quasi-complete separation of a logistic dataset.

    Maximizes ``sum_i (2y_i - 1) xbar_i' b`` over ``-1 <= b <= 1`` subject to
    every term being nonnegative.  The optimum is zero exactly when the
    classes overlap (ML estimate exists) and strictly positive under
    separation; ``tol`` draws the line between the two.
    """
    signed = (2.0 * data.y - 1.0)[:, None] * data.design()
    d = signed.shape[1]
    lp = LinearProgram(
        objective=signed.sum(axis=0),
        constraints=signed,
        rhs=np.zeros(signed.shape[0]),
        lower=-np.ones(d),
        upper=np.ones(d),
    )
    solution = solve_lp(lp)
    if solution.status != OPTIMAL:
        # b = 0 is always feasible and the box bounds the objective.
        raise RuntimeError(f"separation LP unexpectedly {solution.status}")
    if solution.value > tol:
        return SeparationVerdict(True, certificate=solution.point, optimum=solution.value)
    return SeparationVerdict(False, optimum=solution.value)
