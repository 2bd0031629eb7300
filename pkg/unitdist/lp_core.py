"""
Small dense linear programs.

All programs in this package have few variables (the z-vector of the
Euclidean bound, the inner distribution of a Johnson scheme, the orbit values
of a Cayley-graph function) and up to ~10^5 inequality rows. They are written
in one normal form:

    minimize    objective . z
    subject to  row . z >= bound        for every (row, bound)
                lower_i <= z_i <= upper_i   (None = unbounded)

and handed to the HiGHS dual simplex through `scipy.optimize.linprog`.
The solution is audited afterwards: the largest row violation and a
duality-gap estimate recomputed from the returned marginals are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from .errors import SolverError
from .logger import log

FEASIBILITY_TOL = 1e-9
# the smallest primal/dual feasibility tolerance HiGHS accepts
HIGHS_MIN_TOL = 1e-10


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """
    # Args
    objective: coefficients to minimize
    rows: matrix of constraint rows, shape (m, len(objective))
    bounds: right hand sides, row . z >= bound
    variable_bounds: optional list of (lower, upper) per variable, None = free
    """

    objective: np.ndarray
    rows: np.ndarray
    bounds: np.ndarray
    variable_bounds: list[tuple[float | None, float | None]] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        nvar = self.objective.size
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, nvar) if np.size(self.rows) else np.zeros((0, nvar))
        self.bounds = np.asarray(self.bounds, dtype=float).ravel()

        if nvar == 0:
            raise SolverError("a linear program needs at least one variable")
        if self.rows.shape[1] != nvar:
            raise SolverError(
                f"rows have {self.rows.shape[1]} columns, objective has {nvar}"
            )
        if self.rows.shape[0] != self.bounds.size:
            raise SolverError(
                f"{self.rows.shape[0]} rows but {self.bounds.size} bounds"
            )
        if self.variable_bounds is not None and len(self.variable_bounds) != nvar:
            raise SolverError(
                f"{len(self.variable_bounds)} variable bounds for {nvar} variables"
            )
        for what, arr in (("objective", self.objective), ("rows", self.rows), ("bounds", self.bounds)):
            if not np.all(np.isfinite(arr)):
                raise SolverError(f"non-finite coefficient in {what}")

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @classmethod
    def from_constraints(
        cls,
        objective,
        constraints: list[tuple[list[float], float]],
        variable_bounds=None,
    ) -> LinearProgram:
        """Build from a list of (row, bound) pairs."""
        rows = [list(r) for r, _ in constraints]
        bounds = [b for _, b in constraints]
        nvar = len(objective)
        for r in rows:
            if len(r) != nvar:
                raise SolverError(f"row of length {len(r)} for {nvar} variables")
        return cls(
            objective=objective,
            rows=np.array(rows, dtype=float).reshape(-1, nvar),
            bounds=np.array(bounds, dtype=float),
            variable_bounds=variable_bounds,
        )

    def violation(self, z) -> float:
        """Largest violation of a row or a variable bound at z (0 if feasible)."""
        z = np.asarray(z, dtype=float)
        worst = 0.0
        if self.rows.shape[0]:
            worst = max(worst, float(np.max(self.bounds - self.rows @ z)))
        for zi, (lo, hi) in zip(z, self._bounds_list()):
            if lo is not None:
                worst = max(worst, lo - zi)
            if hi is not None:
                worst = max(worst, zi - hi)
        return max(worst, 0.0)

    def _bounds_list(self):
        if self.variable_bounds is None:
            return [(None, None)] * self.num_variables
        return [
            (None if lo is None or lo == -math.inf else float(lo),
             None if hi is None or hi == math.inf else float(hi))
            for lo, hi in self.variable_bounds
        ]


@dataclass
class LpSolution:
    status: LpStatus
    z: np.ndarray | None = None
    objective_value: float | None = None
    max_violation: float | None = None
    # |primal - dual| recomputed from the marginals
    duality_gap: float | None = None
    # one multiplier >= 0 per row, certifies the optimum by weak duality
    dual: np.ndarray | None = field(default=None, repr=False)
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def solve(
    p: LinearProgram,
    feasibility_tol: float = FEASIBILITY_TOL,
    time_limit: float | None = None,
) -> LpSolution:
    """
    Solve `p` and audit the result.

    An optimal solution whose violation exceeds `feasibility_tol` is re-solved
    once without presolve, at the smallest tolerance HiGHS accepts, before
    giving up with a SolverError.
    """
    bounds = p._bounds_list()
    nvar = p.num_variables
    if p.rows.shape[0] == 0 and all(b == (None, None) for b in bounds):
        if np.any(p.objective != 0):
            return LpSolution(LpStatus.UNBOUNDED, message="no constraints on free variables")
        return LpSolution(
            LpStatus.OPTIMAL,
            z=np.zeros(nvar),
            objective_value=0.0,
            max_violation=0.0,
            duality_gap=0.0,
            dual=np.zeros(0),
        )

    tol = max(feasibility_tol / 10, HIGHS_MIN_TOL)
    for attempt in range(2):
        options = {
            "primal_feasibility_tolerance": tol,
            "dual_feasibility_tolerance": tol,
            # the second attempt skips presolve, which removes most residual slop
            "presolve": attempt == 0,
        }
        if time_limit:
            options["time_limit"] = float(time_limit)

        res = linprog(
            c=p.objective,
            A_ub=-p.rows if p.rows.shape[0] else None,
            b_ub=-p.bounds if p.rows.shape[0] else None,
            bounds=bounds,
            method="highs-ds",
            options=options,
        )

        if res.status == 2:
            return LpSolution(LpStatus.INFEASIBLE, message=res.message)
        if res.status == 3:
            return LpSolution(LpStatus.UNBOUNDED, message=res.message)
        if res.status != 0:
            raise SolverError(f"linear program not solved: {res.message}")

        z = np.asarray(res.x, dtype=float)
        violation = p.violation(z)
        dual, gap = _dual_certificate(p, res, bounds)
        sol = LpSolution(
            LpStatus.OPTIMAL,
            z=z,
            objective_value=float(p.objective @ z),
            max_violation=violation,
            duality_gap=gap,
            dual=dual,
            message=res.message,
        )
        if violation <= feasibility_tol:
            log.debug(
                f"lp solved: {nvar} vars, {p.rows.shape[0]} rows, "
                f"obj={sol.objective_value:.12g}, viol={violation:.2e}, gap={gap:.2e}"
            )
            return sol
        log.warning(f"lp violation {violation:.2e} above {feasibility_tol:.0e}, re-solving")
        tol = HIGHS_MIN_TOL

    raise SolverError(
        f"optimal solution violates constraints by {violation:.3e}",
        payload={"max_violation": violation},
    )


def _dual_certificate(p: LinearProgram, res, bounds) -> tuple[np.ndarray, float]:
    """
    Row multipliers y >= 0 and the duality gap they certify.

    linprog works with -rows . z <= -bounds; its marginals are <= 0, so
    y = -marginals. The dual objective is bounds . y plus the contribution of
    the finite variable bounds.
    """
    if p.rows.shape[0]:
        y = -np.asarray(res.ineqlin.marginals, dtype=float)
        dual_value = float(p.bounds @ y)
    else:
        y = np.zeros(0)
        dual_value = 0.0
    lower = np.asarray(res.lower.marginals, dtype=float)
    upper = np.asarray(res.upper.marginals, dtype=float)
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None:
            dual_value += lo * lower[i]
        if hi is not None:
            dual_value += hi * upper[i]
    gap = abs(float(res.fun) - dual_value)
    return y, gap
