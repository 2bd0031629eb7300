"""
Upper bounds for the density of sets in R^n avoiding distance 1.

Every bound is a feasible point z = (z0, z1, z2, ...) of

    minimize  z0 + sum_i z_{i+1} alpha_ratio_i
    s.t.      z_{i+1} >= 0,   z0 + z1 + sum_i z_{i+1} >= 1,
              F(t) = z0 + z1 Omega_n(t) + sum_i z_{i+1} K_i(t) >= 0  for all t >= 0,

where K_i(t) is the weighted mean of Omega_n(r_v t) over the radius profile
of the i-th subgraph. Without subgraphs the optimum is `theta_infinity(n)`.

The semi-infinite constraint is sampled on [0, t_max], the sampled LP is
solved, and the solution is certified: the minimum of F on [0, t_max] is
located (grid scan plus bounded scalar minimization around the lowest cells),
z0 is raised by the deficit plus `refine_tol`, and the tail t > t_max is
covered by certified bounds on |Omega_n|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from . import lp_core
from .errors import CertificationError, InvalidUsage, SolverError
from .geometry import GraphProfile, UnitDistanceGraph
from .logger import log
from .specialfn import MAX_ARRAY_DIMENSION, first_bessel_zero, omega_array, omega_tail_bound
from .utility import timed

# --------------------------------- problem ------------------------------------------ #


@dataclass(frozen=True)
class SubgraphConstraint:
    """
    A finite vertex set V with measure lambda, seen through its radii.

    # Args
    profile: (radius, weight) pairs
    alpha_ratio: an upper bound for alpha_lambda(G) / lambda(V), in (0, 1]
    label: for reports
    """

    profile: tuple[tuple[float, float], ...]
    alpha_ratio: float
    label: str = ""

    def __post_init__(self):
        profile = tuple((float(r), float(w)) for r, w in self.profile)
        object.__setattr__(self, "profile", profile)
        if not profile:
            raise InvalidUsage("a subgraph constraint needs at least one vertex")
        if any(not r > 0 for r, _ in profile):
            raise InvalidUsage("subgraph radii must be positive")
        if any(not w > 0 for _, w in profile):
            raise InvalidUsage("subgraph weights must be positive")
        if not 0 < self.alpha_ratio <= 1:
            raise InvalidUsage(f"alpha ratio must lie in (0, 1], got {self.alpha_ratio}")

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.profile)

    def kernel_mean(self, n: int, ts: np.ndarray) -> np.ndarray:
        """K(t) = sum_v lambda_v Omega_n(r_v t) / lambda(V)."""
        acc = np.zeros_like(ts, dtype=float)
        for r, w in self.profile:
            acc += w * omega_array(n, r * ts)
        return acc / self.total_weight

    def tail_bound(self, n: int, T: float) -> float:
        """sup over t >= T of |K(t)|, bounded termwise."""
        return sum(w * omega_tail_bound(n, r * T) for r, w in self.profile) / self.total_weight


def constraint_from_graph(g: UnitDistanceGraph, alpha: int | float) -> SubgraphConstraint:
    """alpha is alpha_lambda(G), or an upper bound for it."""
    return SubgraphConstraint(
        tuple(g.radius_profile()),
        float(alpha) / sum(g.weights),
        label=str(g.source) if g.source is not None else g.label,
    )


def constraint_from_profile(profile: GraphProfile, alpha: int | float, label: str = "") -> SubgraphConstraint:
    total = sum(w for _, w in profile.profile)
    return SubgraphConstraint(profile.profile, float(alpha) / total, label)


@dataclass(frozen=True)
class BoundProblem:
    """
    # Args
    n: dimension
    constraints: subgraph constraints, possibly none
    t_max: sampling horizon, raised to 2 j_{n/2,1} when smaller
    samples: uniform grid size on [0, t_max]
    refine_tol: added to z0 on top of the observed deficit
    refine_cells: number of lowest grid cells refined by local minimization
    revalidate_factor: the final check runs on a grid this much finer
    tail_retries: how often t_max is doubled when the tail check fails
    """

    n: int
    constraints: tuple[SubgraphConstraint, ...] = ()
    t_max: float = 50.0
    samples: int = 4000
    refine_tol: float = 1e-9
    refine_cells: int = 5
    revalidate_factor: int = 10
    tail_retries: int = 1

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise InvalidUsage(f"dimension must be an integer >= 2, got {self.n!r}")
        if self.n > MAX_ARRAY_DIMENSION:
            raise InvalidUsage(f"dimension above {MAX_ARRAY_DIMENSION} is not supported")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.samples < 10:
            raise InvalidUsage("at least 10 samples are needed")
        if not self.refine_tol > 0:
            raise InvalidUsage("refine_tol must be positive")
        floor = 2.0 * first_bessel_zero(self.n).t_min
        if self.t_max < floor:
            log.debug(f"t_max raised from {self.t_max} to {floor:.3f} for n={self.n}")
            object.__setattr__(self, "t_max", floor)

    @property
    def num_variables(self) -> int:
        return 2 + len(self.constraints)

    def objective_vector(self) -> np.ndarray:
        return np.array([1.0, 0.0] + [c.alpha_ratio for c in self.constraints])

    def evaluate(self, z, ts) -> np.ndarray:
        """F(t) for the vector z."""
        ts = np.asarray(ts, dtype=float)
        F = z[0] + z[1] * omega_array(self.n, ts)
        for zi, c in zip(z[2:], self.constraints):
            F = F + zi * c.kernel_mean(self.n, ts)
        return F

    def columns(self, ts) -> np.ndarray:
        """The sample rows [1, Omega_n(t), K_1(t), ...]."""
        ts = np.asarray(ts, dtype=float)
        cols = [np.ones_like(ts), omega_array(self.n, ts)]
        cols += [c.kernel_mean(self.n, ts) for c in self.constraints]
        return np.column_stack(cols)

    def tail_margin(self, z, T: float) -> float:
        """z0 minus a certified bound of |F - z0| on [T, oo)."""
        slack = abs(z[1]) * omega_tail_bound(self.n, T)
        slack += sum(zi * c.tail_bound(self.n, T) for zi, c in zip(z[2:], self.constraints))
        return z[0] - slack


# --------------------------------- results ------------------------------------------ #


@dataclass
class CertificationReport:
    # minimum of F on [0, tail_horizon] after local refinement, before the bump
    grid_min: float
    t_at_min: float
    tail_horizon: float
    tail_margin: float
    bump: float = 0.0
    # minimum of F on the finer grid after the bump
    revalidated_min: float | None = None
    feasible: bool = True
    objective: float | None = None

    def to_dict(self) -> dict:
        return {
            "grid_min": self.grid_min,
            "t_at_min": self.t_at_min,
            "tail_horizon": self.tail_horizon,
            "tail_margin": self.tail_margin,
            "bump": self.bump,
            "revalidated_min": self.revalidated_min,
            "feasible": self.feasible,
            "objective": self.objective,
        }


@dataclass
class CertifiedBound:
    z: np.ndarray
    objective: float
    report: CertificationReport
    # optimum of the sampled LP, before certification
    lp_objective: float | None = None
    problem: BoundProblem | None = field(default=None, repr=False)

    @property
    def chromatic_lower(self) -> int:
        return chromatic_lower(self.objective)


# -------------------------------- operations ---------------------------------------- #


def theta_infinity(n: int) -> float:
    """-Omega_n(j) / (1 - Omega_n(j)) at the global minimum j = j_{n/2,1}."""
    m = first_bessel_zero(n).value
    return -m / (1.0 - m)


def chromatic_lower(bound: float) -> int:
    """ceil(1 / bound). Reciprocals within 1e-9 of an integer count as that integer."""
    bound = float(bound)
    if not 0 < bound < 1:
        raise InvalidUsage(f"a density bound lies in (0, 1), got {bound}")
    r = 1.0 / bound
    k = round(r)
    if abs(r - k) <= 1e-9 * k:
        return int(k)
    return math.ceil(r)


def theorem_feasible_point(n: int, r: float, gamma: float, m: float) -> np.ndarray:
    """The explicit point (m^n, 1, gamma^n) for a single constraint of radius r."""
    if not (0 < r < 1 and gamma > 0 and m > 0):
        raise InvalidUsage("need 0 < r < 1, gamma > 0 and m > 0")
    return np.array([m**n, 1.0, gamma**n])


def _locate_minimum(p: BoundProblem, z, T: float, samples: int, cells: int) -> tuple[float, float]:
    """Grid scan of F on [0, T], then bounded minimization around the lowest cells."""
    ts = np.linspace(0.0, T, samples)
    F = p.evaluate(z, ts)
    best_i = int(np.argmin(F))
    best_t, best_f = float(ts[best_i]), float(F[best_i])

    # lowest local minima of the sampled values
    interior = np.flatnonzero((F[1:-1] <= F[:-2]) & (F[1:-1] <= F[2:])) + 1
    candidates = interior[np.argsort(F[interior])][:cells] if interior.size else []
    for k in candidates:
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, samples - 1)]
        res = optimize.minimize_scalar(
            lambda t: float(p.evaluate(z, [t])[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best_f:
            best_t, best_f = float(res.x), float(res.fun)
    return best_f, best_t


def verify_feasible(z, p: BoundProblem, tolerance: float = 1e-6) -> CertificationReport:
    """
    Run only the certification stage on a given z. Reports the minimum of F
    and where it is attained, the tail margin and the objective; infeasibility
    is reported through `feasible`, not raised.
    """
    z = np.asarray(z, dtype=float)
    if z.size != p.num_variables:
        raise InvalidUsage(f"z has {z.size} entries, the problem has {p.num_variables} variables")
    T = p.t_max
    grid_min, t_at = _locate_minimum(p, z, T, p.samples * p.revalidate_factor, p.refine_cells)
    margin = p.tail_margin(z, T)
    feasible = (
        grid_min >= -tolerance
        and margin >= -tolerance
        and bool(np.all(z[2:] >= 0))
        and float(np.sum(z[1:]) + z[0]) >= 1 - 1e-12
    )
    objective = float(p.objective_vector() @ z)
    if not feasible:
        log.info(f"z infeasible for n={p.n}: min F = {grid_min:.3e} at t = {t_at:.6f}, tail margin {margin:.3e}")
    return CertificationReport(
        grid_min=grid_min,
        t_at_min=t_at,
        tail_horizon=T,
        tail_margin=margin,
        feasible=feasible,
        objective=objective,
    )


def _solve_sampled(p: BoundProblem, feasibility_tol: float, time_limit: float | None) -> lp_core.LpSolution:
    ts = np.linspace(0.0, p.t_max, p.samples)
    rows = np.vstack([np.ones(p.num_variables), p.columns(ts)])
    bounds = np.concatenate([[1.0], np.zeros(ts.size)])
    variable_bounds = [(None, None), (None, None)] + [(0.0, None)] * len(p.constraints)
    lp = lp_core.LinearProgram(p.objective_vector(), rows, bounds, variable_bounds)
    sol = lp_core.solve(lp, feasibility_tol=feasibility_tol, time_limit=time_limit)
    if not sol.optimal:
        # z = (1, 0, ..., 0) is always feasible
        raise SolverError(f"sampled program for n={p.n} reported {sol.status.value}")
    return sol


def solve_theta_g(
    p: BoundProblem,
    feasibility_tol: float = lp_core.FEASIBILITY_TOL,
    time_limit: float | None = None,
) -> CertifiedBound:
    """Solve the sampled program for `p` and certify the result."""
    problem = p
    for attempt in range(p.tail_retries + 1):
        with timed(f"sampled LP n={problem.n}"):
            sol = _solve_sampled(problem, feasibility_tol, time_limit)
        z = np.array(sol.z, dtype=float)
        z[2:] = np.maximum(z[2:], 0.0)
        # keep the normalisation row exact
        norm = float(np.sum(z))
        if norm < 1.0:
            z[0] += 1.0 - norm

        grid_min, t_at = _locate_minimum(problem, z, problem.t_max, problem.samples, problem.refine_cells)
        bump = max(0.0, -grid_min) + problem.refine_tol
        z[0] += bump
        margin = problem.tail_margin(z, problem.t_max)
        if margin >= 0:
            break
        log.warning(
            f"tail check failed for n={problem.n} at T={problem.t_max:.1f} (margin {margin:.3e})"
        )
        if attempt < p.tail_retries:
            problem = replace(problem, t_max=2 * problem.t_max)
    else:
        raise CertificationError(
            f"could not certify the tail for n={p.n} up to T={problem.t_max:.1f}",
            payload={"n": p.n, "tail_horizon": problem.t_max, "tail_margin": margin},
        )

    fine_min, fine_t = _locate_minimum(
        problem, z, problem.t_max, problem.samples * problem.revalidate_factor, problem.refine_cells
    )
    if fine_min < 0:
        log.warning(f"finer grid found F({fine_t:.6f}) = {fine_min:.3e}, raising z0 again")
        extra = -fine_min + problem.refine_tol
        z[0] += extra
        bump += extra
        fine_min += extra
        margin = problem.tail_margin(z, problem.t_max)

    objective = float(problem.objective_vector() @ z)
    report = CertificationReport(
        grid_min=grid_min,
        t_at_min=t_at,
        tail_horizon=problem.t_max,
        tail_margin=margin,
        bump=bump,
        revalidated_min=fine_min,
        feasible=True,
        objective=objective,
    )
    log.info(
        f"n={p.n}: certified bound {objective:.9g} (lp {sol.objective_value:.9g}, bump {bump:.1e})"
    )
    return CertifiedBound(z=z, objective=objective, report=report, lp_objective=sol.objective_value, problem=problem)
