"""
Theta bounds for Cayley graphs on finite abelian groups.

On X = Z_N1 x ... x Z_Nd a real function f is positive definite exactly
when every character coefficient

    f^(chi) = sum_x f(x) cos(2 pi <chi, x>)      <chi, x> = sum_i chi_i x_i / N_i

is nonnegative, so the theta program of a Cayley graph is a linear program:
maximize sum_x f(x) with f(0) = 1, f(S) = 0 and f^ >= 0. Values are reported
in counting normalization (the edgeless graph has theta |X|); divide by |X|
for the density form.

The subgraph-strengthened program adds sum_{v in V} f(v) <= alpha(G[V]),
which every normalized autocorrelation of an independent set satisfies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import linalg

from . import lp_core
from .errors import InvalidUsage, SolverError
from .geometry import FiniteGraph
from .independence import max_independent_set
from .logger import log

MAX_GROUP_ORDER = 10**5
# rows of the character matrix built at once
CHUNK_ROWS = 512


@dataclass(frozen=True, eq=False)
class AbelianCayleyGraph:
    """
    Cayley graph of Z_N1 x ... x Z_Nd with connection set S.

    # Args
    orders: (N1, ..., Nd)
    connection: group elements as tuples; closed under negation on construction
    """

    orders: tuple[int, ...]
    connection: tuple[tuple[int, ...], ...]
    label: str = ""

    def __post_init__(self):
        orders = tuple(int(N) for N in self.orders)
        if not orders or any(N < 1 for N in orders):
            raise InvalidUsage(f"group orders must be positive, got {self.orders}")
        size = math.prod(orders)
        if size > MAX_GROUP_ORDER:
            raise InvalidUsage(f"group of order {size} is above the limit of {MAX_GROUP_ORDER}")

        S = set()
        for s in self.connection:
            s = (s,) if isinstance(s, int) else tuple(s)
            if len(s) != len(orders):
                raise InvalidUsage(f"element {s} does not belong to a group with {len(orders)} factors")
            s = tuple(int(a) % N for a, N in zip(s, orders))
            S.add(s)
            S.add(tuple(-a % N for a, N in zip(s, orders)))
        if tuple(0 for _ in orders) in S:
            raise InvalidUsage("the connection set must not contain 0")

        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "connection", tuple(sorted(S)))
        if not self.label:
            group = "x".join(f"Z{N}" for N in orders)
            object.__setattr__(self, "label", f"cayley({group}; {len(S)} generators)")

    @classmethod
    def cyclic(cls, order: int, connection) -> AbelianCayleyGraph:
        S = [(int(s),) for s in connection]
        return cls((order,), tuple(S), label=f"circulant:{order}:{','.join(str(s) for s in connection)}")

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def is_cyclic(self) -> bool:
        return len(self.orders) == 1

    @cached_property
    def elements(self) -> np.ndarray:
        """All group elements in mixed-radix order, shape (|X|, d)."""
        return np.array(list(itertools.product(*(range(N) for N in self.orders))), dtype=np.int64).reshape(
            self.size, len(self.orders)
        )

    def index(self, element) -> int:
        element = (element,) if isinstance(element, (int, np.integer)) else tuple(element)
        if len(element) != len(self.orders):
            raise InvalidUsage(f"element {element} does not belong to the group {self.orders}")
        k = 0
        for a, N in zip(element, self.orders):
            k = k * N + int(a) % N
        return k

    def negate(self, k: int) -> int:
        return self.index(tuple(-a for a in self.elements[k]))

    @cached_property
    def radix(self) -> np.ndarray:
        return np.cumprod((1,) + self.orders[:0:-1])[::-1].astype(np.int64)

    def to_graph(self) -> FiniteGraph:
        X = self.elements
        mod = np.array(self.orders)
        edges = set()
        for s in self.connection:
            target = ((X + np.array(s)) % mod) @ self.radix
            edges.update((u, int(v)) for u, v in enumerate(target) if u < v)
        return FiniteGraph(self.size, tuple(sorted(edges)), self.label, vertex_transitive=True)


@dataclass(frozen=True)
class SubgraphSpec:
    """
    # Args
    vertices: group elements (ints for cyclic groups, tuples otherwise)
    alpha_value: an upper bound on alpha of the induced subgraph
    """

    vertices: tuple
    alpha_value: int

    def __post_init__(self):
        if not self.vertices:
            raise InvalidUsage("the subgraph needs at least one vertex")
        if self.alpha_value < 1:
            raise InvalidUsage(f"alpha_value must be >= 1, got {self.alpha_value}")


@dataclass
class CayleyTheta:
    value: float
    # f over all group elements, in mixed-radix order
    f: np.ndarray = field(repr=False)
    num_orbits: int
    solution: lp_core.LpSolution = field(repr=False)

    @property
    def density(self) -> float:
        return self.value / self.f.size


# ------------------------------------------------------------------------------------ #
#                                       orbits                                         #
# ------------------------------------------------------------------------------------ #


def _multipliers(g: AbelianCayleyGraph) -> list[int]:
    """Units u of Z_N with uS = S. For product groups only negation is used."""
    if not g.is_cyclic:
        return [1, -1]
    N = g.orders[0]
    S = {s[0] for s in g.connection}
    return [u for u in range(1, N + 1) if math.gcd(u, N) == 1 and {u * s % N for s in S} == S] or [1]


def _orbits(g: AbelianCayleyGraph, symmetrize: bool) -> np.ndarray:
    """Orbit id per element, ids numbered by first occurrence; orbit 0 is {0}."""
    M = g.size
    ids = np.full(M, -1, dtype=np.int64)
    if symmetrize and g.is_cyclic:
        N = g.orders[0]
        us = np.array(_multipliers(g), dtype=np.int64)
        nxt = 0
        for x in range(M):
            if ids[x] < 0:
                ids[(us * x) % N] = nxt
                nxt += 1
        return ids
    nxt = 0
    for x in range(M):
        if ids[x] < 0:
            ids[x] = ids[g.negate(x)] = nxt
            nxt += 1
    return ids


def _character_rows(g: AbelianCayleyGraph, chars: np.ndarray, orbit_ids: np.ndarray, num_orbits: int) -> np.ndarray:
    """Row per character chi, column per orbit o: sum over x in o of cos(2 pi <chi, x>)."""
    X = g.elements.astype(float) / np.array(g.orders, dtype=float)
    order = np.argsort(orbit_ids, kind="stable")
    starts = np.searchsorted(orbit_ids[order], np.arange(num_orbits))
    rows = np.empty((len(chars), num_orbits))
    for lo in range(0, len(chars), CHUNK_ROWS):
        block = chars[lo:lo + CHUNK_ROWS].astype(float)
        C = np.cos(2.0 * math.pi * (block @ X.T))
        rows[lo:lo + CHUNK_ROWS] = np.add.reduceat(C[:, order], starts, axis=1)
    return rows


def _solve(g: AbelianCayleyGraph, sub: SubgraphSpec | None, symmetrize: bool) -> CayleyTheta:
    orbit_ids = _orbits(g, symmetrize)
    num_orbits = int(orbit_ids.max()) + 1
    counts = np.bincount(orbit_ids, minlength=num_orbits)

    # characters share the orbit structure of the elements
    reps = np.unique(orbit_ids, return_index=True)[1]
    rows = _character_rows(g, g.elements[reps], orbit_ids, num_orbits)
    bounds = np.zeros(num_orbits)

    if sub is not None:
        members = np.zeros(num_orbits)
        for v in set(g.index(v) for v in sub.vertices):
            members[orbit_ids[v]] += 1.0
        rows = np.vstack([rows, -members])
        bounds = np.append(bounds, -float(sub.alpha_value))

    variable_bounds = [(None, None)] * num_orbits
    variable_bounds[orbit_ids[0]] = (1.0, 1.0)
    for s in g.connection:
        variable_bounds[orbit_ids[g.index(s)]] = (0.0, 0.0)

    p = lp_core.LinearProgram(
        objective=-counts.astype(float),
        rows=rows,
        bounds=bounds,
        variable_bounds=variable_bounds,
    )
    sol = lp_core.solve(p)
    if not sol.optimal:
        # f = delta_0 is feasible and sum f <= |X| f(0), so the program is bounded
        raise SolverError(f"{g.label}: theta LP reported {sol.status.value}")
    value = -sol.objective_value
    log.debug(f"theta({g.label}) = {value:.9f} over {num_orbits} orbits, dual gap {sol.duality_gap:.1e}")
    return CayleyTheta(value, sol.z[orbit_ids], num_orbits, sol)


def cayley_theta_lp(g: AbelianCayleyGraph, sub: SubgraphSpec | None = None, symmetrize: bool = True) -> CayleyTheta:
    """
    Solve the theta program of `g`, strengthened by `sub` when given.

    With `symmetrize` the plain program on a cyclic group is reduced by the
    unit multipliers fixing S; the strengthened program only uses negation.
    """
    return _solve(g, sub, symmetrize and sub is None)


def theta_cayley(g: AbelianCayleyGraph) -> float:
    return cayley_theta_lp(g).value


def theta_cayley_strengthened(g: AbelianCayleyGraph, sub: SubgraphSpec) -> float:
    return cayley_theta_lp(g, sub).value


def invariant_matrix(g: AbelianCayleyGraph, f) -> np.ndarray:
    """The matrix F[x, y] = f(y - x)."""
    f = np.asarray(f, dtype=float)
    X = g.elements
    diff = (X[None, :, :] - X[:, None, :]) % np.array(g.orders)
    return f[(diff * g.radix).sum(axis=2)]


def min_eigenvalue(g: AbelianCayleyGraph, f) -> float:
    """Smallest eigenvalue of f(y - x); >= 0 iff f is positive definite."""
    return float(linalg.eigh(invariant_matrix(g, f), eigvals_only=True)[0])


def subgraph_alpha(g: AbelianCayleyGraph, vertices, budget: float = 600.0) -> int:
    """Exact alpha of the subgraph induced on `vertices`."""
    idx = sorted(set(g.index(v) for v in vertices))
    bound = max_independent_set(g.to_graph().induced(idx), budget=budget, engine="bnb")
    if not bound.complete:
        raise InvalidUsage(f"{g.label}: alpha of the induced subgraph not settled within {budget} s")
    return bound.value


def ratio_inequality_check(g: AbelianCayleyGraph, vertices, budget: float = 600.0) -> bool:
    """alpha(g) / |X| <= alpha(g[V]) / |V|, both sides exact."""
    vertices = list(vertices)
    idx = sorted(set(g.index(v) for v in vertices))
    if not idx:
        raise InvalidUsage("the subgraph needs at least one vertex")
    whole = max_independent_set(g.to_graph(), budget=budget, engine="bnb")
    if not whole.complete:
        raise InvalidUsage(f"{g.label}: alpha not settled within {budget} s")
    part = subgraph_alpha(g, vertices, budget)
    lhs = Fraction(whole.value, g.size)
    rhs = Fraction(part, len(idx))
    log.debug(f"{g.label}: {lhs} <= {rhs} for |V| = {len(idx)}")
    return lhs <= rhs
