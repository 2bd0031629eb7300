"""
Independence numbers of the generated graphs.

Three sources of alpha statements:

- computed: exact search (bitset branch-and-bound or CP-SAT) with a verified
  witness, or a greedy lower bound when the search does not finish;
- the Frankl-Wilson bound for J(n, 2q-1, q-1), q a prime power;
- the bounds registry, a text file of externally established values.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from pathlib import Path

from cachetools import LRUCache, cached
from humanize import intcomma, naturaldelta

from .errors import InvalidUsage, SolverError
from .geometry import FiniteGraph, GraphSpec, Johnson
from .logger import log

MAX_VERTICES = 100_000
BNB_MAX_VERTICES = 5000
BNB_AUTO_LIMIT = 100


class AlphaKind(str, Enum):
    EXACT = "exact"
    UPPER = "upper"
    LOWER = "lower"


class Provenance(str, Enum):
    COMPUTED_EXACT = "computed-exact"
    COMPUTED_GREEDY = "computed-greedy"
    FRANKL_WILSON = "frankl-wilson"
    EXTERNAL = "external"


@dataclass(frozen=True)
class AlphaBound:
    """
    A statement alpha(G) = / <= / >= value.

    # Args
    graph_id: spec string of the graph
    kind: exact, upper or lower
    value: the bound
    provenance: where the value comes from
    citation: source of an external value
    witness: an independent set of size `value` (exact and lower kinds)
    complete: the exhaustive search finished
    """

    graph_id: str
    kind: AlphaKind
    value: int
    provenance: Provenance
    citation: str = ""
    witness: tuple[int, ...] = field(default=(), repr=False)
    complete: bool = False

    def __post_init__(self):
        if self.value < 0:
            raise InvalidUsage(f"negative independence number {self.value}")
        if self.kind is AlphaKind.EXACT and not (self.complete and len(self.witness) == self.value):
            raise SolverError(f"{self.graph_id}: exact alpha needs a witness and a finished search")
        if self.kind is AlphaKind.LOWER and len(self.witness) != self.value:
            raise SolverError(f"{self.graph_id}: lower bound without a witness of size {self.value}")

    def to_dict(self) -> dict:
        return {
            "graph": self.graph_id,
            "kind": self.kind.value,
            "alpha": self.value,
            "provenance": self.provenance.value,
            "citation": self.citation,
        }


# ------------------------------------------------------------------------------------ #
#                                      searching                                       #
# ------------------------------------------------------------------------------------ #


def greedy_independent_set(g: FiniteGraph) -> list[int]:
    """Repeatedly take a vertex of minimum degree in what is left."""
    adj = g.adjacency
    left = (1 << g.num_vertices) - 1
    chosen = []
    while left:
        best, best_deg = -1, None
        m = left
        while m:
            low = m & -m
            v = low.bit_length() - 1
            d = (adj[v] & left).bit_count()
            if best_deg is None or d < best_deg:
                best, best_deg = v, d
            m ^= low
        chosen.append(best)
        left &= ~(adj[best] | (1 << best))
    return sorted(chosen)


class _OutOfTime(Exception):
    pass


class _BranchAndBound:
    """
    Maximum independent set as maximum clique of the complement, with greedy
    clique covers of G as upper bounds (colourings of the complement).
    Vertices are renumbered by ascending degree in G.
    """

    def __init__(self, g: FiniteGraph, deadline: float):
        self.deadline = deadline
        order = sorted(range(g.num_vertices), key=lambda v: (g.degree(v), v))
        self.label = order
        pos = {v: k for k, v in enumerate(order)}
        M = g.num_vertices
        full = (1 << M) - 1
        self.adj = [0] * M
        for u, v in g.edges:
            self.adj[pos[u]] |= 1 << pos[v]
            self.adj[pos[v]] |= 1 << pos[u]
        self.nonadj = [full & ~(self.adj[v] | (1 << v)) for v in range(M)]
        self.full = full
        self.pos = pos
        self.best: list[int] = []
        self.nodes = 0

    def _cover(self, P: int) -> tuple[list[int], list[int]]:
        """Vertices of P with the number of the clique covering them, ascending."""
        order, bounds = [], []
        U = P
        k = 0
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                U &= ~low
                Q &= self.adj[v]
                order.append(v)
                bounds.append(k)
        return order, bounds

    def _expand(self, R: list[int], P: int):
        self.nodes += 1
        if self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _OutOfTime
        order, bounds = self._cover(P)
        for idx in range(len(order) - 1, -1, -1):
            if len(R) + bounds[idx] <= len(self.best):
                return
            v = order[idx]
            R.append(v)
            newP = P & self.nonadj[v]
            if newP:
                self._expand(R, newP)
            elif len(R) > len(self.best):
                self.best = list(R)
            R.pop()
            P &= ~(1 << v)

    def run(self, incumbent: list[int], fixed: int | None = None) -> tuple[list[int], bool]:
        self.best = [self.pos[v] for v in incumbent]
        try:
            if fixed is None:
                self._expand([], self.full)
            else:
                f = self.pos[fixed]
                P = self.nonadj[f]
                if P:
                    self._expand([f], P)
                elif not self.best:
                    self.best = [f]
            complete = True
        except _OutOfTime:
            complete = False
        return sorted(self.label[v] for v in self.best), complete


def _search_bnb(g: FiniteGraph, budget: float, incumbent: list[int]) -> tuple[list[int], bool]:
    bnb = _BranchAndBound(g, time.monotonic() + budget)
    fixed = 0 if g.vertex_transitive else None
    witness, complete = bnb.run(incumbent, fixed)
    log.debug(f"branch-and-bound visited {intcomma(bnb.nodes)} nodes")
    return witness, complete


def _clique_cover_edges(g: FiniteGraph) -> list[list[int]]:
    """Greedy maximal cliques covering every edge, for at-most-one constraints."""
    adj = g.adjacency
    covered = set()
    cliques = []
    for u, v in g.edges:
        if (u, v) in covered:
            continue
        clique = [u, v]
        cand = adj[u] & adj[v]
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            clique.append(w)
            cand &= adj[w]
        for a in clique:
            for b in clique:
                if a < b:
                    covered.add((a, b))
        cliques.append(clique)
    return cliques


def _search_cpsat(g: FiniteGraph, budget: float, incumbent: list[int], workers: int) -> tuple[list[int], bool]:
    from ortools.sat.python import cp_model

    model = cp_model.CpModel()
    x = [model.NewBoolVar(f"x_{v}") for v in range(g.num_vertices)]
    for clique in _clique_cover_edges(g):
        model.AddAtMostOne([x[v] for v in clique])
    if g.vertex_transitive and g.num_vertices:
        model.Add(x[0] == 1)
    model.Maximize(sum(x))
    for v in incumbent:
        model.AddHint(x[v], 1)

    solver = cp_model.CpSolver()
    solver.parameters.max_time_in_seconds = float(budget)
    solver.parameters.num_search_workers = int(workers)
    status = solver.Solve(model)

    if status == cp_model.OPTIMAL:
        return [v for v in range(g.num_vertices) if solver.Value(x[v])], True
    if status == cp_model.FEASIBLE:
        found = [v for v in range(g.num_vertices) if solver.Value(x[v])]
        return (found if len(found) > len(incumbent) else incumbent), False
    if status == cp_model.UNKNOWN:
        return incumbent, False
    raise SolverError(f"{g.label}: CP-SAT returned {solver.StatusName(status)}")


def max_independent_set(
    g: FiniteGraph,
    budget: float = 600.0,
    engine: str = "auto",
    workers: int = 4,
    bnb_auto_limit: int = BNB_AUTO_LIMIT,
    bnb_max_vertices: int = BNB_MAX_VERTICES,
    max_vertices: int = MAX_VERTICES,
) -> AlphaBound:
    """
    alpha(g) by exhaustive search within `budget` seconds.

    Returns kind=exact with a witness when the search finishes, otherwise the
    best independent set found as kind=lower. For vertex-transitive graphs
    vertex 0 is put into the set up front.

    # Args
    engine: "bnb", "cpsat" or "auto" (bnb up to `bnb_auto_limit` vertices)
    """
    M = g.num_vertices
    graph_id = str(g.source) if getattr(g, "source", None) is not None else g.label
    if M > max_vertices:
        raise InvalidUsage(f"{graph_id}: {intcomma(M)} vertices, above the search limit of {intcomma(max_vertices)}")
    if budget <= 0:
        raise InvalidUsage("the search budget must be positive")
    if engine == "auto":
        engine = "bnb" if M <= bnb_auto_limit else "cpsat"
    if engine not in ("bnb", "cpsat"):
        raise InvalidUsage(f"unknown independence engine {engine!r}")
    if engine == "bnb" and M > bnb_max_vertices:
        raise InvalidUsage(f"{graph_id}: branch-and-bound is limited to {bnb_max_vertices} vertices")

    greedy = greedy_independent_set(g)
    start = time.monotonic()
    if not g.edges:
        witness, complete = list(range(M)), True
    elif engine == "bnb":
        witness, complete = _search_bnb(g, budget, greedy)
    else:
        witness, complete = _search_cpsat(g, budget, greedy, workers)
    elapsed = time.monotonic() - start

    if not g.is_independent(witness):
        raise SolverError(f"{graph_id}: search returned a set that is not independent")
    if len(witness) < len(greedy):
        witness = greedy

    if complete:
        log.info(f"alpha({graph_id}) = {len(witness)} [{engine}, {naturaldelta(elapsed)}]")
        return AlphaBound(
            graph_id, AlphaKind.EXACT, len(witness), Provenance.COMPUTED_EXACT,
            witness=tuple(witness), complete=True,
        )
    log.warning(f"alpha({graph_id}) >= {len(witness)}: search stopped after {naturaldelta(elapsed)}")
    # an interrupted search only holds a heuristic incumbent
    return AlphaBound(graph_id, AlphaKind.LOWER, len(witness), Provenance.COMPUTED_GREEDY, witness=tuple(witness))


def greedy_bound(g: FiniteGraph) -> AlphaBound:
    witness = greedy_independent_set(g)
    graph_id = str(g.source) if getattr(g, "source", None) is not None else g.label
    return AlphaBound(graph_id, AlphaKind.LOWER, len(witness), Provenance.COMPUTED_GREEDY, witness=tuple(witness))


# ------------------------------------------------------------------------------------ #
#                                    frankl-wilson                                     #
# ------------------------------------------------------------------------------------ #


def is_prime_power(q: int) -> bool:
    if isinstance(q, bool) or int(q) != q or q < 2:
        return False
    q = int(q)
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
        p += 1
    return True


def frankl_wilson(n: int, q: int) -> int:
    """C(n, q-1), an upper bound for alpha(J(n, 2q-1, q-1)) when q is a prime power."""
    if not is_prime_power(q):
        raise InvalidUsage(f"{q} is not a prime power")
    if n < 2 * q - 1:
        raise InvalidUsage(f"J({n},{2 * q - 1},{q - 1}) needs n >= 2q-1")
    return comb(n, q - 1)


def frankl_wilson_bound(spec: GraphSpec) -> AlphaBound | None:
    """The Frankl-Wilson bound for `spec` if it is a J(n, 2q-1, q-1) with q a prime power."""
    if not isinstance(spec, Johnson):
        return None
    q = spec.i + 1
    if spec.w != 2 * q - 1 or not is_prime_power(q):
        return None
    return AlphaBound(str(spec), AlphaKind.UPPER, frankl_wilson(spec.n, q), Provenance.FRANKL_WILSON)


# ------------------------------------------------------------------------------------ #
#                                       registry                                       #
# ------------------------------------------------------------------------------------ #


class Registry:
    """
    External alpha bounds, one per line:

        # spec            kind   value   citation
        johnson:13,6,2    upper  148     schrijver-sdp
    """

    def __init__(self, entries: dict[str, list[AlphaBound]] | None = None, path: Path | None = None):
        self.entries = entries or {}
        self.path = path

    @classmethod
    def load(cls, path) -> Registry:
        path = Path(path)
        entries: dict[str, list[AlphaBound]] = {}
        try:
            text = path.read_text()
        except OSError as e:
            raise InvalidUsage(f"cannot read bounds registry {path}: {e}") from e
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 4:
                raise InvalidUsage(f"{path}:{lineno}: expected `spec kind value citation`")
            spec_text, kind, value, citation = parts[0], parts[1], parts[2], " ".join(parts[3:])
            try:
                spec = str(GraphSpec.parse(spec_text))
                kind = AlphaKind(kind)
                value = int(value)
            except ValueError as e:
                raise InvalidUsage(f"{path}:{lineno}: {e}") from e
            if kind is not AlphaKind.UPPER:
                raise InvalidUsage(f"{path}:{lineno}: the registry holds upper bounds only")
            entries.setdefault(spec, []).append(
                AlphaBound(spec, kind, value, Provenance.EXTERNAL, citation=citation)
            )
        log.debug(f"loaded {sum(map(len, entries.values()))} registry entries from {path}")
        return cls(entries, path)

    def lookup(self, spec: GraphSpec | str) -> AlphaBound | None:
        """The smallest registered upper bound for `spec`, or None."""
        if isinstance(spec, str):
            spec = GraphSpec.parse(spec)
        found = self.entries.get(str(spec))
        if not found:
            return None
        return min(found, key=lambda b: b.value)

    def __len__(self):
        return sum(map(len, self.entries.values()))


_registry_lock = threading.Lock()


@cached(LRUCache(maxsize=8), lock=_registry_lock)
def load_registry(path: Path | None = None) -> Registry:
    if path is None:
        from .config import registry_path

        path = registry_path()
    return Registry.load(path)


def registry_lookup(spec: GraphSpec | str, registry: Registry | None = None) -> AlphaBound | None:
    return (registry or load_registry()).lookup(spec)
