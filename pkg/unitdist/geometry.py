"""
Vertex configurations and their unit distance graphs.

Coordinates of the 600-cell live in Q(sqrt5), everything else is rational, so
all point sets are stored over `QuadExt` and edge decisions are exact. Johnson
and orthogonality graphs are combinatorial (vertices are bitmasks) and only
get a coordinate embedding on request.

Graphs are named by a spec string, see `GraphSpec.parse`:

    johnson:13,6,2   600cell:dsq=(5+sqrt5)/2   e8:dsq=6   e8kissing
    orth:24          simplex:4                 circulant:13:1,5
    file:/path/to/graph.txt
"""

from __future__ import annotations

import itertools
import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np
from cachetools import LRUCache, cached
from humanize import intcomma

from .errors import InvalidUsage
from .logger import log

MAX_JOHNSON_VERTICES = 10**7
MAX_ORTHOGONALITY_DIMENSION = 16
# materialising more edges than this is not useful in pure python
MAX_EDGES = 5_000_000
MAX_DIMENSION = 64

SQRT5 = math.sqrt(5.0)


# ------------------------------------------------------------------------------------ #
#                                     exact numbers                                    #
# ------------------------------------------------------------------------------------ #


class QuadExt:
    """
    a + b sqrt5 with rational a, b.
    Supports + - * / with other QuadExt, ints and Fractions, exact comparison
    and sign.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def coerce(cls, x) -> QuadExt:
        if isinstance(x, QuadExt):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_quadext(x)
        raise TypeError(f"cannot use {type(x).__name__} as an element of Q(sqrt5)")

    # arithmetic

    def __add__(self, other):
        o = QuadExt.coerce(other)
        return QuadExt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-QuadExt.coerce(other))

    def __rsub__(self, other):
        return QuadExt.coerce(other) - self

    def __mul__(self, other):
        o = QuadExt.coerce(other)
        return QuadExt(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> QuadExt:
        return QuadExt(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 - 5 b^2, zero only for zero."""
        return self.a * self.a - 5 * self.b * self.b

    def __truediv__(self, other):
        o = QuadExt.coerce(other)
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt5)")
        num = self * o.conjugate()
        return QuadExt(num.a / nrm, num.b / nrm)

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) / self

    # comparison

    def sign(self) -> int:
        """Exact sign, from comparing a^2 with 5 b^2."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if self.a * self.a > 5 * self.b * self.b else sb

    def __eq__(self, other):
        try:
            o = QuadExt.coerce(other)
        except (TypeError, InvalidUsage):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT5

    def __repr__(self):
        return f"QuadExt({self})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        den = math.lcm(self.a.denominator, self.b.denominator)
        A = int(self.a * den)
        B = int(self.b * den)
        root = "sqrt5" if abs(B) == 1 else f"{abs(B)}sqrt5"
        if A == 0:
            inner = ("-" if B < 0 else "") + root
        else:
            inner = f"{A}{'-' if B < 0 else '+'}{root}"
        if den == 1:
            return inner
        return f"({inner})/{den}"


_TOKEN = re.compile(r"\s*(sqrt\(?5\)?|√5|\d+|[()+\-*/])")


def parse_quadext(text: str) -> QuadExt:
    """
    Parse an arithmetic expression over Q(sqrt5), e.g. `3`, `1/2`,
    `(5+sqrt5)/2`, `(3-√5)/2`, `2sqrt5`.
    """
    src = str(text)
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m:
            raise InvalidUsage(f"cannot parse {src!r} as an element of Q(sqrt5)")
        tok = m.group(1)
        tokens.append("sqrt5" if tok.startswith(("sqrt", "√")) else tok)
        pos = m.end()
    if not tokens:
        raise InvalidUsage("empty expression")

    def peek():
        return tokens[0] if tokens else None

    def take(expected=None):
        if not tokens:
            raise InvalidUsage(f"unexpected end of {src!r}")
        tok = tokens.pop(0)
        if expected is not None and tok != expected:
            raise InvalidUsage(f"expected {expected!r} in {src!r}, got {tok!r}")
        return tok

    def expr():
        value = term()
        while peek() in ("+", "-"):
            if take() == "+":
                value = value + term()
            else:
                value = value - term()
        return value

    def term():
        value = factor()
        while peek() in ("*", "/", "sqrt5", "("):
            op = peek()
            if op in ("*", "/"):
                take()
                rhs = factor()
                value = value * rhs if op == "*" else value / rhs
            else:
                # implicit product, as in 2sqrt5
                value = value * factor()
        return value

    def factor():
        tok = take()
        if tok == "-":
            return -factor()
        if tok == "+":
            return factor()
        if tok == "(":
            value = expr()
            take(")")
            return value
        if tok == "sqrt5":
            return QuadExt(0, 1)
        if tok.isdigit():
            return QuadExt(int(tok))
        raise InvalidUsage(f"unexpected {tok!r} in {src!r}")

    try:
        value = expr()
    except ZeroDivisionError as e:
        raise InvalidUsage(f"{src!r}: {e}") from e
    if tokens:
        raise InvalidUsage(f"trailing input {' '.join(tokens)!r} in {src!r}")
    return value


# ------------------------------------------------------------------------------------ #
#                                      point sets                                      #
# ------------------------------------------------------------------------------------ #


@dataclass(frozen=True)
class PointSet:
    dim: int
    points: tuple[tuple[QuadExt, ...], ...]
    label: str = ""

    def __post_init__(self):
        pts = tuple(tuple(QuadExt.coerce(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if len(p) != self.dim:
                raise InvalidUsage(
                    f"{self.label or 'point set'}: point of dimension {len(p)}, expected {self.dim}"
                )
        if len(set(pts)) != len(pts):
            raise InvalidUsage(f"{self.label or 'point set'}: duplicate points")

    def __len__(self):
        return len(self.points)

    @cached_property
    def _integer_form(self) -> tuple[int, np.ndarray, np.ndarray]:
        """
        (D, A, B) with coordinate = (A + B sqrt5) / D, A and B integer arrays.
        Pairwise squared distances then reduce to integer arithmetic.
        """
        den = 1
        for p in self.points:
            for c in p:
                den = math.lcm(den, c.a.denominator, c.b.denominator)
        A = np.array([[int(c.a * den) for c in p] for p in self.points], dtype=np.int64)
        B = np.array([[int(c.b * den) for c in p] for p in self.points], dtype=np.int64)
        if A.size and max(np.abs(A).max(), np.abs(B).max()) > 2**20:
            raise InvalidUsage(f"{self.label}: coordinates too large for the exact distance table")
        return den, A.reshape(len(self), self.dim), B.reshape(len(self), self.dim)

    @cached_property
    def _distance_table(self) -> tuple[int, np.ndarray, np.ndarray]:
        """(D^2, S0, S1): squared distance of (u, v) = (S0 + S1 sqrt5) / D^2."""
        den, A, B = self._integer_form
        dA = A[:, None, :] - A[None, :, :]
        dB = B[:, None, :] - B[None, :, :]
        S0 = np.sum(dA * dA + 5 * dB * dB, axis=2)
        S1 = np.sum(2 * dA * dB, axis=2)
        return den * den, S0, S1

    def squared_norms(self) -> list[QuadExt]:
        den, A, B = self._integer_form
        s0 = np.sum(A * A + 5 * B * B, axis=1)
        s1 = np.sum(2 * A * B, axis=1)
        return [QuadExt(Fraction(int(x), den * den), Fraction(int(y), den * den)) for x, y in zip(s0, s1)]

    def squared_distance(self, u: int, v: int) -> QuadExt:
        dd, S0, S1 = self._distance_table
        return QuadExt(Fraction(int(S0[u, v]), dd), Fraction(int(S1[u, v]), dd))

    def squared_distances(self) -> list[QuadExt]:
        """Distinct squared distances between distinct points, ascending."""
        dd, S0, S1 = self._distance_table
        iu = np.triu_indices(len(self), k=1)
        pairs = set(zip(S0[iu].tolist(), S1[iu].tolist()))
        return sorted(QuadExt(Fraction(x, dd), Fraction(y, dd)) for x, y in pairs)

    def as_float(self) -> np.ndarray:
        den, A, B = self._integer_form
        return (A + B * SQRT5) / den

    def translated(self, shift, label=None) -> PointSet:
        shift = [QuadExt.coerce(s) for s in shift]
        return PointSet(
            self.dim,
            tuple(tuple(c - s for c, s in zip(p, shift)) for p in self.points),
            label or self.label,
        )


def _even_permutations(n: int):
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        if inversions % 2 == 0:
            yield perm


def build_600cell() -> PointSet:
    """The 120 vertices of the 600-cell on the unit sphere of R^4."""
    half = Fraction(1, 2)
    pts = set()
    for signs in itertools.product((-half, half), repeat=4):
        pts.add(tuple(QuadExt(s) for s in signs))
    for k in range(4):
        for s in (-1, 1):
            pts.add(tuple(QuadExt(s if j == k else 0) for j in range(4)))

    inv_two_phi = QuadExt(Fraction(-1, 4), Fraction(1, 4))  # 1/(2 phi) = (sqrt5 - 1)/4
    half_phi = QuadExt(Fraction(1, 4), Fraction(1, 4))  # phi/2 = (1 + sqrt5)/4
    base = (QuadExt(0), inv_two_phi, QuadExt(half), half_phi)
    for s1, s2, s3 in itertools.product((-1, 1), repeat=3):
        signed = (base[0], base[1] * s1, base[2] * s2, base[3] * s3)
        for perm in _even_permutations(4):
            pts.add(tuple(signed[perm[j]] for j in range(4)))

    ps = PointSet(4, tuple(sorted(pts, key=lambda p: [(float(c), c.a) for c in p])), "600-cell")
    assert len(ps) == 120, len(ps)
    return ps


def build_e8_roots() -> PointSet:
    """The 240 roots of E8, all of squared norm 2."""
    pts = []
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((-1, 1), repeat=2):
            v = [0] * 8
            v[i], v[j] = si, sj
            pts.append(tuple(QuadExt(x) for x in v))
    half = Fraction(1, 2)
    for signs in itertools.product((-half, half), repeat=8):
        if sum(1 for s in signs if s < 0) % 2 == 0:
            pts.append(tuple(QuadExt(s) for s in signs))
    return PointSet(8, tuple(sorted(pts, key=lambda p: [c.a for c in p])), "E8")


def build_e8_kissing() -> PointSet:
    """
    The 56 roots x of E8 with |x - p|^2 = 2 for p = (1,1,0,...,0), shifted so
    their centroid (= p/2) is the origin. They span a 7-dimensional hyperplane
    and all have squared norm 3/2.
    """
    roots = build_e8_roots()
    p = (QuadExt(1), QuadExt(1)) + (QuadExt(0),) * 6
    near = [x for x in roots.points if sum((a - b) * (a - b) for a, b in zip(x, p)) == 2]
    centroid = [sum((x[k] for x in near), QuadExt(0)) / len(near) for k in range(8)]
    return PointSet(8, tuple(near), "E8 kissing").translated(centroid)


# ------------------------------------------------------------------------------------ #
#                                        graphs                                        #
# ------------------------------------------------------------------------------------ #


@dataclass(frozen=True, eq=False)
class FiniteGraph:
    """
    An undirected simple graph on vertices 0..M-1 with bitset adjacency.

    # Args
    num_vertices: M
    edges: pairs (u, v), u < v
    label: human readable name
    vertex_transitive: True when the automorphism group acts transitively
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    label: str = ""
    vertex_transitive: bool = False

    def __post_init__(self):
        M = self.num_vertices
        clean = set()
        for u, v in self.edges:
            if not (0 <= u < M and 0 <= v < M):
                raise InvalidUsage(f"{self.label}: edge ({u}, {v}) out of range for {M} vertices")
            if u == v:
                raise InvalidUsage(f"{self.label}: loop at vertex {u}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbourhood bitsets, bit v of adjacency[u] set iff uv is an edge."""
        adj = [0] * self.num_vertices
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adjacency]

    def is_independent(self, vertices) -> bool:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        return all(not (self.adjacency[v] & mask) for v in vertices)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.num_vertices, self.num_vertices))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A

    def induced(self, vertices) -> FiniteGraph:
        """Induced subgraph, vertices renumbered in the given order."""
        vertices = list(vertices)
        index = {v: k for k, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return FiniteGraph(len(vertices), tuple(edges), f"{self.label}[{len(vertices)}]")


@dataclass(frozen=True, eq=False)
class UnitDistanceGraph(FiniteGraph):
    """
    A finite graph realised in R^dim with every edge of length 1.

    # Args
    dim: dimension of the euclidean embedding
    radii: per-vertex distance to the origin after rescaling
    weights: per-vertex positive measure, default 1
    coords: rescaled float coordinates (may live in a larger ambient space), optional
    points: exact coordinates before rescaling, optional
    d_squared: the squared edge length of `points`
    source: the GraphSpec the graph was built from
    """

    dim: int = 0
    radii: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    coords: np.ndarray | None = field(default=None, repr=False)
    points: PointSet | None = field(default=None, repr=False)
    d_squared: QuadExt | None = None
    source: GraphSpec | None = None

    def __post_init__(self):
        super().__post_init__()
        M = self.num_vertices
        if M == 0:
            raise InvalidUsage("a graph needs at least one vertex")
        if not 1 <= self.dim <= MAX_DIMENSION:
            raise InvalidUsage(f"embedding dimension {self.dim} outside 1..{MAX_DIMENSION}")
        if len(self.radii) != M:
            raise InvalidUsage(f"{len(self.radii)} radii for {M} vertices")
        if not self.weights:
            object.__setattr__(self, "weights", (1.0,) * M)
        if len(self.weights) != M:
            raise InvalidUsage(f"{len(self.weights)} weights for {M} vertices")
        if any(not (w > 0 and math.isfinite(w)) for w in self.weights):
            raise InvalidUsage("vertex weights must be positive and finite")
        if any(not r > 0 for r in self.radii):
            raise InvalidUsage("every vertex must lie off the origin")

    def radius_profile(self) -> list[tuple[float, float]]:
        """(radius, total weight) per distinct radius, radii ascending."""
        acc: dict[float, float] = {}
        for r, w in zip(self.radii, self.weights):
            key = round(r, 12)
            acc[key] = acc.get(key, 0.0) + w
        return sorted(acc.items())

    def max_edge_error(self) -> float:
        """Largest deviation of an edge length from 1 in the float coordinates."""
        if self.coords is None or not self.edges:
            return 0.0
        e = np.array(self.edges)
        lengths = np.linalg.norm(self.coords[e[:, 0]] - self.coords[e[:, 1]], axis=1)
        return float(np.max(np.abs(lengths - 1.0)))


@dataclass(frozen=True)
class GraphProfile:
    """What the euclidean bound needs from a graph, without its edges."""

    dim: int
    num_vertices: int
    # (radius, weight) pairs
    profile: tuple[tuple[float, float], ...]
    # exact radius for display, e.g. sqrt(21/52)
    radius_label: str = ""


def distance_graph(ps: PointSet, d_squared, source: GraphSpec | None = None, dim: int | None = None) -> UnitDistanceGraph:
    """
    Join the points of `ps` at squared distance exactly `d_squared`, rescaled
    by 1/sqrt(d_squared) so edges have unit length.
    """
    d_squared = QuadExt.coerce(d_squared)
    if d_squared.sign() <= 0:
        raise InvalidUsage(f"d^2 must be positive, got {d_squared}")

    dd, S0, S1 = ps._distance_table
    t0 = d_squared.a * dd
    t1 = d_squared.b * dd
    if t0.denominator != 1 or t1.denominator != 1:
        hits = np.zeros_like(S0, dtype=bool)
    else:
        hits = (S0 == int(t0)) & (S1 == int(t1))
    us, vs = np.nonzero(np.triu(hits, k=1))
    edges = tuple(zip(us.tolist(), vs.tolist()))
    if not edges:
        log.warning(f"{ps.label}: no pair at squared distance {d_squared}")

    scale = math.sqrt(float(d_squared))
    radii = tuple(math.sqrt(float(q)) / scale for q in ps.squared_norms())
    label = f"{ps.label} d^2={d_squared}"
    log.debug(f"{label}: {len(ps)} vertices, {intcomma(len(edges))} edges")
    return UnitDistanceGraph(
        num_vertices=len(ps),
        edges=edges,
        label=label,
        vertex_transitive=source is not None and source.vertex_transitive,
        dim=dim or ps.dim,
        radii=radii,
        coords=ps.as_float() / scale,
        points=ps,
        d_squared=d_squared,
        source=source,
    )


# ----------------------------------- johnson ---------------------------------------- #


def _check_johnson(n, w, i):
    if not (isinstance(n, int) and isinstance(w, int) and isinstance(i, int)):
        raise InvalidUsage("johnson parameters must be integers")
    if not (0 < w <= n and 0 <= i < w):
        raise InvalidUsage(f"J({n},{w},{i}) needs 0 < w <= n and 0 <= i < w")
    if w - i > n - w:
        raise InvalidUsage(f"J({n},{w},{i}) has no edges: intersection {i} impossible")


def johnson_radius_squared(n: int, w: int, i: int) -> Fraction:
    """w (1 - w/n) / (2 (w - i)): squared radius of the unit-edge embedding."""
    return Fraction(w * (n - w), 2 * n * (w - i))


def johnson_vertices(n: int, w: int) -> list[int]:
    """Weight-w subsets of range(n) as bitmasks, in lexicographic order."""
    return [sum(1 << k for k in c) for c in itertools.combinations(range(n), w)]


def johnson_embedding(n: int, w: int, i: int, vertices) -> np.ndarray:
    """
    Unit-edge coordinates: coordinate k is t0 when k is in the subset and t1
    otherwise, with t0 = t1 + 1/sqrt(2(w-i)) and the coordinates summing to 0.
    """
    step = 1.0 / math.sqrt(2 * (w - i))
    t1 = -step * w / n
    t0 = t1 + step
    bits = np.array([[(mask >> k) & 1 for k in range(n)] for mask in vertices], dtype=float)
    return np.where(bits > 0, t0, t1)


def build_johnson(n: int, w: int, i: int) -> UnitDistanceGraph:
    """J(n, w, i): weight-w subsets of an n-set, adjacent when they meet in i elements."""
    _check_johnson(n, w, i)
    M = comb(n, w)
    if M > MAX_JOHNSON_VERTICES:
        raise InvalidUsage(f"J({n},{w},{i}) has {intcomma(M)} vertices, refusing to build it")
    degree = comb(w, i) * comb(n - w, w - i)
    if M * degree // 2 > MAX_EDGES:
        raise InvalidUsage(
            f"J({n},{w},{i}) has {intcomma(M * degree // 2)} edges, refusing to build it",
        )

    vertices = johnson_vertices(n, w)
    index = {mask: k for k, mask in enumerate(vertices)}
    edges = []
    for u, mask in enumerate(vertices):
        inside = [k for k in range(n) if mask >> k & 1]
        outside = [k for k in range(n) if not mask >> k & 1]
        for keep in itertools.combinations(inside, i):
            kept = sum(1 << k for k in keep)
            for add in itertools.combinations(outside, w - i):
                v = index[kept | sum(1 << k for k in add)]
                if u < v:
                    edges.append((u, v))

    r = math.sqrt(johnson_radius_squared(n, w, i))
    spec = Johnson(n, w, i)
    return UnitDistanceGraph(
        num_vertices=M,
        edges=tuple(edges),
        label=str(spec),
        vertex_transitive=True,
        dim=n - 1,
        radii=(r,) * M,
        coords=johnson_embedding(n, w, i, vertices),
        source=spec,
    )


# -------------------------------- orthogonality ------------------------------------- #


def build_orthogonality(n: int) -> UnitDistanceGraph:
    """
    Omega(n): {0,1}^n, adjacent at Hamming distance n/2. The cube is centered and
    rescaled by 1/sqrt(n/2), so every vertex lies at radius sqrt(1/2).
    """
    if n <= 0 or n % 4:
        raise InvalidUsage(f"the orthogonality graph needs n divisible by 4, got {n}")
    if n > MAX_ORTHOGONALITY_DIMENSION:
        raise InvalidUsage(
            f"Omega({n}) has {intcomma(2**n)} vertices; only n <= {MAX_ORTHOGONALITY_DIMENSION} "
            "is materialised, use graph_profile for larger n"
        )
    M = 2**n
    if M * comb(n, n // 2) // 2 > MAX_EDGES:
        raise InvalidUsage(f"Omega({n}) has too many edges to materialise")
    flips = [sum(1 << k for k in c) for c in itertools.combinations(range(n), n // 2)]
    edges = tuple((u, u ^ f) for u in range(M) for f in flips if u < u ^ f)

    scale = math.sqrt(n / 2)
    bits = np.array([[(u >> k) & 1 for k in range(n)] for u in range(M)], dtype=float)
    return UnitDistanceGraph(
        num_vertices=M,
        edges=edges,
        label=f"orth:{n}",
        vertex_transitive=True,
        dim=n,
        radii=(math.sqrt(0.5),) * M,
        coords=(bits - 0.5) / scale,
        source=Orthogonality(n),
    )


# ---------------------------------- simplex ----------------------------------------- #


def build_simplex(n: int) -> UnitDistanceGraph:
    """The regular simplex in R^n with unit edges: K_{n+1} at radius sqrt(n / (2(n+1)))."""
    if not 1 <= n <= MAX_DIMENSION:
        raise InvalidUsage(f"simplex dimension must be in 1..{MAX_DIMENSION}, got {n}")
    M = n + 1
    coords = (np.eye(M) - 1.0 / M) / math.sqrt(2.0)
    r = math.sqrt(n / (2.0 * (n + 1)))
    return UnitDistanceGraph(
        num_vertices=M,
        edges=tuple(itertools.combinations(range(M), 2)),
        label=f"simplex:{n}",
        vertex_transitive=True,
        dim=n,
        radii=(r,) * M,
        coords=coords,
        source=Simplex(n),
    )


# --------------------------------- circulant ---------------------------------------- #


def _symmetric_connection(order: int, connection) -> tuple[int, ...]:
    if order < 1:
        raise InvalidUsage(f"group order must be positive, got {order}")
    S = {int(s) % order for s in connection}
    S |= {(-s) % order for s in S}
    if 0 in S:
        raise InvalidUsage("the connection set must not contain 0")
    return tuple(sorted(S))


def build_circulant(order: int, connection) -> FiniteGraph:
    """Cayley graph of Z_order with connection set S closed under negation."""
    S = _symmetric_connection(order, connection)
    edges = tuple((x, (x + s) % order) for x in range(order) for s in S if x < (x + s) % order)
    return FiniteGraph(order, edges, f"circulant:{order}:{','.join(map(str, S))}", vertex_transitive=True)


# ------------------------------------------------------------------------------------ #
#                                    graph files                                       #
# ------------------------------------------------------------------------------------ #


def read_graph_file(path, source: GraphSpec | None = None) -> UnitDistanceGraph:
    """
    Read the interchange format: a header `dim M`, M lines of rational
    coordinates (`p/q`), then edge lines `u v` (0-based). All edges must have
    the same length; the graph is rescaled to make it 1.
    Blank lines and `#` comments are ignored.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise InvalidUsage(f"cannot read graph file {path}: {e}") from e
    lines = [ln.split("#", 1)[0].strip() for ln in lines]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidUsage(f"{path}: empty graph file")

    try:
        dim, M = (int(x) for x in lines[0].split())
        coords = [tuple(Fraction(x) for x in ln.split()) for ln in lines[1 : 1 + M]]
        edges = [tuple(int(x) for x in ln.split()) for ln in lines[1 + M :]]
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidUsage(f"{path}: malformed graph file ({e})") from e
    if len(coords) != M:
        raise InvalidUsage(f"{path}: header announces {M} vertices, found {len(coords)}")
    if any(len(e) != 2 for e in edges):
        raise InvalidUsage(f"{path}: edge lines need exactly two vertices")

    ps = PointSet(dim, tuple(coords), path.name)
    lengths = {ps.squared_distance(u, v) for u, v in edges if 0 <= u < M and 0 <= v < M}
    if len(lengths) > 1:
        raise InvalidUsage(f"{path}: edges of different lengths {sorted(map(str, lengths))}")
    d_squared = lengths.pop() if lengths else QuadExt(1)
    scale = math.sqrt(float(d_squared))
    radii = tuple(math.sqrt(float(q)) / scale for q in ps.squared_norms())
    return UnitDistanceGraph(
        num_vertices=M,
        edges=tuple(edges),
        label=path.name,
        dim=dim,
        radii=radii,
        coords=ps.as_float() / scale,
        points=ps,
        d_squared=d_squared,
        source=source,
    )


def write_graph_file(g: UnitDistanceGraph, path) -> Path:
    """Write `g` in the interchange format; needs exact rational coordinates."""
    if g.points is None or any(not c.is_rational for p in g.points.points for c in p):
        raise InvalidUsage(f"{g.label}: only graphs with exact rational coordinates can be written")
    path = Path(path)
    out = [f"{g.points.dim} {g.num_vertices}"]
    out += [" ".join(str(c.a) for c in p) for p in g.points.points]
    out += [f"{u} {v}" for u, v in g.edges]
    path.write_text("\n".join(out) + "\n")
    log.info(f"wrote {g.label} to {path}")
    return path


# ------------------------------------------------------------------------------------ #
#                                     graph specs                                      #
# ------------------------------------------------------------------------------------ #


class GraphSpec:
    """
    Base of the graph families. Each variant is a frozen dataclass that
    prints as its spec string and knows how to build and profile itself.
    """

    vertex_transitive = True

    @staticmethod
    def parse(text: str) -> GraphSpec:
        text = text.strip()
        kind, _, rest = text.partition(":")
        kind = kind.lower()
        try:
            if kind == "johnson":
                n, w, i = (int(x) for x in rest.split(","))
                return Johnson(n, w, i)
            if kind == "600cell":
                return Cell600(parse_quadext(_dsq_argument(rest, text)))
            if kind == "e8":
                return E8Roots(int(_dsq_argument(rest, text)))
            if kind == "e8kissing":
                return E8Kissing(int(_dsq_argument(rest, text)) if rest else 4)
            if kind == "orth":
                return Orthogonality(int(rest))
            if kind == "simplex":
                return Simplex(int(rest))
            if kind == "circulant":
                order, _, conn = rest.partition(":")
                return Circulant(int(order), tuple(int(s) for s in conn.split(",") if s.strip()))
            if kind == "file":
                if not rest:
                    raise InvalidUsage("file: needs a path")
                return GraphFile(rest)
        except ValueError as e:
            if isinstance(e, InvalidUsage):
                raise
            raise InvalidUsage(f"malformed graph spec {text!r}: {e}") from e
        raise InvalidUsage(
            f"unknown graph spec {text!r}; expected johnson:, 600cell:, e8:, e8kissing, "
            "orth:, simplex:, circulant: or file:"
        )

    def build(self) -> UnitDistanceGraph:
        raise NotImplementedError

    def profile(self) -> GraphProfile:
        g = self.build()
        if len({round(r, 12) for r in g.radii}) == 1:
            label = f"sqrt({_rational_guess(g.radii[0] ** 2)})"
        else:
            label = "mixed"
        return GraphProfile(g.dim, g.num_vertices, tuple(g.radius_profile()), label)


def _dsq_argument(rest: str, text: str) -> str:
    key, _, value = rest.partition("=")
    if key.strip().lower() != "dsq" or not value.strip():
        raise InvalidUsage(f"{text!r}: expected dsq=<value>")
    return value


def _rational_guess(x: float) -> str:
    frac = Fraction(x).limit_denominator(10**6)
    return str(frac) if abs(float(frac) - x) < 1e-12 else f"{x:.12g}"


@dataclass(frozen=True)
class Johnson(GraphSpec):
    n: int
    w: int
    i: int

    def __post_init__(self):
        _check_johnson(self.n, self.w, self.i)

    def __str__(self):
        return f"johnson:{self.n},{self.w},{self.i}"

    def build(self):
        return build_johnson(self.n, self.w, self.i)

    def profile(self):
        r2 = johnson_radius_squared(self.n, self.w, self.i)
        return GraphProfile(self.n - 1, comb(self.n, self.w), ((math.sqrt(r2), 1.0),), f"sqrt({r2})")


@dataclass(frozen=True)
class Cell600(GraphSpec):
    d_squared: QuadExt

    def __str__(self):
        return f"600cell:dsq={self.d_squared}"

    def build(self):
        return distance_graph(build_600cell(), self.d_squared, source=self)

    def profile(self):
        r2 = 1 / QuadExt.coerce(self.d_squared)
        return GraphProfile(4, 120, ((math.sqrt(float(r2)), 1.0),), f"sqrt({r2})")


@dataclass(frozen=True)
class E8Roots(GraphSpec):
    d_squared: int

    def __str__(self):
        return f"e8:dsq={self.d_squared}"

    def build(self):
        return distance_graph(build_e8_roots(), self.d_squared, source=self)

    def profile(self):
        r2 = Fraction(2, self.d_squared)
        return GraphProfile(8, 240, ((math.sqrt(r2), 1.0),), f"sqrt({r2})")


@dataclass(frozen=True)
class E8Kissing(GraphSpec):
    d_squared: int = 4

    def __str__(self):
        return "e8kissing" if self.d_squared == 4 else f"e8kissing:dsq={self.d_squared}"

    def build(self):
        return distance_graph(build_e8_kissing(), self.d_squared, source=self, dim=7)

    def profile(self):
        r2 = Fraction(3, 2 * self.d_squared)
        return GraphProfile(7, 56, ((math.sqrt(r2), 1.0),), f"sqrt({r2})")


@dataclass(frozen=True)
class Orthogonality(GraphSpec):
    n: int

    def __post_init__(self):
        if self.n <= 0 or self.n % 4:
            raise InvalidUsage(f"the orthogonality graph needs n divisible by 4, got {self.n}")

    def __str__(self):
        return f"orth:{self.n}"

    def build(self):
        return build_orthogonality(self.n)

    def profile(self):
        return GraphProfile(self.n, 2**self.n, ((math.sqrt(0.5), 1.0),), "sqrt(1/2)")


@dataclass(frozen=True)
class Simplex(GraphSpec):
    n: int

    def __str__(self):
        return f"simplex:{self.n}"

    def build(self):
        return build_simplex(self.n)

    def profile(self):
        r2 = Fraction(self.n, 2 * (self.n + 1))
        return GraphProfile(self.n, self.n + 1, ((math.sqrt(r2), 1.0),), f"sqrt({r2})")


@dataclass(frozen=True)
class Circulant(GraphSpec):
    order: int
    connection: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "connection", _symmetric_connection(self.order, self.connection))

    def __str__(self):
        return f"circulant:{self.order}:{','.join(map(str, self.connection))}"

    def build(self):
        return build_circulant(self.order, self.connection)

    def profile(self):
        raise InvalidUsage(f"{self} has no euclidean embedding")


@dataclass(frozen=True)
class GraphFile(GraphSpec):
    path: str

    vertex_transitive = False

    def __str__(self):
        return f"file:{self.path}"

    def build(self):
        return read_graph_file(self.path, source=self)


_graph_lock = threading.Lock()


@cached(LRUCache(maxsize=32), lock=_graph_lock)
def build_graph(spec: GraphSpec) -> FiniteGraph:
    """Build (and memoise) the graph named by `spec`."""
    log.debug(f"building {spec}")
    return spec.build()


def graph_profile(spec: GraphSpec) -> GraphProfile:
    """Dimension, vertex count and radius profile, without building edges where possible."""
    return spec.profile()
