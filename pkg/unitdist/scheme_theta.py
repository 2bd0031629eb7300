"""
Theta bounds for generalized Johnson graphs from the Johnson scheme.

Relations of the scheme J(n, w) are indexed by the distance d = w - |A & B|,
eigenspaces by j = 0..w. With w <= n - w (complements give the same scheme):

    P_d(j) = sum_h (-1)^h C(j, h) C(w - j, d - h) C(n - w - j, d - h)   (Eberlein)
    v_d    = C(w, d) C(n - w, d)
    m_j    = C(n, j) - C(n, j - 1)
    Q_j(d) = m_j P_d(j) / v_d

J(n, w, i) is the relation d = w - i. Its normalized eigenvalues are
Z_k(i) = Q_k(w - i) / Q_k(0) = P_{w-i}(k) / v_{w-i}.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from cachetools import LRUCache, cached
from scipy import linalg

from . import lp_core
from .errors import InvalidUsage, SolverError
from .logger import log


def _canonical(n: int, w: int) -> int:
    if not (isinstance(n, int) and isinstance(w, int)) or not 0 < w < n:
        raise InvalidUsage(f"the Johnson scheme J({n},{w}) needs 0 < w < n")
    return min(w, n - w)


def eberlein(n: int, w: int, k: int, j: int) -> int:
    """P_k(j): eigenvalue of the distance-k relation on eigenspace j."""
    w = _canonical(n, w)
    if not (0 <= k <= w and 0 <= j <= w):
        raise InvalidUsage(f"eberlein({n},{w},{k},{j}): k and j must lie in 0..{w}")
    return sum(
        (-1) ** h * comb(j, h) * comb(w - j, k - h) * comb(n - w - j, k - h)
        for h in range(k + 1)
    )


@dataclass(frozen=True)
class JohnsonSpectrum:
    n: int
    # canonical, w <= n - w
    w: int
    # P[d][j]
    P: tuple[tuple[int, ...], ...]
    valencies: tuple[int, ...]
    multiplicities: tuple[int, ...]
    # Q[j][d]
    Q: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        W = self.w
        X = self.num_vertices
        if any(self.P[d][0] != self.valencies[d] for d in range(W + 1)):
            raise SolverError(f"J({self.n},{W}): P_d(0) differs from the valencies")
        if any(self.Q[j][0] != self.multiplicities[j] for j in range(W + 1)):
            raise SolverError(f"J({self.n},{W}): Q_j(0) differs from the multiplicities")
        for a in range(W + 1):
            for b in range(a, W + 1):
                inner = sum(Fraction(self.P[d][a] * self.P[d][b], self.valencies[d]) for d in range(W + 1))
                if inner != (Fraction(X, self.multiplicities[a]) if a == b else 0):
                    raise SolverError(f"J({self.n},{W}): eigenspaces {a} and {b} are not orthogonal")

    @property
    def num_vertices(self) -> int:
        return comb(self.n, self.w)

    def normalized(self, d: int) -> list[Fraction]:
        """Z_k for the distance-d relation, k = 0..w (Z_0 = 1)."""
        return [Fraction(self.P[d][k], self.valencies[d]) for k in range(self.w + 1)]


_spectrum_lock = threading.Lock()


@cached(LRUCache(maxsize=256), lock=_spectrum_lock)
def johnson_spectrum(n: int, w: int) -> JohnsonSpectrum:
    w = _canonical(n, w)
    P = tuple(tuple(eberlein(n, w, d, j) for j in range(w + 1)) for d in range(w + 1))
    v = tuple(comb(w, d) * comb(n - w, d) for d in range(w + 1))
    m = tuple(comb(n, j) - (comb(n, j - 1) if j else 0) for j in range(w + 1))
    Q = tuple(tuple(Fraction(m[j] * P[d][j], v[d]) for d in range(w + 1)) for j in range(w + 1))
    return JohnsonSpectrum(n, w, P, v, m, Q)


def _distance(n: int, w: int, i: int) -> tuple[JohnsonSpectrum, int]:
    if not (isinstance(i, int) and 0 <= i < w <= n):
        raise InvalidUsage(f"J({n},{w},{i}) needs 0 <= i < w <= n")
    spec = johnson_spectrum(n, w)
    d = w - i
    if d > spec.w:
        raise InvalidUsage(f"J({n},{w},{i}) has no edges")
    return spec, d


def normalized_eigenvalues(n: int, w: int, i: int) -> list[Fraction]:
    """Z_k(i) for k = 0..w (canonical w)."""
    spec, d = _distance(n, w, i)
    return spec.normalized(d)


def _theta_fraction(n: int, w: int, i: int) -> Fraction:
    spec, d = _distance(n, w, i)
    Z = spec.normalized(d)
    m = min(Z[1:])
    if m >= 0:
        raise InvalidUsage(f"J({n},{w},{i}) has no negative eigenvalue")
    return spec.num_vertices * (-m) / (1 - m)


def theta_johnson(n: int, w: int, i: int) -> float:
    """theta(J(n,w,i)) = |V| (-m) / (1 - m), m = min over k >= 1 of Z_k(i)."""
    return float(_theta_fraction(n, w, i))


def delsarte_lp(n: int, w: int, i: int) -> lp_core.LpSolution:
    """
    The Delsarte program over the inner distribution x_0..x_w (by distance):
    maximize sum x_d with x_0 = 1, x_{w-i} = 0, x >= 0 and
    sum_d x_d Q_k(d) >= 0 for k = 1..w. Rows are divided by m_k.
    """
    spec, forbidden = _distance(n, w, i)
    W = spec.w
    rows = [[spec.P[d][k] / spec.valencies[d] for d in range(W + 1)] for k in range(1, W + 1)]
    bounds = [(0.0, None)] * (W + 1)
    bounds[0] = (1.0, 1.0)
    bounds[forbidden] = (0.0, 0.0)
    p = lp_core.LinearProgram(
        objective=-np.ones(W + 1),
        rows=np.array(rows),
        bounds=np.zeros(W),
        variable_bounds=bounds,
    )
    sol = lp_core.solve(p)
    if not sol.optimal:
        # x = e_0 is always feasible and the program is bounded
        raise SolverError(f"Delsarte LP for J({n},{w},{i}) reported {sol.status.value}")
    return sol


def theta_prime_johnson(n: int, w: int, i: int) -> float:
    sol = delsarte_lp(n, w, i)
    value = -sol.objective_value
    log.debug(f"theta'(J({n},{w},{i})) = {value:.6f}, dual gap {sol.duality_gap:.1e}")
    return value


def theta_equality_condition(n: int, w: int, i: int) -> bool:
    """
    With k0 the index minimizing Z_k(i), True iff Z_k0(i) is also the
    minimum of Z_k0(j) over all j. Necessary for theta = theta'.
    """
    spec, d = _distance(n, w, i)
    Z = spec.normalized(d)
    k0 = min(range(1, spec.w + 1), key=lambda k: Z[k])
    row = [Fraction(spec.P[e][k0], spec.valencies[e]) for e in range(spec.w + 1)]
    return row[d] == min(row)


def hoffman_theta(adjacency) -> float:
    """|V| (-lambda_min) / (lambda_max - lambda_min) from a dense eigensolve."""
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidUsage("adjacency must be a square matrix")
    ev = linalg.eigh(A, eigvals_only=True)
    lo, hi = ev[0], ev[-1]
    if hi - lo <= 1e-12:
        return float(A.shape[0])
    return A.shape[0] * (-lo) / (hi - lo)
