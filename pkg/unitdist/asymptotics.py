"""
Exponential rates of the density bounds as n grows.

A J(n, w, i) constraint with radius r contributes, for large n, a bound of
order f(r)^n with

    c(r) = (1 + sqrt(1 - r^2)) exp(-sqrt(1 - r^2)),     f(r) = sqrt(2 c(r) / e),

as long as its independence ratio decays faster than (sqrt(2/e))^n. The
functions here evaluate those rates for Frankl-Wilson (w ~ 2an) and
Raigorodskii type families, locate the best parameters, and check the
explicit feasible points (m^n, 1, gamma^n) numerically for concrete n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import InvalidUsage, TargetMissed
from .euclid_bound import BoundProblem, SubgraphConstraint, theorem_feasible_point, verify_feasible
from .independence import is_prime_power
from .logger import log
from .specialfn import first_bessel_zero

SQRT_2_OVER_E = math.sqrt(2.0 / math.e)
# minimizer of fw_rate
A_OPT = (2.0 - math.sqrt(2.0)) / 4.0

FW_BASE = 1.262
RAIGO_BASE = 1.268
LIMIT_BASE = 1.316

# ------------------------------------------------------------------------------------ #
#                                    rate functions                                    #
# ------------------------------------------------------------------------------------ #


def _c(x: float) -> float:
    s = math.sqrt(max(0.0, 1.0 - x * x))
    return (1.0 + s) * math.exp(-s)


def c_of(r: float) -> float:
    if not 0 < r <= 1:
        raise InvalidUsage(f"c(r) is defined for 0 < r <= 1, got {r}")
    return _c(r)


def c_prime(x: float) -> float:
    """c'(x) = x exp(-sqrt(1 - x^2))."""
    if not 0 < x < 1:
        raise InvalidUsage(f"c'(x) is evaluated for 0 < x < 1, got {x}")
    return x * math.exp(-math.sqrt(1.0 - x * x))


def f_of(r: float) -> float:
    return math.sqrt(2.0 * c_of(r) / math.e)


def H(a: float) -> float:
    """Binary entropy in nats."""
    if not 0 <= a <= 1:
        raise InvalidUsage(f"H(a) needs 0 <= a <= 1, got {a}")
    return -sum(p * math.log(p) for p in (a, 1.0 - a) if p > 0)


def H2(u: float, v: float) -> float:
    """Ternary entropy of (u, v, 1 - u - v) in nats."""
    if u < 0 or v < 0 or u + v > 1:
        raise InvalidUsage(f"H2 needs u, v >= 0 and u + v <= 1, got ({u}, {v})")
    return -sum(p * math.log(p) for p in (u, v, 1.0 - u - v) if p > 0)


def fw_rate(a: float) -> float:
    """b(a) = exp(-(H(2a) - H(a))), the n-th root of C(n, an) / C(n, 2an)."""
    if not 0 < a < 0.25:
        raise InvalidUsage(f"the Frankl-Wilson rate needs 0 < a < 1/4, got {a}")
    return math.exp(-(H(2 * a) - H(a)))


def r_of_a(a: float) -> float:
    """Limiting radius of J(n, 2an, an) as n grows."""
    if not 0 < a < 0.5:
        raise InvalidUsage(f"r(a) needs 0 < a < 1/2, got {a}")
    return math.sqrt(1.0 - 2.0 * a)


def r_min(n: int, p: int) -> float:
    """Radius of J(n, 2p-1, p-1) with unit edges."""
    if not (1 <= p and 2 * p - 1 <= n):
        raise InvalidUsage(f"r_min needs 1 <= p and 2p-1 <= n, got ({n}, {p})")
    return math.sqrt((n - 2 * p + 1) * (2 * p - 1) / (2 * n * p))


def a0() -> float:
    """The a in (A_OPT, 1/4) with fw_rate(a) = sqrt(2/e)."""
    def g(a):
        return fw_rate(a) - SQRT_2_OVER_E

    lo, hi = A_OPT, 0.25 - 1e-15
    if not g(lo) < 0 < g(hi):
        raise TargetMissed("fw_rate - sqrt(2/e) does not change sign on (A_OPT, 1/4)")
    return optimize.bisect(g, lo, hi, xtol=1e-12)


# ------------------------------------------------------------------------------------ #
#                                       reports                                        #
# ------------------------------------------------------------------------------------ #


@dataclass
class FwReport:
    a_opt: float
    b_opt: float
    a0: float
    r_a0: float
    f_r_a0: float
    target: float
    passed: bool
    # (n, r_min(n, round(a0 n))) pairs
    r_min_samples: list[tuple[int, float]] = field(default_factory=list)

    def to_rows(self) -> list[dict]:
        return [
            {"quantity": "a_opt", "value": self.a_opt},
            {"quantity": "b(a_opt)", "value": self.b_opt},
            {"quantity": "a0", "value": self.a0},
            {"quantity": "r(a0)", "value": self.r_a0},
            {"quantity": "f(r(a0))", "value": self.f_r_a0},
            {"quantity": f"1/{FW_BASE}", "value": self.target},
            {"quantity": "passed", "value": self.passed},
        ] + [{"quantity": f"r_min({n})", "value": r} for n, r in self.r_min_samples]


def fw_exponent_report(sample_sizes=(100, 1000, 10000)) -> FwReport:
    """
    a0 by bisection, r(a0) and f(r(a0)); raises TargetMissed unless
    f(r(a0)) < 1/1.262.
    """
    a = a0()
    r = r_of_a(a)
    f = f_of(r)
    target = 1.0 / FW_BASE
    samples = [(n, r_min(n, max(1, round(a * n)))) for n in sample_sizes]
    report = FwReport(A_OPT, fw_rate(A_OPT), a, r, f, target, f < target, samples)
    log.info(f"a0 = {a:.10f}, r(a0) = {r:.10f}, f(r(a0)) = {f:.10f} vs {target:.10f}")
    if not report.passed:
        raise TargetMissed(f"f(r(a0)) = {f:.8f} is not below 1/{FW_BASE}")
    return report


@dataclass
class FwInstance:
    """A concrete Frankl-Wilson graph J(n, 2q-1, q-1) for dimension n."""

    n: int
    q: int
    w: int
    i: int
    radius: float
    # C(n, q-1) / C(n, 2q-1) and its n-th root
    alpha_ratio: float
    rate: float


def nearest_prime_power(x: float) -> int:
    """The prime power closest to x (the smaller one on ties)."""
    if x < 2:
        return 2
    lo = math.floor(x)
    hi = lo + 1
    while not is_prime_power(hi):
        hi += 1
    while lo >= 2 and not is_prime_power(lo):
        lo -= 1
    if lo < 2:
        return hi
    return lo if x - lo <= hi - x else hi


def fw_instance(n: int, a: float | None = None) -> FwInstance:
    """J(n, 2q-1, q-1) with q the prime power nearest a n (default a = a0)."""
    if n < 3:
        raise InvalidUsage("fw_instance needs n >= 3")
    a = a0() if a is None else a
    q = nearest_prime_power(a * n)
    while 2 * q - 1 > n:
        q -= 1
        while q > 2 and not is_prime_power(q):
            q -= 1
    w, i = 2 * q - 1, q - 1
    log_ratio = (
        math.lgamma(n + 1) - math.lgamma(q) - math.lgamma(n - q + 2)
        - (math.lgamma(n + 1) - math.lgamma(w + 1) - math.lgamma(n - w + 1))
    )
    ratio = math.exp(log_ratio)
    return FwInstance(n, q, w, i, r_min(n, q), ratio, math.exp(log_ratio / n))


@dataclass
class RaigoReport:
    x1: float
    x2: float
    z: float
    y1: float
    b: float
    r: float
    f: float
    b_below_sqrt_2e: bool
    f_below_target: bool

    def to_rows(self) -> list[dict]:
        return [{"quantity": k, "value": v} for k, v in vars(self).items()]


def _raigo_check(x1: float, x2: float) -> float:
    if not (0 < x2 <= x1 and x1 + x2 < 1):
        raise InvalidUsage(f"need 0 < x2 <= x1 and x1 + x2 < 1, got ({x1}, {x2})")
    z = (x1 + 3 * x2) / 2
    disc = -3 * z * z + 6 * z + 1
    if not disc > 0:
        raise InvalidUsage(f"-3z^2 + 6z + 1 must be positive, z = {z}")
    return z


def raigo_b(x1: float, x2: float) -> float:
    z = _raigo_check(x1, x2)
    y1 = (-1 + math.sqrt(-3 * z * z + 6 * z + 1)) / 3
    return math.exp(-(H2(x1, x2) - H2(y1, (z - y1) / 2)))


def raigo_r(x1: float, x2: float) -> float:
    _raigo_check(x1, x2)
    return math.sqrt(((x1 + x2) - (x1 - x2) ** 2) / (x1 + 3 * x2))


def raigo_report(x1: float, x2: float) -> RaigoReport:
    z = _raigo_check(x1, x2)
    y1 = (-1 + math.sqrt(-3 * z * z + 6 * z + 1)) / 3
    b = raigo_b(x1, x2)
    r = raigo_r(x1, x2)
    f = f_of(r)
    return RaigoReport(x1, x2, z, y1, b, r, f, b < SQRT_2_OVER_E, f < 1.0 / RAIGO_BASE)


# ------------------------------------------------------------------------------------ #
#                                    fixed points                                      #
# ------------------------------------------------------------------------------------ #


def _check_phi(r: float, gamma: float):
    if not 0 < r < 1:
        raise InvalidUsage(f"need 0 < r < 1, got {r}")
    if not gamma**2 > c_of(r):
        raise InvalidUsage(f"need gamma^2 > c(r) = {c_of(r):.6f}, got gamma = {gamma}")


def phi(x: float, r: float, gamma: float) -> float:
    """(c(r x) / gamma^2 + x) / 2."""
    return (_c(r * x) / gamma**2 + x) / 2.0


def phi_iterates(r: float, gamma: float, steps: int) -> list[float]:
    """x_0 = 1/gamma^2, x_{k+1} = phi(x_k)."""
    _check_phi(r, gamma)
    xs = [1.0 / gamma**2]
    for _ in range(steps):
        xs.append(phi(xs[-1], r, gamma))
    return xs


def phi_fixed_point(r: float, gamma: float, tol: float = 1e-12, max_steps: int = 100_000) -> float:
    """The unique fixed point l of phi, reached by iteration from 1/gamma^2; l < 1."""
    _check_phi(r, gamma)
    x = 1.0 / gamma**2
    for step in range(max_steps):
        nxt = phi(x, r, gamma)
        if abs(nxt - x) < tol:
            x = nxt
            break
        x = nxt
    else:
        raise TargetMissed(f"phi iteration did not settle after {max_steps} steps")
    log.debug(f"phi fixed point {x:.12f} after {step + 1} steps")
    if not x < 1:
        raise TargetMissed(f"phi fixed point {x} is not below 1")
    return x


# ------------------------------------------------------------------------------------ #
#                                 feasible points                                      #
# ------------------------------------------------------------------------------------ #


@dataclass
class LemmaCertificate:
    n: int
    passed: bool
    # minimum of m^n + Omega_n(t) + gamma^n Omega_n(r t) on [0, T]
    f_min: float
    t_min: float
    tail_horizon: float
    tail_margin: float
    precondition_ok: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def lemma_certificate(
    n: int,
    r: float,
    gamma: float,
    m: float,
    samples: int | None = None,
    t_max: float | None = None,
    max_doublings: int = 6,
) -> LemmaCertificate:
    """
    Check m^n + Omega_n(t) + gamma^n Omega_n(r t) >= 0 for all t >= 0.

    The horizon starts past the minimum of Omega_n(r t) and is doubled until the
    tail bound is dominated by m^n (or `max_doublings` is used up, which fails).
    A violated precondition only logs a warning; the check still runs.
    """
    if not 0 < r < 1:
        raise InvalidUsage(f"need 0 < r < 1, got {r}")
    ok = gamma > math.sqrt(_c(r)) and m > gamma * SQRT_2_OVER_E
    if not ok:
        log.warning(f"(r, gamma, m) = ({r}, {gamma}, {m}) violates gamma > sqrt(c(r)) or m > gamma sqrt(2/e)")

    z = theorem_feasible_point(n, r, gamma, m)
    constraint = SubgraphConstraint(((r, 1.0),), 1.0, "lemma")
    T = t_max or max(50.0, 3.0 * first_bessel_zero(n).t_min / r)

    for _ in range(max_doublings + 1):
        k = samples or max(4000, int(40 * T))
        p = BoundProblem(n, (constraint,), t_max=T, samples=k, revalidate_factor=1)
        if p.tail_margin(z, p.t_max) >= 0:
            break
        T *= 2
    report = verify_feasible(z, p, tolerance=0.0)
    passed = report.grid_min >= 0 and report.tail_margin >= 0
    return LemmaCertificate(
        n=n,
        passed=passed,
        f_min=report.grid_min,
        t_min=report.t_at_min,
        tail_horizon=report.tail_horizon,
        tail_margin=report.tail_margin,
        precondition_ok=ok,
    )


@dataclass
class LemmaSweep:
    n_star: int | None
    span: int
    verdicts: dict[int, bool]


def lemma_n_star(r: float, gamma: float, m: float, n_from: int = 2, n_to: int = 400, span: int = 50, **kwargs) -> LemmaSweep:
    """
    Smallest n* in [n_from, n_to - span] such that the certificate passes for
    every n in [n*, n* + span]. Empirical data, not a theorem.
    """
    verdicts: dict[int, bool] = {}
    run_start = None
    for n in range(n_from, n_to + 1):
        verdicts[n] = lemma_certificate(n, r, gamma, m, **kwargs).passed
        if verdicts[n]:
            run_start = n if run_start is None else run_start
            if n - run_start >= span:
                log.info(f"lemma certificate passes for n in [{run_start}, {n}]")
                return LemmaSweep(run_start, span, verdicts)
        else:
            run_start = None
    return LemmaSweep(None, span, verdicts)


@dataclass
class LimitReport:
    c_half: float
    f_half: float
    target: float
    passed: bool
    increasing: bool


def limit_base_check(grid=None) -> LimitReport:
    """f(1/2) > 1/1.316 and f increasing on [1/2, 1)."""
    grid = np.arange(0.5, 0.995, 0.01) if grid is None else np.asarray(grid)
    values = [f_of(float(r)) for r in grid]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    f_half = f_of(0.5)
    target = 1.0 / LIMIT_BASE
    return LimitReport(c_of(0.5), f_half, target, f_half > target and increasing, increasing)
