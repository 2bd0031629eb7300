"""
The radial kernel Omega_n.

Omega_n(t) is the normalized Fourier transform of the surface measure of the
unit sphere in dimension n:

    Omega_n(t) = Gamma(n/2) (2/t)^(n/2-1) J_{n/2-1}(t),   Omega_n(0) = 1.

Two evaluation paths exist:

- `OmegaKernel.evaluate` (scalar, extended precision through mpmath): the
  confluent series 0F1(; n/2; -t^2/4) up to `series_cutoff`, the large-argument
  Hankel expansion beyond it whenever that expansion converges to tolerance.
- `OmegaKernel.evaluate_array` (vectorised, double precision): a short float
  series near the origin and `scipy.special.jv` elsewhere. Sampling grids and
  certification run on this path; the tests pin it to the scalar path.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import mpmath
import numpy as np
from cachetools import LRUCache, cached
from scipy import optimize, special

from .config import config
from .errors import InvalidUsage, PrecisionLoss
from .logger import log

# largest dimension the double precision path handles before J_nu underflows
MAX_ARRAY_DIMENSION = 600


@dataclass(frozen=True)
class KernelMinimum:
    n: int
    # abscissa of the global minimum, the first positive zero of J_{n/2}
    t_min: float
    # Omega_n(t_min), negative
    value: float


def _check_dimension(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidUsage(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def _check_argument(t) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise InvalidUsage(f"Omega_n is evaluated for t >= 0 only, got {t!r}")
    return t


@dataclass(frozen=True)
class OmegaKernel:
    """
    Evaluator for Omega_n. Immutable, safe to share between threads.

    # Args
    n: int -- dimension, >= 2
    work_precision: int -- decimal digits used by the scalar path
    series_cutoff: float -- scalar path switches from the series to the
        asymptotic expansion above this t; defaults to max(series_cutoff_min, n)
    tolerance: float -- absolute error the scalar path must meet
    """

    n: int
    work_precision: int = 30
    series_cutoff: float | None = None
    series_cutoff_min: float = 30.0
    tolerance: float = 1e-12
    _nu: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = _check_dimension(self.n)
        object.__setattr__(self, "n", n)
        if self.series_cutoff is None:
            object.__setattr__(self, "series_cutoff", float(max(self.series_cutoff_min, n)))
        if self.work_precision < 16:
            raise InvalidUsage("work_precision below double precision makes no sense")
        object.__setattr__(self, "_nu", n / 2 - 1)

    @property
    def nu(self) -> float:
        """Order of the Bessel function behind the kernel."""
        return self._nu

    # ------------------------------------------------------------------------ #
    #                              scalar path                                 #
    # ------------------------------------------------------------------------ #

    def evaluate(self, t) -> float:
        """Omega_n(t) to absolute error `tolerance`."""
        t = _check_argument(t)
        if t == 0.0:
            return 1.0
        if t > self.series_cutoff:
            value = self.evaluate_asymptotic(t)
            if value is not None:
                return float(value)
            log.debug(f"asymptotic expansion not converged at n={self.n}, t={t}")

        value = self.evaluate_series(t)
        # precision audit: repeat with more digits and compare
        check = self.evaluate_series(t, extra_digits=15)
        err = abs(value - check)
        if err > self.tolerance:
            raise PrecisionLoss(
                f"Omega_{self.n}({t}) error estimate {float(err):.3e} above tolerance",
                payload={"n": self.n, "t": t},
            )
        return float(check)

    def evaluate_series(self, t, extra_digits: int = 0) -> mpmath.mpf:
        """
        The confluent series 0F1(; n/2; -t^2/4) at `work_precision` digits,
        plus guard digits for the ~t/ln(10) digits the alternating sum cancels.
        """
        guard = int(float(t) / math.log(10.0)) + 5
        with mpmath.workdps(self.work_precision + guard + extra_digits):
            t = mpmath.mpf(t)
            return +mpmath.hyp0f1(mpmath.mpf(self.n) / 2, -(t * t) / 4)

    def evaluate_asymptotic(self, t) -> mpmath.mpf | None:
        """
        Hankel's large-argument expansion of J_nu, scaled to Omega_n.
        Returns None when the smallest term of the expansion is not below tolerance.
        For odd n the expansion terminates and is exact.
        """
        with mpmath.workdps(self.work_precision):
            t = mpmath.mpf(t)
            nu = mpmath.mpf(self.n - 2) / 2
            prefactor = mpmath.gamma(mpmath.mpf(self.n) / 2) * (2 / t) ** nu
            scale = prefactor * mpmath.sqrt(2 / (mpmath.pi * t))

            mu = 4 * nu * nu
            p = q = mpmath.mpf(0)
            term = mpmath.mpf(1)
            k = 0
            while True:
                sign = -1 if (k // 2) % 2 else 1
                if k % 2 == 0:
                    p += sign * term
                else:
                    q += sign * term
                nxt = term * (mu - (2 * k + 1) ** 2) / ((k + 1) * 8 * t)
                if nxt == 0:
                    break
                if abs(scale * nxt) < self.tolerance / 100:
                    break
                if abs(nxt) >= abs(term) or k > 200:
                    return None
                term = nxt
                k += 1

            chi = t - (nu / 2 + mpmath.mpf(1) / 4) * mpmath.pi
            return scale * (p * mpmath.cos(chi) - q * mpmath.sin(chi))

    # ------------------------------------------------------------------------ #
    #                              array path                                  #
    # ------------------------------------------------------------------------ #

    def evaluate_array(self, ts) -> np.ndarray:
        """Omega_n on an array of nonnegative arguments, in double precision."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (np.min(ts) < 0 or not np.all(np.isfinite(ts))):
            raise InvalidUsage("Omega_n is evaluated for finite t >= 0 only")
        if self.n > MAX_ARRAY_DIMENSION:
            raise InvalidUsage(
                f"the array path supports n <= {MAX_ARRAY_DIMENSION}, use evaluate()"
            )
        nu = self._nu
        out = np.empty_like(ts)

        # no cancellation below this: |t^2/4| <= nu + 1
        near = ts <= 2.0 * math.sqrt(nu + 1.0)
        if np.any(near):
            x = -(ts[near] ** 2) / 4.0
            term = np.ones_like(x)
            total = np.ones_like(x)
            for k in range(1, 80):
                term = term * x / (k * (nu + k))
                total += term
                if np.max(np.abs(term)) < 1e-18:
                    break
            out[near] = total

        far = ~near
        if np.any(far):
            tf = ts[far]
            if nu == 0:
                out[far] = special.j0(tf)
            else:
                log_prefactor = special.gammaln(self.n / 2) + nu * np.log(2.0 / tf)
                out[far] = np.exp(log_prefactor) * special.jv(nu, tf)
        return out

    # ------------------------------------------------------------------------ #
    #                              bounds                                      #
    # ------------------------------------------------------------------------ #

    def envelope(self, t) -> float:
        """Gamma(n/2) (2/t)^(n/2-1), from |J_nu| <= 1."""
        t = float(t)
        if not t > 0:
            raise InvalidUsage(f"the envelope needs t > 0, got {t!r}")
        if self._nu == 0:
            return 1.0
        return math.exp(math.lgamma(self.n / 2) + self._nu * math.log(2.0 / t))

    def tail_bound(self, T) -> float:
        """
        A certified bound for sup_{t >= T} |Omega_n(t)|.

        Uses the smaller of `envelope(T)` and the Nicholson bound: for nu >= 1/2,
        t (J_nu^2 + Y_nu^2)(t) decreases in t, and for nu < 1/2 it increases to
        2/pi, so |J_nu(t)| <= sqrt(C/t) on [T, oo) with C = max(T M(T)^2, 2/pi).
        Both factors decrease in t, so the value at T bounds the tail.
        """
        T = float(T)
        env = self.envelope(T)
        nu = self._nu
        with np.errstate(over="ignore", invalid="ignore"):
            modulus_sq = special.jv(nu, T) ** 2 + special.yv(nu, T) ** 2
        if not math.isfinite(modulus_sq):
            return env
        c = max(T * modulus_sq, 2.0 / math.pi) * (1.0 + 1e-12)
        log_nich = math.lgamma(self.n / 2) + nu * math.log(2.0 / T) + 0.5 * math.log(c / T)
        return min(env, math.exp(log_nich))

    def minimum(self) -> KernelMinimum:
        return first_bessel_zero(self.n)


# ------------------------------------------------------------------------------------ #
#                                  module level API                                    #
# ------------------------------------------------------------------------------------ #

_lock = threading.Lock()


def kernel_settings() -> dict:
    """OmegaKernel keyword arguments from the `kernel` config section."""
    view = config["kernel"]
    return {
        "work_precision": view["work_precision"].get(int),
        "series_cutoff_min": view["series_cutoff_min"].as_number(),
    }


@cached(LRUCache(maxsize=256), lock=_lock)
def kernel(n: int) -> OmegaKernel:
    """Shared default-configured kernel for dimension n."""
    return OmegaKernel(_check_dimension(n), **kernel_settings())


def omega(n: int, t: float) -> float:
    return kernel(n).evaluate(t)


def omega_envelope(n: int, t: float) -> float:
    return kernel(n).envelope(t)


def omega_tail_bound(n: int, T: float) -> float:
    return kernel(n).tail_bound(T)


def omega_array(n: int, ts) -> np.ndarray:
    return kernel(n).evaluate_array(ts)


_zero_lock = threading.Lock()


@cached(LRUCache(maxsize=1024), lock=_zero_lock)
def first_bessel_zero(n: int) -> KernelMinimum:
    """
    j_{n/2,1}, the first positive zero of J_{n/2}, and Omega_n there.
    The zero is bracketed by scanning from n/2 in steps of 0.1 and refined with brentq.
    """
    n = _check_dimension(n)
    order = n / 2
    step = 0.1
    limit = order + 20.0 * (1.0 + order ** (1.0 / 3.0))

    lo = order
    f_lo = special.jv(order, lo)
    hi = lo + step
    while hi <= limit:
        f_hi = special.jv(order, hi)
        if f_lo > 0 and f_hi <= 0:
            break
        lo, f_lo = hi, f_hi
        hi += step
    else:
        raise InvalidUsage(
            f"no sign change of J_{order} in [{order}, {limit:.3f}]",
            payload={"n": n},
        )

    t_min = optimize.brentq(lambda t: special.jv(order, t), lo, hi, xtol=1e-14, rtol=1e-15)
    value = omega(n, t_min)
    log.debug(f"j_({order},1) = {t_min:.12f}, Omega_{n} there = {value:.12f}")
    return KernelMinimum(n=n, t_min=t_min, value=value)
