"""Shared numerical primitives.

Segmented prime sieve, quadratic characters mod p, the principal-value
logarithmic integral Li(e^w) on (0,1), the upper incomplete gamma function
for complex first argument, adaptive Gauss-Kronrod quadrature, and
compensated accumulation. All routines are pure functions of their
arguments and are safe to call from multiple threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from heapq import heappush, heappop
from typing import Callable

import numpy as np

from .config import DEFAULT, EULER_GAMMA, Config
from .errors import DomainError, InputError, NumericalError, RangeError

_DBL_EPS = 2.220446049250313e-16


# ----------------------------------------------------------------------
# compensated accumulation
# ----------------------------------------------------------------------

class CompensatedSum:
    """Neumaier running sum: error O(eps * sum |x_i|) independent of count."""

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0

    def add(self, x: float) -> None:
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


def fsum(values) -> float:
    """Exact (correctly rounded) sum of a sequence of floats."""
    return math.fsum(values)


# ----------------------------------------------------------------------
# primes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeRange:
    """Ascending primes in the closed interval [lo, hi]."""

    lo: int
    hi: int
    primes: np.ndarray  # int64, strictly ascending

    def __len__(self) -> int:
        return int(self.primes.shape[0])


def sieve_primes(limit: int, cfg: Config = DEFAULT) -> PrimeRange:
    """All primes <= limit via an Eratosthenes bit sweep."""
    limit = int(limit)
    if limit < 2:
        raise InputError(f"sieve limit must be >= 2, got {limit}")
    if limit > cfg.sieve_limit_cap:
        raise RangeError(f"sieve limit {limit} exceeds resource guard {cfg.sieve_limit_cap}")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return PrimeRange(2, limit, np.flatnonzero(mask).astype(np.int64))


def sieve_range(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi] given base primes covering sqrt(hi) (segmented sweep)."""
    lo = max(int(lo), 2)
    hi = int(hi)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(hi - lo + 1, dtype=bool)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        mask[start - lo :: p] = False
    if lo <= 1:
        mask[: 2 - lo] = False
    out = np.flatnonzero(mask).astype(np.int64) + lo
    return out[out >= 2]


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit integers."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ----------------------------------------------------------------------
# quadratic characters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    """Value of the quadratic character: one of -1, 0, +1."""

    value: int


def _require_odd_prime(p: int) -> int:
    p = int(p)
    if p == 2 or not is_prime(p):
        raise InputError(f"p must be an odd prime, got {p}")
    return p


def quadratic_character(a: int, p: int) -> QuadResult:
    """Legendre symbol (a/p) via Euler's criterion; 0 iff p | a."""
    p = _require_odd_prime(p)
    a = int(a) % p
    if a == 0:
        return QuadResult(0)
    e = pow(a, (p - 1) // 2, p)
    return QuadResult(1 if e == 1 else -1)


def quadratic_character_table(p: int) -> np.ndarray:
    """int8 table t with t[a] = (a/p) for 0 <= a < p, built in O(p)."""
    p = _require_odd_prime(p)
    table = np.full(p, -1, dtype=np.int8)
    table[0] = 0
    t = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    table[(t * t) % p] = 1
    return table


# ----------------------------------------------------------------------
# complete gamma for complex argument (Lanczos, g = 7)
# ----------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) for complex z, ~1e-13 relative accuracy away from poles."""
    z = complex(z)
    if z.real < 0.5:
        s = cmath.sin(math.pi * z)
        if s == 0:
            raise DomainError(f"gamma pole at z = {z}")
        return math.pi / (s * complex_gamma(1.0 - z))
    z -= 1.0
    a = _LANCZOS[0]
    t = z + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (z + i)
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * a


# ----------------------------------------------------------------------
# upper incomplete gamma
# ----------------------------------------------------------------------

def _uig_continued_fraction(s: complex, x: float, cfg: Config) -> complex:
    # Gamma(s,x) = e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...)))
    # modified Lentz; reliable for x >= max(1, Re(s)+1)
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, cfg.gamma_cf_maxiter):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < cfg.gamma_cf_tol:
            return cmath.exp(-x + s * math.log(x)) * h
    raise NumericalError(
        f"incomplete-gamma continued fraction failed to converge at s={s}, x={x}",
        partial=cmath.exp(-x + s * math.log(x)) * h,
    )


def _lower_gamma_series(s: complex, x: float, cfg: Config) -> complex:
    # gamma(s,x) = x^s e^{-x} sum_k x^k / (s (s+1) ... (s+k)); all-positive terms
    term = 1.0 / s
    total = term
    for k in range(1, cfg.gamma_cf_maxiter):
        term *= x / (s + k)
        total += term
        if abs(term) < abs(total) * cfg.series_rel_tol:
            return cmath.exp(-x + s * cmath.log(complex(x))) * total
    raise NumericalError(
        f"incomplete-gamma series failed to converge at s={s}, x={x}",
        partial=cmath.exp(-x + s * cmath.log(complex(x))) * total,
    )


def _e1_series(x: float, cfg: Config) -> float:
    # Gamma(0,x) = E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!), x < 1
    acc = CompensatedSum(-EULER_GAMMA - math.log(x))
    term = 1.0
    for k in range(1, cfg.gamma_cf_maxiter):
        term *= -x / k
        acc.add(-term / k)
        if abs(term) / k < cfg.series_rel_tol * max(abs(acc.value), 1e-30):
            return acc.value
    raise NumericalError(f"E1 series failed to converge at x={x}")


def upper_incomplete_gamma(s, x: float, cfg: Config = DEFAULT) -> complex:
    """Gamma(s, x) = integral_x^inf t^(s-1) e^(-t) dt for Re(s) in (-2, 10), x > 0.

    Continued-fraction branch for x >= max(1, Re(s)+1); series or recurrence
    branch otherwise. Relative accuracy ~1e-13; degrades within ~1e-6 of the
    poles of Gamma(s) at nonpositive integers (exact integers are handled).
    """
    s = complex(s)
    x = float(x)
    if not (x > 0.0):
        raise InputError(f"x must be positive, got {x}")
    if not (-2.0 < s.real < 10.0):
        raise InputError(f"Re(s) must lie in (-2, 10), got {s}")
    if x >= max(1.0, s.real + 1.0):
        return _uig_continued_fraction(s, x, cfg)
    # series region: x < max(1, Re(s)+1)
    if s.imag == 0.0 and s.real == round(s.real) and s.real <= 0.0:
        # exact nonpositive integers: E1-type path, Gamma(s) itself has a pole
        m = int(-s.real)
        g = _e1_series(x, cfg) if x < 1.0 else _uig_continued_fraction(complex(0.0), x, cfg).real
        # walk down: Gamma(s-1,x) = (Gamma(s,x) - x^(s-1) e^(-x)) / (s-1)
        val = complex(g)
        sj = 0.0
        for _ in range(m):
            sj -= 1.0
            val = (val - math.exp(sj * math.log(x) - x)) / sj
        return val
    dist = min(abs(s + k) for k in range(0, 3))
    if dist > 0.5 or s.real > 0.5:
        return complex_gamma(s) - _lower_gamma_series(s, x, cfg)
    # near-pole region: lift with the recurrence Gamma(s+1,x) = s Gamma(s,x) + x^s e^{-x}
    m = 0
    while (s + m).real <= 0.5:
        m += 1
    val = complex_gamma(s + m) - _lower_gamma_series(s + m, x, cfg)
    for j in range(m, 0, -1):
        sj = s + (j - 1)
        val = (val - cmath.exp(sj * cmath.log(complex(x)) - x)) / sj
    return val


# ----------------------------------------------------------------------
# principal-value logarithmic integral on (0, 1)
# ----------------------------------------------------------------------

def pv_li_exp(w: float, cfg: Config = DEFAULT) -> float:
    """Li(e^w) for w < 0, i.e. the logarithmic integral at arguments in (0,1).

    Uses the classical series gamma + log|w| + sum_n w^n/(n! n) for moderate
    |w| and the continued fraction for Gamma(0,-w) once cancellation in the
    series would cost more than the stated tolerance (|w| > 5).
    """
    w = float(w)
    if w == 0.0:
        raise DomainError("Li(e^w) diverges at w = 0")
    if w > 0.0:
        raise InputError(f"only arguments e^w in (0,1) are supported, got w = {w}")
    if w <= -cfg.li_series_switch:
        # Li(e^w) = Ei(w) = -Gamma(0, -w) for w < 0
        return -_uig_continued_fraction(complex(0.0), -w, cfg).real
    acc = CompensatedSum(EULER_GAMMA + math.log(abs(w)))
    term = 1.0
    for n in range(1, 10000):
        term *= w / n
        acc.add(term / n)
        if abs(term) / n < cfg.series_rel_tol * max(abs(acc.value), 1e-300):
            break
    return acc.value


# ----------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature (G7, K15)
# ----------------------------------------------------------------------

_XGK = (
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
)
_WGK = (
    0.022935322010529224,
    0.06309209262997855,
    0.10479001032225018,
    0.14065325971552592,
    0.1690047266392679,
    0.19035057806478542,
    0.20443294007529889,
    0.20948214108472782,
)
_WG = (
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
)


def _gk15(f: Callable[[float], complex], a: float, b: float):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fc = f(mid)
    res_g = _WG[3] * fc
    res_k = _WGK[7] * fc
    for j in range(7):
        dx = half * _XGK[j]
        f1 = f(mid - dx)
        f2 = f(mid + dx)
        res_k += _WGK[j] * (f1 + f2)
        if j % 2 == 1:  # K15 nodes 1,3,5 are the G7 nodes
            res_g += _WG[j // 2] * (f1 + f2)
    res_k *= half
    res_g *= half
    return res_k, abs(res_k - res_g)


@dataclass(frozen=True)
class QuadResultValue:
    value: complex
    error: float
    intervals: int

    @property
    def real(self) -> float:
        return self.value.real


def adaptive_quad(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float | None = None,
    cfg: Config = DEFAULT,
) -> QuadResultValue:
    """Integrate f over (a, b), b possibly +inf, with a global error target.

    The target is |result - true| <= max(tol * |result|, quad_abs_tol).
    Infinite upper limits are mapped to (0,1] by t = a + (1-v)/v, which
    handles both exponentially and algebraically decaying tails. Exceeding
    the interval budget raises NumericalError carrying the partial estimate.
    """
    tol = cfg.quad_tol if tol is None else float(tol)
    if math.isinf(b):
        g = f
        base = float(a)

        def f(v: float) -> complex:  # noqa: F811 - deliberate remap
            return g(base + (1.0 - v) / v) / (v * v)

        a, b = 0.0, 1.0
    if not b > a:
        raise InputError(f"empty or reversed interval [{a}, {b}]")

    val, err = _gk15(f, a, b)
    heap = [(-err, 0, a, b, val)]
    total = val
    total_err = err
    count = 1
    tick = 1
    while total_err > max(tol * abs(total), cfg.quad_abs_tol):
        if count >= cfg.quad_max_intervals:
            raise NumericalError(
                f"quadrature did not converge within {cfg.quad_max_intervals} intervals "
                f"(estimate {total}, error {total_err:.3e})",
                partial=total,
                estimate=total_err,
            )
        neg_e, _, lo, hi, v = heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += (v1 + v2) - v
        total_err += (e1 + e2) - (-neg_e)
        tick += 1
        heappush(heap, (-e1, tick, lo, mid, v1))
        tick += 1
        heappush(heap, (-e2, tick, mid, hi, v2))
        count += 1
    return QuadResultValue(total, total_err, count)


# ----------------------------------------------------------------------
# misc
# ----------------------------------------------------------------------

def machine_noise(abs_term_sum: float) -> float:
    """Rounding-noise envelope for a compensated sum with given sum |terms|."""
    return _DBL_EPS * abs_term_sum
