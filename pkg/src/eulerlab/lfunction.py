"""Evaluation of L(E,s) and its completion in the critical strip.

The completed function Lambda(s) = N^(s/2) (2 pi)^(-s) Gamma(s) L(E,s) is
computed from the unsmoothed incomplete-gamma expansion

    Lambda(s) = sum_n a_n [ (sqrt(N)/2 pi n)^s     Gamma(s,   2 pi n/sqrt(N))
                  + w_E   (sqrt(N)/2 pi n)^(2-s)   Gamma(2-s, 2 pi n/sqrt(N)) ],

valid for all s; truncation is controlled by the exponential decay of the
incomplete gammas. On the line Re(s) = 1 the second gamma is the conjugate
of the first, which halves the work and makes the detector exactly real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT, Config
from .curves import ApTable, CurveModel
from .errors import (
    InputError,
    NearZeroError,
    PrecisionError,
    RankUndeterminedError,
    ValidationError,
)
from .numerics import complex_gamma, fsum, upper_incomplete_gamma

_TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------
# Dirichlet coefficients
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCoeffs:
    """Integer coefficients a_1..a_n_max of the Dirichlet series of L(E,s)."""

    curve: CurveModel
    n_max: int
    a: np.ndarray  # int64, index 0 unused, a[1] = 1

    def __getitem__(self, n: int) -> int:
        return int(self.a[n])


def dirichlet_coeffs(model: CurveModel, table: ApTable, n_max: int) -> DirichletCoeffs:
    """Expand the Euler product into a_n for n <= n_max.

    Good primes follow the Hecke recurrence a_{p^k} = a_p a_{p^{k-1}} - p a_{p^{k-2}};
    bad primes give a_{p^k} = a_p^k; values extend multiplicatively.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise InputError(f"n_max must be >= 1, got {n_max}")
    table.require_cover(n_max, "dirichlet_coeffs")
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1] = 1
    if n_max == 1:
        return DirichletCoeffs(model, n_max, a)

    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in table.primes:
        p = int(p)
        if p > n_max:
            break
        spf[p::p][spf[p::p] == 0] = p

    ppow: dict[int, list[int]] = {}
    for i in range(len(table)):
        p = int(table.primes[i])
        if p > n_max:
            break
        apv = int(table.ap[i])
        bad = table.kind_codes[i] != 0
        vals = [1, apv]
        pk = p
        while pk * p <= n_max:
            pk *= p
            if bad:
                vals.append(vals[-1] * apv)
            else:
                vals.append(apv * vals[-1] - p * vals[-2])
        ppow[p] = vals

    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        a[n] = ppow[p][k] * a[m]
    return DirichletCoeffs(model, n_max, a)


def required_n_max(model: CurveModel, eps: float, cfg: Config = DEFAULT) -> int:
    """Coefficient count needed by the expansion at truncation target eps."""
    return math.ceil(
        math.sqrt(model.conductor) / _TWO_PI * math.log(1.0 / eps) * cfg.afe_cutoff_constant
    )


# ----------------------------------------------------------------------
# zeros and special values containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroList:
    """Nonnegative critical-line ordinates with multiplicities; r = mult at 0."""

    gammas: tuple[float, ...]
    mults: tuple[int, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.mults):
            raise ValidationError("ordinates and multiplicities differ in length")
        prev = -1.0
        for g, m in zip(self.gammas, self.mults):
            if g < 0:
                raise ValidationError(f"negative ordinate {g}")
            if g <= prev:
                raise ValidationError("ordinates must be strictly ascending")
            if m < 1:
                raise ValidationError(f"multiplicity {m} < 1 at ordinate {g}")
            prev = g

    @classmethod
    def from_ordinates(cls, ordinates: Sequence[float]) -> "ZeroList":
        """Collapse a sorted list with repeats (e.g. rank-many zeros at 0)."""
        gs: list[float] = []
        ms: list[int] = []
        for g in ordinates:
            g = float(g)
            if gs and g == gs[-1]:
                ms[-1] += 1
            else:
                gs.append(g)
                ms.append(1)
        return cls(tuple(gs), tuple(ms))

    @property
    def r(self) -> int:
        """Multiplicity at gamma = 0 (= ord_{s=1} L under RH)."""
        if self.gammas and self.gammas[0] == 0.0:
            return self.mults[0]
        return 0

    def positive(self, t_max: float = math.inf):
        """(gamma, multiplicity) pairs with 0 < gamma <= t_max."""
        return [
            (g, m) for g, m in zip(self.gammas, self.mults) if 0.0 < g <= t_max
        ]

    def flat(self) -> list[float]:
        """Ordinates with multiplicity written out (fixture form)."""
        out: list[float] = []
        for g, m in zip(self.gammas, self.mults):
            out.extend([g] * m)
        return out


@dataclass(frozen=True)
class LSpecialValues:
    """Analytic rank r and derivatives L^(k)(E,1) for k = 0..len(derivs)-1."""

    r: int
    derivs: tuple[float, ...]

    def __post_init__(self):
        if self.r < 0 or self.r >= len(self.derivs):
            raise ValidationError(f"rank {self.r} outside derivative range")

    @property
    def leading(self) -> float:
        """Leading Taylor coefficient a_r = L^(r)(E,1) / r!."""
        return self.derivs[self.r] / math.factorial(self.r)


# ----------------------------------------------------------------------
# the expansion
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AfeValue:
    value: complex
    err_bound: float  # truncation envelope + rounding noise


def _gamma_env(sigma: float, x: float) -> float:
    # |Gamma(s,x)| <= x^(sigma-1) e^(-x) * (1 for sigma<=1 else 1/(1-(sigma-1)/x))
    if x <= max(2.0, 2.0 * (sigma - 1.0)):
        return math.inf
    base = math.exp((sigma - 1.0) * math.log(x) - x)
    if sigma > 1.0:
        base /= 1.0 - (sigma - 1.0) / x
    return base


def lambda_afe(
    model: CurveModel,
    s: complex,
    coeffs: DirichletCoeffs,
    eps: float | None = None,
    cfg: Config = DEFAULT,
) -> AfeValue:
    """Completed Lambda(E,s) with a truncation/rounding error bound."""
    s = complex(s)
    eps = cfg.afe_eps if eps is None else float(eps)
    if not (0.0 < s.real < 4.0):
        raise InputError(f"Re(s) must lie in (0, 4) for the expansion, got {s}")
    need = required_n_max(model, eps, cfg)
    if coeffs.n_max < need:
        raise InputError(
            f"insufficient coefficients: have n_max={coeffs.n_max}, need {need} "
            f"for eps={eps:g} at conductor {model.conductor}"
        )
    rt_n = math.sqrt(model.conductor)
    c = _TWO_PI / rt_n
    log_k = math.log(rt_n / _TWO_PI)
    k1 = cmath.exp(s * log_k)
    k2 = cmath.exp((2.0 - s) * log_k)
    w = float(model.root_number)
    on_line = abs(s.real - 1.0) < 1e-14
    sigma1 = s.real
    sigma2 = 2.0 - s.real

    re_parts: list[float] = []
    im_parts: list[float] = []
    abs_sum = 0.0
    a = coeffs.a
    tail_env = math.inf
    low_count = 0
    n_used = 0
    for n in range(1, coeffs.n_max + 1):
        x = c * n
        n_used = n
        an = int(a[n])
        if an != 0:
            g1 = upper_incomplete_gamma(s, x, cfg)
            if on_line:
                g2 = g1.conjugate()
            else:
                g2 = upper_incomplete_gamma(2.0 - s, x, cfg)
            ln_n = math.log(n)
            term = an * (
                k1 * cmath.exp(-s * ln_n) * g1 + w * k2 * cmath.exp((s - 2.0) * ln_n) * g2
            )
            re_parts.append(term.real)
            im_parts.append(term.imag)
            abs_sum += abs(term)
        # |a_n| <= d(n) sqrt(n) <= 2n gives a closed-form tail envelope
        env = 2.0 * n * (
            abs(k1) * n ** (-sigma1) * _gamma_env(sigma1, x)
            + abs(k2) * n ** (sigma1 - 2.0) * _gamma_env(sigma2, x)
        )
        scale = max(abs_sum, 1e-300)
        if env < eps * scale:
            low_count += 1
            if low_count >= 3:
                tail_env = env * 3.0 / max(1e-300, 1.0 - math.exp(-c))
                break
        else:
            low_count = 0
    else:
        # ran to the end of the table; bound the remaining tail from the envelope
        env = 2.0 * n_used * (
            abs(k1) * n_used ** (-sigma1) * _gamma_env(sigma1, c * n_used)
            + abs(k2) * n_used ** (sigma1 - 2.0) * _gamma_env(sigma2, c * n_used)
        )
        tail_env = env * 3.0 / max(1e-300, 1.0 - math.exp(-c)) if math.isfinite(env) else math.inf

    value = complex(fsum(re_parts), fsum(im_parts))
    err = tail_env + 2.3e-16 * abs_sum
    return AfeValue(value, err)


def l_value(
    model: CurveModel,
    s: complex,
    coeffs: DirichletCoeffs,
    eps: float | None = None,
    cfg: Config = DEFAULT,
) -> complex:
    """L(E,s) = Lambda(E,s) (2 pi)^s / (N^(s/2) Gamma(s))."""
    s = complex(s)
    lam = lambda_afe(model, s, coeffs, eps, cfg)
    factor = cmath.exp(s * math.log(_TWO_PI) - 0.5 * s * math.log(model.conductor))
    return lam.value * factor / complex_gamma(s)


# ----------------------------------------------------------------------
# derivatives at the centre and the log-derivative
# ----------------------------------------------------------------------

_FD_WEIGHTS = {
    # minimal second-order central stencils, offsets in units of the step
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _fd_derivative(values: dict[int, float], k: int, step: float, scale: int) -> float:
    offs, wts = _FD_WEIGHTS[k]
    return sum(w * values[o * scale] for o, w in zip(offs, wts)) / step ** k


def l_derivatives_at_1(
    model: CurveModel,
    coeffs: DirichletCoeffs,
    k_max: int = 4,
    cfg: Config = DEFAULT,
) -> LSpecialValues:
    """L^(k)(E,1) for k <= k_max by Richardson-extrapolated central differences.

    The analytic rank is the smallest k whose derivative exceeds the
    detection threshold; raises RankUndeterminedError if none does.
    """
    if not (0 <= k_max <= 4):
        raise InputError(f"k_max must be in [0, 4], got {k_max}")
    h = cfg.deriv_step
    # union grid for both levels h and h/2: s = 1 + j h/2, |j| <= 4
    values = {
        j: l_value(model, 1.0 + 0.5 * h * j, coeffs, cfg=cfg).real for j in range(-4, 5)
    }
    derivs = []
    for k in range(0, k_max + 1):
        if k == 0:
            derivs.append(values[0])
            continue
        d_h = _fd_derivative(values, k, h, scale=2)
        d_h2 = _fd_derivative(values, k, 0.5 * h, scale=1)
        derivs.append((4.0 * d_h2 - d_h) / 3.0)
    r = None
    for k, d in enumerate(derivs):
        if abs(d) > cfg.rank_threshold:
            r = k
            break
    if r is None:
        raise RankUndeterminedError(
            f"all derivatives up to order {k_max} lie below {cfg.rank_threshold}"
        )
    return LSpecialValues(r, tuple(derivs))


def log_derivative(
    model: CurveModel,
    s: float,
    coeffs: DirichletCoeffs,
    cfg: Config = DEFAULT,
) -> float:
    """L'/L(E,s) for real s > 1 by a central difference of log L."""
    s = float(s)
    if not (1.0 < s <= 3.5):
        raise InputError(f"s must lie in (1, 3.5], got {s}")
    h = cfg.logderiv_step
    vals = []
    for sj in (s - h, s + h):
        v = l_value(model, sj, coeffs, cfg=cfg).real
        if abs(v) < cfg.near_zero_floor:
            raise NearZeroError(f"|L(E,{sj})| < {cfg.near_zero_floor}; log-derivative undefined")
        vals.append(v)
    if vals[0] * vals[1] <= 0:
        raise NearZeroError(f"L(E,s) changes sign near s={s}")
    return (math.log(abs(vals[1])) - math.log(abs(vals[0]))) / (2.0 * h)


# ----------------------------------------------------------------------
# zero finding on the critical line
# ----------------------------------------------------------------------

def critical_detector(
    model: CurveModel, t: float, coeffs: DirichletCoeffs, cfg: Config = DEFAULT
) -> tuple[float, float]:
    """Real detector Z(t): Lambda(1+it) for w=+1, Lambda(1+it)/i for w=-1."""
    lam = lambda_afe(model, complex(1.0, t), coeffs, cfg=cfg)
    z = lam.value if model.root_number == 1 else lam.value / 1j
    return z.real, lam.err_bound


def find_zeros(
    model: CurveModel,
    coeffs: DirichletCoeffs,
    t_max: float,
    values: LSpecialValues | None = None,
    cfg: Config = DEFAULT,
) -> ZeroList:
    """Ordinates of critical-line zeros in (0, t_max], plus gamma=0 with its rank.

    Scans the real detector on a fixed grid, bisects each sign change, and
    raises PrecisionError once the expansion's error bound overwhelms the
    running signal envelope, naming the failing height.
    """
    t_max = float(t_max)
    if t_max > cfg.zero_t_max_cap:
        raise InputError(f"t_max = {t_max} exceeds the desk-scale cap {cfg.zero_t_max_cap}")
    if values is None:
        values = l_derivatives_at_1(model, coeffs, cfg=cfg)
    step = cfg.zero_scan_step
    found: list[float] = []
    t_prev = step
    z_prev, _ = critical_detector(model, t_prev, coeffs, cfg)
    envelope = abs(z_prev)
    n_steps = int(math.floor((t_max - step) / step + 1e-9))
    for i in range(1, n_steps + 1):
        t = step * (i + 1)
        z, err = critical_detector(model, t, coeffs, cfg)
        envelope = max(envelope * 0.98, abs(z))  # slow-decay running scale
        if err > cfg.afe_noise_guard * max(envelope, 1e-300):
            raise PrecisionError(
                f"expansion precision insufficient at height t = {t:.2f} "
                f"(error bound {err:.2e} vs signal envelope {envelope:.2e})",
                at=t,
            )
        if z_prev == 0.0:
            found.append(t_prev)
        elif z_prev * z < 0.0:
            lo, hi = t_prev, t
            zlo = z_prev
            while hi - lo > cfg.zero_bisect_tol:
                mid = 0.5 * (lo + hi)
                zm, _ = critical_detector(model, mid, coeffs, cfg)
                if zm == 0.0:
                    lo = hi = mid
                    break
                if zlo * zm < 0.0:
                    hi = mid
                else:
                    lo, zlo = mid, zm
            found.append(0.5 * (lo + hi))
        t_prev, z_prev = t, z
    gammas: list[float] = []
    mults: list[int] = []
    if values.r > 0:
        gammas.append(0.0)
        mults.append(values.r)
    gammas.extend(found)
    mults.extend([1] * len(found))
    return ZeroList(tuple(gammas), tuple(mults))


# ----------------------------------------------------------------------
# zero-counting fit N(t) ~ (alpha/pi) t (log t + c)
# ----------------------------------------------------------------------

def fit_zero_counting(ordinates: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares (alpha, c, max_residual) for N(t) = (alpha/pi) t (log t + c).

    Samples the counting function at each positive ordinate (N(gamma_k) = k)
    and solves the linear system in (alpha/pi, alpha c/pi).
    """
    ts = [float(g) for g in ordinates if g > 0.0]
    if len(ts) < 2:
        raise InputError("need at least two positive ordinates to fit")
    rows = np.array([[t * math.log(t), t] for t in ts])
    target = np.arange(1, len(ts) + 1, dtype=float)
    sol, *_ = np.linalg.lstsq(rows, target, rcond=None)
    alpha = math.pi * float(sol[0])
    c = float(sol[1]) / float(sol[0]) if sol[0] != 0 else math.inf
    fit = rows @ sol
    max_resid = float(np.max(np.abs(fit - target)))
    return alpha, c, max_resid


def theoretical_density(model: CurveModel) -> tuple[float, float]:
    """Prior (alpha, c) from the conductor when too few zeros are available."""
    return 1.0, math.log(math.sqrt(model.conductor) / _TWO_PI) - 1.0
