"""Partial Euler products, explicit-formula sums, and their decompositions.

Everything here is a finite sum over primes or prime powers p^k <= x, or
over critical-line zero ordinates up to a height cutoff, accumulated with
compensated summation. Prime-power sums stop at k = floor(log x / log 2)
exactly; larger k contribute nothing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .config import DEFAULT, Config
from .curves import ApTable, CurveModel, frobenius_power_sum
from .errors import DomainError, InputError
from .lfunction import (
    DirichletCoeffs,
    LSpecialValues,
    ZeroList,
    fit_zero_counting,
    l_value,
    log_derivative,
    theoretical_density,
)
from .numerics import CompensatedSum, adaptive_quad, fsum, pv_li_exp


# ----------------------------------------------------------------------
# prime-power iteration
# ----------------------------------------------------------------------

def iter_prime_powers(table: ApTable, x: float) -> Iterator[tuple[int, int, int, int, bool]]:
    """(p, k, p^k, a_p, is_bad) over all prime powers p^k <= x, p ascending."""
    table.require_cover(x)
    primes = table.primes
    n = int(np.searchsorted(primes, math.floor(x), side="right"))
    for i in range(n):
        p = int(primes[i])
        ap = int(table.ap[i])
        bad = bool(table.kind_codes[i] != 0)
        pk = p
        k = 1
        while pk <= x:
            yield p, k, pk, ap, bad
            pk *= p
            k += 1


def _b_coefficient(p: int, k: int, ap: int, bad: bool) -> float:
    """b_{p^k} / log p: the power sum alpha^k + beta^k (good) or a_p^k (bad)."""
    if bad:
        return float(ap ** k)
    return float(frobenius_power_sum(ap, p, k))


def bn(model: CurveModel, table: ApTable, n: int) -> float:
    """Dirichlet coefficient b_n of -L'/L: nonzero only at prime powers."""
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if n == 1:
        return 0.0
    table.require_cover(n, "bn")
    # factor n as p^k or bail
    m = n
    p = None
    for q in (2, 3, 5, 7, 11, 13):
        if m % q == 0:
            p = q
            break
    if p is None:
        # smallest prime factor via the table
        idx = np.searchsorted(table.primes, int(math.isqrt(n)), side="right")
        for i in range(int(idx)):
            q = int(table.primes[i])
            if m % q == 0:
                p = q
                break
        if p is None:
            p = n  # n itself prime or 1
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        return 0.0
    if not _is_prime_in_table(table, p):
        return 0.0
    ap = table.ap_of(p)
    bad = table.kind_of(p) != "good"
    return _b_coefficient(p, k, ap, bad) * math.log(p)


def _is_prime_in_table(table: ApTable, p: int) -> bool:
    i = int(np.searchsorted(table.primes, p))
    return i < len(table) and int(table.primes[i]) == p


def bn_partial_sum(model: CurveModel, table: ApTable, x: float, s: float) -> float:
    """sum_{n <= x} b_n / n^s, with the last term halved when x is an integer."""
    x = float(x)
    if x < 1.0:
        raise InputError(f"x must be >= 1, got {x}")
    if x < 2.0:
        return 0.0
    terms = []
    x_int = x == math.floor(x)
    for p, k, pk, ap, bad in iter_prime_powers(table, x):
        t = _b_coefficient(p, k, ap, bad) * math.log(p) / float(pk) ** s
        if x_int and pk == int(x):
            t *= 0.5
        terms.append(t)
    return fsum(terms)


# ----------------------------------------------------------------------
# the partial Euler product and its s = 1 specialisation
# ----------------------------------------------------------------------

def _log_factors(table: ApTable, x: float, s: float) -> np.ndarray:
    """-log of each Euler factor for p <= x at real s, ascending p."""
    pre = table.prefix(x)
    p = pre.primes.astype(np.float64)
    ap = pre.ap.astype(np.float64)
    good = pre.good_mask
    ps = p ** (-s)
    factor = np.where(good, 1.0 - ap * ps + p * ps * ps, 1.0 - ap * ps)
    if np.any(factor <= 0.0):
        i = int(np.argmax(factor <= 0.0))
        raise DomainError(f"Euler factor vanishes at p = {int(pre.primes[i])}, s = {s}")
    return -np.log(factor)


def log_partial_euler_product(model: CurveModel, table: ApTable, x: float, s: float) -> float:
    """log of prod_{p <= x} (Euler factor at s)^(-1), compensated, ascending p.

    Factors are (1 - a_p p^-s + p^(1-2s))^(-1) at good p and
    (1 - a_p p^-s)^(-1) at bad p; s >= 1 keeps every factor positive.
    """
    x = float(x)
    s = float(s)
    if s < 1.0:
        raise InputError(f"s must be >= 1, got {s}")
    if x < 2.0:
        return 0.0
    return fsum(_log_factors(table, x, s))


def np_product_log(model: CurveModel, table: ApTable, x: float) -> float:
    """log prod_{p <= x} N_p / p, exactly -log_partial_euler_product(x, 1)."""
    x = float(x)
    if x < 2.0:
        return 0.0
    return -log_partial_euler_product(model, table, x, 1.0)


def cn_partial_sum(model: CurveModel, table: ApTable, x: float) -> float:
    """sum_{n <= x} c_n with c_{p^k} = -(alpha^k + beta^k)/(k p^k), bad: -a_p^k/(k p^k)."""
    x = float(x)
    if x < 1.0:
        raise InputError(f"x must be >= 1, got {x}")
    if x < 2.0:
        return 0.0
    terms = []
    for p, k, pk, ap, bad in iter_prime_powers(table, x):
        terms.append(-_b_coefficient(p, k, ap, bad) / (k * float(pk)))
    return fsum(terms)


def u_term(model: CurveModel, table: ApTable, x: float, s: float) -> float:
    """U_s(x) = sum over sqrt(x) < p <= x, p good, of (a_p^2 - 2p) / (2 p^(2s))."""
    x = float(x)
    if x < 2.0:
        return 0.0
    table.require_cover(x, "u_term")
    pre = table.prefix(x)
    p = pre.primes.astype(np.float64)
    mask = pre.good_mask & (p > math.sqrt(x))
    pm = p[mask]
    am = pre.ap[mask].astype(np.float64)
    return fsum((am * am - 2.0 * pm) / (2.0 * pm ** (2.0 * s)))


def mertens_prime_sum(model: CurveModel, table: ApTable, x: float) -> float:
    """sum_{p <= x, p good} (a_p^2 - 2p) / (2 p^2) (the Mertens-type sum)."""
    x = float(x)
    if x < 2.0:
        return 0.0
    pre = table.prefix(x)
    p = pre.primes[pre.good_mask].astype(np.float64)
    a = pre.ap[pre.good_mask].astype(np.float64)
    return fsum((a * a - 2.0 * p) / (2.0 * p * p))


# ----------------------------------------------------------------------
# psi_E
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PsiPoint:
    """psi_E at a point, with the ratio against x (log log x)^2 when defined."""

    x: float
    psi: float
    bound_ratio: Optional[float]


_E_TO_E = math.exp(math.e)  # bound_ratio defined only above e^e


def psi_ratio(x: float, psi: float) -> Optional[float]:
    if x <= _E_TO_E:
        return None
    return abs(psi) / (x * math.log(math.log(x)) ** 2)


def psi_e(model: CurveModel, table: ApTable, x: float) -> PsiPoint:
    """psi_E(x) = sum_{p^k <= x, p good} (alpha_p^k + beta_p^k) log p."""
    x = float(x)
    if x < 1.0:
        raise InputError(f"x must be >= 1, got {x}")
    if x < 2.0:
        return PsiPoint(x, 0.0, None)
    terms = []
    for p, k, pk, ap, bad in iter_prime_powers(table, x):
        if bad:
            continue
        terms.append(float(frobenius_power_sum(ap, p, k)) * math.log(p))
    psi = fsum(terms)
    return PsiPoint(x, psi, psi_ratio(x, psi))


def psi_jump_points(model: CurveModel, table: ApTable, x_max: float):
    """Ascending (x, psi(x)) at every jump p^k <= x_max (good p only)."""
    x_max = float(x_max)
    table.require_cover(x_max, "psi_jump_points")
    jumps: list[tuple[int, float]] = []
    for p, k, pk, ap, bad in iter_prime_powers(table, x_max):
        if bad:
            continue
        jumps.append((pk, float(frobenius_power_sum(ap, p, k)) * math.log(p)))
    jumps.sort()
    acc = CompensatedSum()
    out_x = np.empty(len(jumps))
    out_psi = np.empty(len(jumps))
    for i, (pk, term) in enumerate(jumps):
        acc.add(term)
        out_x[i] = pk
        out_psi[i] = acc.value
    return out_x, out_psi


# ----------------------------------------------------------------------
# trivial-zero tail
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrivialTail:
    value: float
    tail_bound: float


def trivial_zero_tail(x: float, s: float, k_terms: int | None = None,
                      cfg: Config = DEFAULT) -> TrivialTail:
    """sum_{k=0}^{K} x^(-k-s)/(k+s) plus the geometric bound on the remainder.

    With K omitted, terms are taken until the bound drops below the
    configured target.
    """
    x = float(x)
    s = float(s)
    if x <= 1.0:
        raise InputError(f"x must be > 1, got {x}")

    def bound_after(kk: int) -> float:
        return x ** (-(kk + 1) - s) / ((kk + 1 + s) * (1.0 - 1.0 / x))

    acc = CompensatedSum()
    if k_terms is not None:
        for k in range(int(k_terms) + 1):
            acc.add(x ** (-k - s) / (k + s))
        return TrivialTail(acc.value, bound_after(int(k_terms)))
    k = 0
    while True:
        acc.add(x ** (-k - s) / (k + s))
        if bound_after(k) < cfg.trivial_tail_target or k > 400:
            return TrivialTail(acc.value, bound_after(k))
        k += 1


# ----------------------------------------------------------------------
# zero sums
# ----------------------------------------------------------------------

def zero_pole_sum(zeros: ZeroList, x: float, s: float, t_cut: float) -> float:
    """sum over 0 < |gamma| <= T of x^(rho-s)/(rho-s), conjugate pairs combined.

    Each pair contributes 2 Re(x^(1-s) e^(i gamma log x) / (1-s+i gamma));
    the result is exactly real.
    """
    lx = math.log(x)
    xs = x ** (1.0 - s)
    acc = CompensatedSum()
    for g, m in zeros.positive(t_cut):
        z = cmath.exp(complex(0.0, g * lx)) / complex(1.0 - s, g)
        acc.add(2.0 * m * xs * z.real)
    return acc.value


@dataclass(frozen=True)
class RTermResult:
    """Truncated R_s(x) with a density-extrapolated (non-rigorous) tail estimate."""

    value: float
    tail_estimate: float
    height: float
    zeros_used: int
    empty: bool


def r_term(
    model: CurveModel,
    zeros: ZeroList,
    x: float,
    s: float,
    t_cut: float,
    cfg: Config = DEFAULT,
) -> RTermResult:
    """R_s(x) truncated at |gamma| <= T: the boundary sum plus the ray integrals.

    R_s(x) = (1/log x) sum x^(rho-s)/(rho-s)
           + (1/log x) sum int_s^inf x^(rho-z)/(rho-z)^2 dz,
    conjugate pairs combined so the value is real; gamma = 0 is excluded.
    The tail estimate integrates x^(1-s)/gamma^2 against the fitted zero
    density beyond T and is a heuristic, not a bound.
    """
    x = float(x)
    s = float(s)
    if x <= 1.0:
        raise InputError(f"x must be > 1, got {x}")
    lx = math.log(x)
    pairs = zeros.positive(t_cut)
    if not pairs:
        return RTermResult(0.0, _r_tail_estimate(model, zeros, x, s, t_cut), t_cut, 0, True)
    boundary = zero_pole_sum(zeros, x, s, t_cut) / lx
    # the ray integrals: u = z - s >= 0, integrand x^(1-s-u) e^(i gamma log x) / (1-s-u+i gamma)^2
    u_cut = max(0.0, 1.0 - s) + 40.0 / lx
    acc = CompensatedSum(boundary)
    for g, m in pairs:

        def integrand(u: float, _g: float = g) -> complex:
            den = complex(1.0 - s - u, _g)
            return math.exp((1.0 - s - u) * lx) * cmath.exp(complex(0.0, _g * lx)) / (den * den)

        q = adaptive_quad(integrand, 0.0, u_cut, tol=cfg.quad_tol, cfg=cfg)
        acc.add(2.0 * m * q.value.real / lx)
    n_used = sum(m for _, m in pairs)
    return RTermResult(acc.value, _r_tail_estimate(model, zeros, x, s, t_cut), t_cut, n_used, False)


def _r_tail_estimate(model: CurveModel, zeros: ZeroList, x: float, s: float,
                     t_cut: float) -> float:
    """Heuristic |R_s tail| ~ (2/log x) x^(1-s) (alpha/pi) (log T + c + 2) / T."""
    positive = [g for g, _ in zeros.positive()]
    if len(positive) >= 5:
        try:
            alpha, c, _ = fit_zero_counting(positive)
        except InputError:
            alpha, c = theoretical_density(model)
    else:
        alpha, c = theoretical_density(model)
    t = max(t_cut, 1.0)
    density_mass = (alpha / math.pi) * (math.log(t) + c + 1.0 + 1.0) / t
    return 2.0 / math.log(x) * x ** (1.0 - s) * max(density_mass, 0.0)


# ----------------------------------------------------------------------
# explicit formula (finite check)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitFormulaCheck:
    """Both sides of the truncated explicit formula at (x, s), with pieces."""

    x: float
    s: float
    t_cut: float
    lhs: float            # sum_{n<=x} b_n / n^s
    pole_term: float      # -r x^(1-s)/(1-s)
    log_deriv: float      # -L'/L(E,s)
    zero_sum: float       # -sum_{0<|gamma|<=T} x^(rho-s)/(rho-s)
    trivial: float        # +sum_k x^(-k-s)/(k+s)
    residual: float

    @property
    def rhs(self) -> float:
        return self.pole_term + self.log_deriv + self.zero_sum + self.trivial


def explicit_formula_residual(
    model: CurveModel,
    table: ApTable,
    zeros: ZeroList,
    x: float,
    s: float,
    t_cut: float,
    coeffs: DirichletCoeffs,
    cfg: Config = DEFAULT,
) -> ExplicitFormulaCheck:
    """Residual of the truncated explicit formula at real s in (1, 3.5].

    lhs = sum_{n<=x} b_n/n^s; rhs = -r x^(1-s)/(1-s) - L'/L(E,s)
    - sum_{0<|gamma|<=T} x^(rho-s)/(rho-s) + trivial tail. Non-integer x
    sidesteps the half-weight edge; integer x applies the half rule.
    """
    x = float(x)
    s = float(s)
    lhs = bn_partial_sum(model, table, x, s)
    r = zeros.r
    pole = -r * x ** (1.0 - s) / (1.0 - s)
    ld = -log_derivative(model, s, coeffs, cfg)
    zsum = -zero_pole_sum(zeros, x, s, t_cut)
    triv = trivial_zero_tail(x, s, cfg=cfg).value
    residual = lhs - (pole + ld + zsum + triv)
    return ExplicitFormulaCheck(x, s, t_cut, lhs, pole, ld, zsum, triv, residual)


# ----------------------------------------------------------------------
# the product asymptotic decomposition
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TermBreakdown:
    """Right-hand-side pieces of the product asymptotic at (x, s).

    total = log_l + li_term + r_term + u_term, where li_term = -r Li(x^(1-s))
    and r_term = -R_s(x) truncated at the stated height. err_bound is the
    kappa log x / x^(1/6) envelope; r_tail is the heuristic zero-sum tail.
    """

    x: float
    s: float
    log_l: float
    li_term: float
    r_term: float
    u_term: float
    err_bound: float
    r_tail: float

    @property
    def total(self) -> float:
        return self.log_l + self.li_term + self.r_term + self.u_term


def theorem_a_rhs(
    model: CurveModel,
    table: ApTable,
    coeffs: DirichletCoeffs,
    values: LSpecialValues,
    zeros: ZeroList,
    x: float,
    s: float,
    t_cut: float,
    cfg: Config = DEFAULT,
) -> TermBreakdown:
    """Decomposed right-hand side log L - r Li(x^(1-s)) - R_s(x) + U_s(x)."""
    x = float(x)
    s = float(s)
    if not (1.0 < s <= 1.5):
        raise InputError(f"s must lie in (1, 1.5], got {s}")
    if x < 2.0:
        raise InputError(f"x must be >= 2, got {x}")
    lval = l_value(model, s, coeffs, cfg=cfg).real
    if lval <= 0.0:
        raise DomainError(f"L(E,{s}) = {lval} <= 0 inside the convergence region")
    log_l = math.log(lval)
    r = values.r
    li = -r * pv_li_exp((1.0 - s) * math.log(x), cfg) if r else 0.0
    rt = r_term(model, zeros, x, s, t_cut, cfg)
    ut = u_term(model, table, x, s)
    err = cfg.err_bound_kappa * math.log(x) / x ** (1.0 / 6.0)
    return TermBreakdown(x, s, log_l, li, -rt.value, ut, err, rt.tail_estimate)


# ----------------------------------------------------------------------
# derivative identity material
# ----------------------------------------------------------------------

def log_euler_derivative_rhs(model: CurveModel, table: ApTable, x: float, s: float) -> float:
    """The exact negative derivative of the log partial product:

    bn_partial_sum(x, s) + sum_{sqrt x < p <= x, good} (a_p^2-2p) log p / p^(2s)
      + sum_{k >= 3} sum_{x^(1/k) < p <= x, good} t_k log p / p^(ks)
      + sum_{k >= 2} sum_{x^(1/k) < p <= x, bad} a_p^k log p / p^(ks),

    which equals -(d/ds) log_partial_euler_product(x, s).
    """
    x = float(x)
    s = float(s)
    terms = [bn_partial_sum(model, table, x, s)]
    pre = table.prefix(x)
    for i in range(len(pre)):
        p = int(pre.primes[i])
        ap = int(pre.ap[i])
        good = bool(pre.kind_codes[i] == 0)
        lp = math.log(p)
        if good and p > math.sqrt(x):
            terms.append((ap * ap - 2.0 * p) * lp / float(p) ** (2.0 * s))
        # completion terms p^k > x; |t_k| <= 2 p^(k/2) makes them geometric in k
        k = 3 if good else 2
        while p ** k <= x:
            k += 1
        while True:
            if good:
                coeff = float(frobenius_power_sum(ap, p, k))
                env = 2.0 * lp * float(p) ** (-k * (s - 0.5))
            else:
                coeff = float(ap ** k)
                env = lp * float(p) ** (-k * s)
            terms.append(coeff * lp / float(p) ** (k * s))
            if env < 1e-19:
                break
            k += 1
    return fsum(terms)
