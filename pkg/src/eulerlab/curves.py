"""Elliptic-curve data model, reduction classification, and trace sweeps.

A curve is given by long Weierstrass coefficients (a1,a2,a3,a4,a6), assumed
globally minimal, with its conductor and root number supplied as validated
inputs. Good-prime traces come from the quadratic-character sum on the short
model y^2 = x^3 - 27 c4 x - 54 c6 (p >= 5) or direct enumeration (p in
{2,3}); bad-prime traces come from counting nonsingular points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .config import DEFAULT, Config
from .errors import InputError, RangeError, SingularCurveError, ValidationError
from .numerics import is_prime, quadratic_character_table, sieve_primes

KIND_GOOD = "good"
KIND_SPLIT = "mult_split"
KIND_NONSPLIT = "mult_nonsplit"
KIND_ADDITIVE = "additive"

_KIND_BY_CODE = (KIND_GOOD, KIND_SPLIT, KIND_NONSPLIT, KIND_ADDITIVE)
_CODE_BY_KIND = {k: i for i, k in enumerate(_KIND_BY_CODE)}


class WeierstrassInvariants(NamedTuple):
    b2: int
    b4: int
    b6: int
    b8: int
    c4: int
    c6: int
    disc: int


@dataclass(frozen=True)
class CurveModel:
    """Immutable curve input bundle: a-invariants, conductor, root number."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    root_number: int
    label: Optional[str] = None

    def __post_init__(self):
        if self.root_number not in (1, -1):
            raise ValidationError(f"root number must be +1 or -1, got {self.root_number}")
        if self.conductor < 1:
            raise ValidationError(f"conductor must be positive, got {self.conductor}")
        inv = invariants(self)  # raises SingularCurveError if disc == 0
        n = self.conductor
        for p in _prime_factors(n):
            if inv.disc % p != 0:
                raise ValidationError(
                    f"conductor prime {p} does not divide the discriminant {inv.disc}"
                )

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def is_bad(self, p: int) -> bool:
        return self.conductor % p == 0


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def invariants(model: CurveModel | Sequence[int]) -> WeierstrassInvariants:
    """Exact integer b-, c-invariants and discriminant of a long model."""
    if isinstance(model, CurveModel):
        a1, a2, a3, a4, a6 = model.ainvs
    else:
        a1, a2, a3, a4, a6 = (int(v) for v in model)
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    num = b2 * b6 - b4 * b4
    assert num % 4 == 0
    b8 = num // 4
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2 ** 3) + 36 * b2 * b4 - 216 * b6
    num = c4 ** 3 - c6 * c6
    assert num % 1728 == 0
    disc = num // 1728
    if disc == 0:
        raise SingularCurveError(f"singular curve: discriminant vanishes for a-invariants "
                                 f"({a1},{a2},{a3},{a4},{a6})")
    return WeierstrassInvariants(b2, b4, b6, b8, c4, c6, disc)


@dataclass(frozen=True)
class ReductionData:
    """Per-prime classification with trace a_p and point count N_p."""

    p: int
    kind: str
    ap: int
    np: int


# ----------------------------------------------------------------------
# point counting
# ----------------------------------------------------------------------

def count_points_enumeration(model: CurveModel, p: int) -> int:
    """#E(F_p) by brute enumeration of the long equation (oracle path).

    Counts all affine solutions of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
    by broadcasting over the full (x, y) grid, plus the point at infinity.
    Only valid at good primes (no singular point to exclude).
    """
    p = int(p)
    a1, a2, a3, a4, a6 = model.ainvs
    x = np.arange(p, dtype=np.int64)
    y = x[:, None]
    rhs = (((x * x) % p) * x + a2 * (x * x) + a4 * x + a6) % p
    lhs = (y * y + a1 * (y * x[None, :]) + a3 * y) % p
    return int((lhs == rhs[None, :]).sum()) + 1


def _g_poly_mod(model: CurveModel, p: int) -> np.ndarray:
    """g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 mod p for all residues x."""
    inv = invariants(model)
    x = np.arange(p, dtype=np.int64)
    x2 = (x * x) % p
    return (4 * ((x2 * x) % p) + inv.b2 * x2 + 2 * inv.b4 * x + inv.b6) % p


def ap_good(model: CurveModel, p: int, cfg: Config = DEFAULT) -> int:
    """Trace a_p = p + 1 - #E(F_p) at a prime of good reduction.

    For p >= 5 the count is the character sum over the short model
    y^2 = x^3 - 27 c4 x - 54 c6; for p in {2, 3} the long equation is
    enumerated directly.
    """
    p = int(p)
    if not is_prime(p):
        raise InputError(f"p = {p} is not prime")
    if model.is_bad(p):
        raise InputError(f"p = {p} divides the conductor {model.conductor}")
    if p < 5:
        return p + 1 - count_points_enumeration(model, p)
    inv = invariants(model)
    table = quadratic_character_table(p)
    x = np.arange(p, dtype=np.int64)
    a = (-27 * inv.c4) % p
    b = (-54 * inv.c6) % p
    f = (((x * x) % p) * x + a * x + b) % p
    ap = -int(table[f].sum(dtype=np.int64))
    assert ap * ap <= 4 * p, f"Hasse violation at p={p} (non-minimal model?)"
    return ap


def reduction_kind(model: CurveModel, p: int) -> ReductionData:
    """Classify a bad prime and return its a_p and nonsingular count N_p.

    Counts affine solutions, excludes the unique singular point, adds one
    for infinity; a_p = p - N_p, with split/nonsplit/additive read off from
    a_p in {+1, -1, 0}.
    """
    p = int(p)
    if not is_prime(p):
        raise InputError(f"p = {p} is not prime")
    if not model.is_bad(p):
        raise InputError(f"p = {p} does not divide the conductor {model.conductor}")
    if p == 2:
        a1, a2, a3, a4, a6 = model.ainvs
        npts = 1
        for x in range(2):
            for y in range(2):
                fx = (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % 2
                if fx:
                    continue
                dfdx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)) % 2
                dfdy = (2 * y + a1 * x + a3) % 2
                if dfdx == 0 and dfdy == 0:
                    continue  # the singular point
                npts += 1
    else:
        g = _g_poly_mod(model, p)
        table = quadratic_character_table(p)
        total = int(p + table[g].sum(dtype=np.int64))  # affine solutions of Y^2 = g(x)
        # singular points sit at multiple roots of g: g(x) = 0 and g'(x) = 0
        x = np.arange(p, dtype=np.int64)
        inv = invariants(model)
        gprime = (12 * ((x * x) % p) + 2 * inv.b2 * x + 2 * inv.b4) % p
        singular = int(((g == 0) & (gprime == 0)).sum())
        npts = 1 + total - singular
    ap = p - npts
    if ap == 1:
        kind = KIND_SPLIT
    elif ap == -1:
        kind = KIND_NONSPLIT
    elif ap == 0:
        kind = KIND_ADDITIVE
    else:
        raise ValidationError(
            f"bad-prime trace a_{p} = {ap} is outside {{-1,0,1}}; model non-minimal at {p}?"
        )
    return ReductionData(p, kind, ap, npts)


# ----------------------------------------------------------------------
# the table
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ApTable:
    """Reduction data for every prime <= x_max, in ascending-p column form."""

    curve: CurveModel
    x_max: int
    primes: np.ndarray   # int64 ascending
    kind_codes: np.ndarray  # int8, indexes _KIND_BY_CODE
    ap: np.ndarray       # int64
    npts: np.ndarray     # int64  (N_p)

    def __len__(self) -> int:
        return int(self.primes.shape[0])

    def __iter__(self) -> Iterator[ReductionData]:
        for i in range(len(self)):
            yield ReductionData(
                int(self.primes[i]),
                _KIND_BY_CODE[self.kind_codes[i]],
                int(self.ap[i]),
                int(self.npts[i]),
            )

    @property
    def good_mask(self) -> np.ndarray:
        return self.kind_codes == 0

    def require_cover(self, x: float, what: str = "operation") -> None:
        if self.x_max < math.floor(x):
            raise InputError(
                f"{what} needs primes up to {x}, but the table stops at {self.x_max}"
            )

    def prefix(self, x: float) -> "ApTable":
        """View of the table restricted to primes <= x (shares the arrays)."""
        self.require_cover(x)
        n = int(np.searchsorted(self.primes, math.floor(x), side="right"))
        return ApTable(self.curve, int(math.floor(x)), self.primes[:n],
                       self.kind_codes[:n], self.ap[:n], self.npts[:n])

    def ap_of(self, p: int) -> int:
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self) or self.primes[i] != p:
            raise InputError(f"prime {p} not covered by the table")
        return int(self.ap[i])

    def kind_of(self, p: int) -> str:
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self) or self.primes[i] != p:
            raise InputError(f"prime {p} not covered by the table")
        return _KIND_BY_CODE[self.kind_codes[i]]


def ap_table(
    model: CurveModel,
    x_max: int,
    workers: int | None = None,
    cfg: Config = DEFAULT,
) -> ApTable:
    """Complete reduction table for all p <= x_max.

    The good-prime sweep is partitioned into fixed-width blocks dispatched to
    a thread pool (the kernel releases the GIL); block results are merged in
    ascending order, so the output is bit-identical for any worker count.
    """
    x_max = int(x_max)
    if x_max < 2:
        raise InputError(f"x_max must be >= 2, got {x_max}")
    inv = invariants(model)
    pr = sieve_primes(x_max, cfg)
    primes = pr.primes
    ap = np.zeros(primes.shape[0], dtype=np.int64)
    kinds = np.zeros(primes.shape[0], dtype=np.int8)
    npts = np.zeros(primes.shape[0], dtype=np.int64)

    start = int(np.searchsorted(primes, 5))
    if start > 0:
        for i in range(start):
            p = int(primes[i])
            if not model.is_bad(p):
                ap[i] = p + 1 - count_points_enumeration(model, p)

    if start < primes.shape[0]:
        from ._kernels import ap_sweep_block

        nblocks = max(1, -(-(x_max - 4) // cfg.block_size))
        bounds = [int(np.searchsorted(primes, 5 + k * cfg.block_size)) for k in range(nblocks)]
        bounds.append(primes.shape[0])
        slices = [(bounds[k], bounds[k + 1]) for k in range(nblocks) if bounds[k] < bounds[k + 1]]
        nworkers = max(1, int(workers) if workers else 1)
        if nworkers == 1 or len(slices) == 1:
            for lo, hi in slices:
                ap[lo:hi] = ap_sweep_block(primes[lo:hi], inv.c4, inv.c6)
        else:
            with ThreadPoolExecutor(max_workers=nworkers) as pool:
                futs = [(lo, hi, pool.submit(ap_sweep_block, primes[lo:hi], inv.c4, inv.c6))
                        for lo, hi in slices]
                for lo, hi, fut in futs:
                    ap[lo:hi] = fut.result()

    good = np.ones(primes.shape[0], dtype=bool)
    for p in _prime_factors(model.conductor):
        if p <= x_max:
            i = int(np.searchsorted(primes, p))
            rd = reduction_kind(model, p)
            ap[i] = rd.ap
            kinds[i] = _CODE_BY_KIND[rd.kind]
            npts[i] = rd.np
            good[i] = False

    npts[good] = primes[good] + 1 - ap[good]
    hasse_bad = np.flatnonzero(good & (ap * ap > 4 * primes))
    if hasse_bad.size:
        p = int(primes[hasse_bad[0]])
        raise ValidationError(f"Hasse bound violated at p = {p}; model non-minimal?")
    return ApTable(model, x_max, primes, kinds, ap, npts)


def frobenius_power_sum(ap: int, p: int, k: int, cfg: Config = DEFAULT) -> int:
    """t_k = alpha_p^k + beta_p^k via t_k = a_p t_{k-1} - p t_{k-2} (exact ints)."""
    ap = int(ap)
    p = int(p)
    k = int(k)
    if k < 0:
        raise InputError(f"k must be >= 0, got {k}")
    if k > cfg.power_sum_k_cap:
        raise RangeError(f"k = {k} exceeds the power-sum guard {cfg.power_sum_k_cap}")
    if ap * ap > 4 * p:
        raise InputError(f"|a_p| <= 2 sqrt(p) violated: a_p={ap}, p={p}")
    if k == 0:
        return 2
    t_prev, t_cur = 2, ap
    for _ in range(2, k + 1):
        t_prev, t_cur = t_cur, ap * t_cur - p * t_prev
    return t_cur
