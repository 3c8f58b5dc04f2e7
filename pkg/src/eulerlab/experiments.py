"""Desk-scale verification experiments.

Each experiment is a pure pipeline over an immutable reduction table and
returns a small result object that the interface module serialises. The
asymptotics under test hold as x -> infinity (off exceptional sets), so
every pass/fail threshold here is a calibrated constant from Config, not
a theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT, EULER_GAMMA, Config, default_checkpoints
from .curves import ApTable, CurveModel
from .errors import InputError
from .eulerprod import (
    cn_partial_sum,
    log_partial_euler_product,
    mertens_prime_sum,
    np_product_log,
    psi_jump_points,
    psi_ratio,
    u_term,
)
from .lfunction import LSpecialValues, ZeroList, fit_zero_counting


# ----------------------------------------------------------------------
# the product asymptotic (log scale)
# ----------------------------------------------------------------------

def bsd_constant(values: LSpecialValues) -> float:
    """C = r! / L^(r)(E,1) * sqrt(2) e^(r gamma), gamma Euler's constant."""
    r = values.r
    lead = values.derivs[r]
    if lead == 0.0:
        raise InputError("leading derivative vanishes; rank data inconsistent")
    return math.factorial(r) / lead * math.sqrt(2.0) * math.exp(r * EULER_GAMMA)


@dataclass(frozen=True)
class ConvergenceRow:
    x: float
    observed: float      # log prod_{p<=x} N_p/p
    predicted: float     # log C + r log log x
    deviation: float     # observed - predicted
    s_path_gap: float    # strip product at s = 1+1/x against its -observed limit


@dataclass(frozen=True)
class ConvergenceTable:
    curve_label: str
    rank: int
    log_c: float
    rows: tuple[ConvergenceRow, ...]

    def deviations(self) -> list[float]:
        return [row.deviation for row in self.rows]

    def dyadic_median_deviations(self) -> list[tuple[float, float]]:
        """(block upper edge, median |deviation|) over dyadic x blocks."""
        if not self.rows:
            return []
        lo = self.rows[0].x
        out = []
        block: list[float] = []
        edge = lo * 2.0
        for row in self.rows:
            while row.x > edge:
                if block:
                    out.append((edge, float(np.median(np.abs(block)))))
                    block = []
                edge *= 2.0
            block.append(row.deviation)
        if block:
            out.append((edge, float(np.median(np.abs(block)))))
        return out


def bsd_product_scan(
    model: CurveModel,
    table: ApTable,
    values: LSpecialValues,
    checkpoints: Optional[Sequence[float]] = None,
    rank_override: Optional[int] = None,
    cfg: Config = DEFAULT,
) -> ConvergenceTable:
    """Compare log prod N_p/p against log C + r log log x along checkpoints.

    rank_override substitutes r' for the detected rank in the prediction
    (including the constant), for the rank-selectivity check.
    """
    if checkpoints is None:
        checkpoints = default_checkpoints(cfg, table.x_max)
    checkpoints = sorted(float(x) for x in checkpoints)
    if len(checkpoints) < 3:
        raise InputError("need at least 3 checkpoints")
    if rank_override is None:
        r = values.r
        log_c = math.log(abs(bsd_constant(values)))
    else:
        r = int(rank_override)
        if r < 0 or r >= len(values.derivs):
            raise InputError(f"rank override {r} outside derivative range")
        lead = values.derivs[r]
        if abs(lead) < 1e-12:
            # wrong-rank constant from a vanishing derivative: clamp, keep finite
            lead = math.copysign(1e-12, lead if lead else 1.0)
        log_c = math.log(abs(math.factorial(r) / lead * math.sqrt(2.0) * math.exp(r * EULER_GAMMA)))
    rows = []
    for x in checkpoints:
        obs = np_product_log(model, table, x)
        pred = log_c + r * math.log(math.log(x))
        # the strip product at s = 1 + 1/x tends to log prod p/N_p = -obs
        strip = log_partial_euler_product(model, table, x, 1.0 + 1.0 / x)
        rows.append(ConvergenceRow(x, obs, pred, obs - pred, strip + obs))
    return ConvergenceTable(model.label or "curve", r, log_c, tuple(rows))


# ----------------------------------------------------------------------
# Mertens-type constant and the U_1 limit
# ----------------------------------------------------------------------

def mertens_b_estimate(model: CurveModel, table: ApTable, x: float) -> float:
    """B-hat(x) = sum_{p<=x, good} (a_p^2 - 2p)/(2p^2) + (1/2) log log x."""
    x = float(x)
    if x < 3.0:
        raise InputError(f"x must be >= 3, got {x}")
    return mertens_prime_sum(model, table, x) + 0.5 * math.log(math.log(x))


U1_LIMIT = math.log(1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class U1Row:
    x: float
    u1: float
    deviation: float  # u1 - log(1/sqrt 2)


def u1_limit_check(
    model: CurveModel,
    table: ApTable,
    checkpoints: Sequence[float],
    cfg: Config = DEFAULT,
) -> list[U1Row]:
    """U_1(x) against its limit log(1/sqrt 2) along ascending checkpoints."""
    xs = [float(x) for x in checkpoints]
    if xs != sorted(xs):
        raise InputError("checkpoints must be ascending")
    out = []
    for x in xs:
        u1 = u_term(model, table, x, 1.0)
        out.append(U1Row(x, u1, u1 - U1_LIMIT))
    return out


# ----------------------------------------------------------------------
# psi_E excursion monitor
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExcursionReport:
    """Intervals where |psi_E| exceeds lambda * x (log log x)^2, and their size."""

    threshold: float
    intervals: tuple[tuple[float, float], ...]
    total_log_measure: float
    x_max: float
    max_ratio: float


def _envelope(x: float) -> float:
    return x * math.log(math.log(x)) ** 2


def psi_excursion_monitor(
    model: CurveModel,
    table: ApTable,
    x_max: float,
    threshold: float | None = None,
    cfg: Config = DEFAULT,
) -> ExcursionReport:
    """Scan psi_E at every jump point and collect super-threshold intervals.

    psi_E is a right-continuous step function, so each excursion starts at a
    jump x_i with |psi| > lambda * envelope(x_i) and ends where the rising
    envelope crosses |psi| again (or at the next jump, whichever is first).
    The total logarithmic measure is sum log(hi/lo).
    """
    lam = cfg.excursion_lambda if threshold is None else float(threshold)
    x_max = float(x_max)
    if x_max < 100.0:
        raise InputError(f"x_max must be >= 100, got {x_max}")
    if not lam > 0.0:
        raise InputError(f"threshold must be positive, got {lam}")
    xs, psis = psi_jump_points(model, table, x_max)
    intervals: list[tuple[float, float]] = []
    max_ratio = 0.0
    start = float(np.searchsorted(xs, math.ceil(math.exp(math.e))))
    i0 = int(start)
    for i in range(i0, len(xs)):
        x = float(xs[i])
        psi = abs(float(psis[i]))
        ratio = psi_ratio(x, psis[i])
        if ratio is None:
            continue
        max_ratio = max(max_ratio, ratio)
        if math.isinf(lam) or ratio <= lam:
            continue
        x_next = float(xs[i + 1]) if i + 1 < len(xs) else x_max
        x_next = min(x_next, x_max)
        # envelope is increasing; find where lam * envelope == psi inside (x, x_next]
        if lam * _envelope(x_next) <= psi:
            hi = x_next
        else:
            lo_b, hi_b = x, x_next
            for _ in range(80):
                mid = 0.5 * (lo_b + hi_b)
                if lam * _envelope(mid) <= psi:
                    lo_b = mid
                else:
                    hi_b = mid
            hi = 0.5 * (lo_b + hi_b)
        if intervals and intervals[-1][1] >= x:
            intervals[-1] = (intervals[-1][0], max(intervals[-1][1], hi))
        else:
            intervals.append((x, hi))
    measure = sum(math.log(hi / lo) for lo, hi in intervals if hi > lo)
    return ExcursionReport(lam, tuple(intervals), measure, x_max, max_ratio)


# ----------------------------------------------------------------------
# zero-count fit
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroFit:
    alpha: float
    c: float
    max_residual: float
    zeros_used: int


def zero_count_fit(zeros: ZeroList, t_max: float, cfg: Config = DEFAULT) -> ZeroFit:
    """Fit N(t) = (alpha/pi) t (log t + c) to the counting function of `zeros`."""
    ts = [g for g, m in zeros.positive(t_max) for _ in range(m)]
    if len(ts) < cfg.zero_fit_min_zeros:
        raise InputError(
            f"need at least {cfg.zero_fit_min_zeros} zeros below {t_max}, have {len(ts)}"
        )
    alpha, c, max_resid = fit_zero_counting(ts)
    return ZeroFit(alpha, c, max_resid, len(ts))


# ----------------------------------------------------------------------
# Goldfeld-direction drift diagnostic
# ----------------------------------------------------------------------

def cn_drift(
    model: CurveModel,
    table: ApTable,
    rank: int,
    checkpoints: Sequence[float],
) -> list[tuple[float, float]]:
    """(x, cn_partial_sum(x) - rank * log log x) along checkpoints."""
    return [
        (float(x), cn_partial_sum(model, table, x) - rank * math.log(math.log(x)))
        for x in checkpoints
    ]
