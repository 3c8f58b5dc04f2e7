"""Frozen numerical constants and calibrated thresholds.

Every tolerance used by an experiment or an acceptance-style check lives
here, so a run is fully determined by (inputs, Config). Values marked
"calibrated" were measured once on the bundled curves and then frozen;
they are engineering constants, not theorems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class Config:
    # -- series / special functions -------------------------------------
    series_rel_tol: float = 1e-16      # term/sum cutoff for power series
    gamma_cf_tol: float = 1e-16        # Lentz continued-fraction stop
    gamma_cf_maxiter: int = 20000
    li_series_switch: float = 5.0      # |w| above which Li(e^w) uses Gamma(0,-w)

    # -- adaptive quadrature ---------------------------------------------
    quad_tol: float = 1e-12
    quad_abs_tol: float = 1e-15
    quad_max_intervals: int = 4000

    # -- approximate functional equation ----------------------------------
    afe_cutoff_constant: float = 3.0   # C_cut in n_max >= (sqrt(N)/2pi) log(1/eps) C_cut
    afe_eps: float = 1e-15             # relative truncation target
    afe_noise_guard: float = 0.25      # raise PrecisionError when err > guard * |Z| envelope

    # -- derivatives and rank detection ----------------------------------
    deriv_step: float = 1e-2           # h for central differences at s=1
    logderiv_step: float = 1e-4        # h for L'/L central difference
    rank_threshold: float = 1e-6       # |L^(k)(1)| above this counts as nonzero
    near_zero_floor: float = 1e-10     # |L| below this refuses a log-derivative

    # -- zero finding ------------------------------------------------------
    zero_scan_step: float = 0.05
    zero_bisect_tol: float = 1e-9
    zero_t_max_cap: float = 50.0

    # -- prime sweeps -------------------------------------------------------
    sieve_limit_cap: int = 2**40
    block_size: int = 65536            # numeric width of one parallel sweep block
    power_sum_k_cap: int = 200

    # -- explicit-formula / Theorem-style checks --------------------------
    trivial_tail_target: float = 1e-18
    err_bound_kappa: float = 10.0      # calibrated envelope constant for log x / x^(1/6)
    explicit_residual_threshold: float = 0.05   # calibrated, strip regime
    strong_regime_threshold: float = 1e-3       # calibrated, s = 2.5 regime

    # -- experiments ----------------------------------------------------------
    checkpoint_count: int = 24
    checkpoint_lo: float = 1e2
    checkpoint_hi: float = 1e6
    mertens_stability: float = 0.05
    u1_tolerance: float = 0.05
    bsd_deviation_ceiling: float = 0.25
    zero_fit_min_zeros: int = 10
    zero_fit_envelope: float = 3.0     # max residual <= envelope * log(t_max), calibrated
    excursion_lambda: float = 1.0
    psi_envelope_constant: float = 10.0

    def with_overrides(self, **kwargs) -> "Config":
        return replace(self, **kwargs)


DEFAULT = Config()


def default_checkpoints(cfg: Config = DEFAULT, x_max: float | None = None) -> list[float]:
    """Logarithmically spaced sweep checkpoints, clipped to x_max if given."""
    hi = cfg.checkpoint_hi if x_max is None else min(cfg.checkpoint_hi, float(x_max))
    lo = min(cfg.checkpoint_lo, hi)
    n = cfg.checkpoint_count
    if hi <= lo:
        return [lo]
    step = (math.log(hi) - math.log(lo)) / (n - 1)
    xs = [math.exp(math.log(lo) + k * step) for k in range(n)]
    xs[0], xs[-1] = lo, hi  # exact endpoints, clear of rounding drift
    return xs
