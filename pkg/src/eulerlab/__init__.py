"""eulerlab: desk-scale numerics for partial Euler products of L(E,s).

Computes reduction data and Frobenius traces of elliptic curves over Q,
evaluates L(E,s) in the critical strip through an incomplete-gamma
expansion, assembles explicit-formula and partial-product decompositions,
and runs convergence experiments for the product asymptotic
prod_{p<=x} N_p/p ~ C (log x)^r with C = r!/L^(r)(E,1) * sqrt(2) e^(r gamma).
"""

from .config import DEFAULT, Config
from .curves import (
    ApTable,
    CurveModel,
    ReductionData,
    ap_good,
    ap_table,
    frobenius_power_sum,
    invariants,
    reduction_kind,
)
from .dataset import CurveRecord, load_dataset
from .errors import EulerLabError
from .eulerprod import (
    PsiPoint,
    TermBreakdown,
    bn,
    bn_partial_sum,
    cn_partial_sum,
    explicit_formula_residual,
    log_partial_euler_product,
    np_product_log,
    psi_e,
    r_term,
    theorem_a_rhs,
    trivial_zero_tail,
    u_term,
)
from .experiments import (
    ConvergenceTable,
    ExcursionReport,
    bsd_product_scan,
    mertens_b_estimate,
    psi_excursion_monitor,
    u1_limit_check,
    zero_count_fit,
)
from .lfunction import (
    DirichletCoeffs,
    LSpecialValues,
    ZeroList,
    dirichlet_coeffs,
    find_zeros,
    l_derivatives_at_1,
    l_value,
    lambda_afe,
    log_derivative,
)
from .numerics import (
    PrimeRange,
    adaptive_quad,
    pv_li_exp,
    quadratic_character,
    sieve_primes,
    upper_incomplete_gamma,
)

__version__ = "0.1.0"
