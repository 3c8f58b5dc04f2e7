"""Prime-power sums, partial products, zero sums, and the two formulas."""

import math

import pytest

from eulerlab.errors import InputError
from eulerlab.eulerprod import (
    bn,
    bn_partial_sum,
    cn_partial_sum,
    explicit_formula_residual,
    iter_prime_powers,
    log_euler_derivative_rhs,
    log_partial_euler_product,
    mertens_prime_sum,
    np_product_log,
    psi_e,
    psi_jump_points,
    r_term,
    theorem_a_rhs,
    trivial_zero_tail,
    u_term,
    zero_pole_sum,
)
from eulerlab.lfunction import ZeroList

LOG2 = math.log(2.0)


# ----------------------------------------------------------------------
# b_n
# ----------------------------------------------------------------------

def test_bn_nonprime_power_vanishes(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert bn(m, t, 1) == 0.0
    assert bn(m, t, 12) == 0.0
    assert bn(m, t, 30) == 0.0


def test_bn_at_four_vanishes_for_37a1(models, tables_1e5):
    # t_2 = a_2^2 - 2p = 4 - 4 = 0 at p = 2
    assert bn(models["37a1"], tables_1e5["37a1"], 4) == 0.0


def test_bn_prime_values(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert bn(m, t, 2) == pytest.approx(-2 * LOG2)
    assert bn(m, t, 37) == pytest.approx(-math.log(37.0))  # bad prime, a_p^k log p
    assert bn(m, t, 37 * 37) == pytest.approx(math.log(37.0))


def test_bn_partial_sum_empty(models, tables_1e5):
    assert bn_partial_sum(models["37a1"], tables_1e5["37a1"], 1.0, 2.0) == 0.0


def test_bn_partial_sum_half_weight(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    # at integer x = 2 the n = 2 term carries weight 1/2
    assert bn_partial_sum(m, t, 2.0, 2.0) == pytest.approx(-LOG2 / 4.0)
    assert bn_partial_sum(m, t, 2.5, 2.0) == pytest.approx(-LOG2 / 2.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 9, 16, 25, 27, 32, 49, 64, 81])
def test_half_weight_consistency(models, tables_1e5, n):
    m, t = models["11a1"], tables_1e5["11a1"]
    s = 1.3
    full = bn_partial_sum(m, t, float(n), s)
    below = bn_partial_sum(m, t, n - 0.5, s)
    assert full == pytest.approx(below + bn(m, t, n) / (2.0 * n**s), abs=1e-14)


# ----------------------------------------------------------------------
# partial Euler product
# ----------------------------------------------------------------------

def test_log_product_empty(models, tables_1e5):
    assert log_partial_euler_product(models["37a1"], tables_1e5["37a1"], 1.0, 2.0) == 0.0


def test_log_product_single_factor(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    # good factor at p=2, s=2: 1 + 2/4 + 2^(1-4) = 13/8
    assert log_partial_euler_product(m, t, 2.0, 2.0) == pytest.approx(-math.log(13.0 / 8.0))
    # at s=1 the factor is p/N_p = 2/5
    assert log_partial_euler_product(m, t, 2.0, 1.0) == pytest.approx(math.log(2.0 / 5.0))


def test_np_product_examples(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert np_product_log(m, t, 1.0) == 0.0
    # N_2 = 5, N_3 = 7: log(5/2 * 7/3)
    assert np_product_log(m, t, 3.0) == pytest.approx(math.log(35.0 / 6.0))


def test_np_product_consistency_identity(models, tables_1e5):
    for label in ("11a1", "37a1"):
        m, t = models[label], tables_1e5[label]
        for x in (10.0, 1000.0, 99991.0):
            gap = np_product_log(m, t, x) + log_partial_euler_product(m, t, x, 1.0)
            assert abs(gap) <= 1e-14, (label, x)


def test_s1_factor_equals_np_over_p(models, tables_1e5):
    # every Euler factor at s = 1 equals p / N_p, both reduction kinds
    for label in ("11a1", "37a1", "389a1"):
        t = tables_1e5[label]
        for rd in t.prefix(200.0):
            if rd.kind == "good":
                factor = 1.0 - rd.ap / rd.p + 1.0 / rd.p
            else:
                factor = 1.0 - rd.ap / rd.p
            assert factor == pytest.approx(rd.np / rd.p, rel=1e-15), (label, rd.p)


def test_log_product_rejects_small_s(models, tables_1e5):
    with pytest.raises(InputError):
        log_partial_euler_product(models["37a1"], tables_1e5["37a1"], 10.0, 0.9)


# ----------------------------------------------------------------------
# c_n and the Mertens sum
# ----------------------------------------------------------------------

def test_cn_examples(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert cn_partial_sum(m, t, 1.0) == 0.0
    assert cn_partial_sum(m, t, 2.0) == pytest.approx(1.0)  # -a_2/2 = 1


def test_cn_tracks_product_log(models, tables_1e5):
    # |sum c_n - log prod N_p/p| <= 2 on the desk range (calibrated O(1) gap)
    for label in ("11a1", "37a1"):
        m, t = models[label], tables_1e5[label]
        for x in (10.0, 100.0, 1e3, 1e4, 1e5):
            gap = cn_partial_sum(m, t, x) - np_product_log(m, t, x)
            assert abs(gap) <= 2.0, (label, x, gap)


def test_u_term_examples(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert u_term(m, t, 1.5, 1.0) == 0.0
    assert u_term(m, t, 2.0, 1.0) == pytest.approx(0.0)      # (a_2^2-4)/8 = 0
    assert u_term(m, t, 4.0, 1.0) == pytest.approx(1.0 / 6.0)  # p=3 in (2,4]


def test_u_term_telescopes_to_mertens(models, tables_1e6):
    m, t = models["11a1"], tables_1e6["11a1"]
    for x in (1e4, 1e6):
        direct = u_term(m, t, x, 1.0)
        tele = mertens_prime_sum(m, t, x) - mertens_prime_sum(m, t, math.sqrt(x))
        assert direct == pytest.approx(tele, abs=1e-14)


# ----------------------------------------------------------------------
# psi_E
# ----------------------------------------------------------------------

def test_psi_small_values(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    assert psi_e(m, t, 1.0).psi == 0.0
    assert psi_e(m, t, 2.0).psi == pytest.approx(-2 * LOG2)
    # terms at 2, 3, 4: -2 log 2 - 3 log 3 + 0
    assert psi_e(m, t, 4.0).psi == pytest.approx(-2 * LOG2 - 3 * math.log(3.0))


def test_psi_excludes_bad_primes(models, tables_1e5):
    m, t = models["11a1"], tables_1e5["11a1"]
    lo = psi_e(m, t, 10.9).psi
    hi = psi_e(m, t, 11.1).psi  # p = 11 is bad: no jump
    assert lo == hi


def test_psi_telescoping(models, tables_1e5):
    m, t = models["11a1"], tables_1e5["11a1"]
    for x in (9.0, 32.0, 128.0, 127.0):
        delta = psi_e(m, t, x).psi - psi_e(m, t, x - 1.0).psi
        expect = 0.0
        for p, k, pk, ap, bad in iter_prime_powers(t, x):
            if bad or pk <= x - 1.0:
                continue
            from eulerlab.curves import frobenius_power_sum

            expect += frobenius_power_sum(ap, p, k) * math.log(p)
        assert delta == pytest.approx(expect, abs=1e-10), x


def test_psi_jump_points_match_psi(models, tables_1e5):
    m, t = models["37a1"], tables_1e5["37a1"]
    xs, psis = psi_jump_points(m, t, 1000.0)
    for i in (0, 5, 50, len(xs) - 1):
        assert psis[i] == pytest.approx(psi_e(m, t, float(xs[i])).psi, abs=1e-10)


def test_psi_ratio_undefined_below_ee(models, tables_1e5):
    pt = psi_e(models["37a1"], tables_1e5["37a1"], 10.0)
    assert pt.bound_ratio is None
    pt = psi_e(models["37a1"], tables_1e5["37a1"], 100.0)
    assert pt.bound_ratio is not None and pt.bound_ratio >= 0.0


# ----------------------------------------------------------------------
# trivial-zero tail
# ----------------------------------------------------------------------

def test_trivial_tail_arithmetic():
    t0 = trivial_zero_tail(10.0, 2.0, 0)
    assert t0.value == pytest.approx(0.005)
    t1 = trivial_zero_tail(10.0, 2.0, 1)
    assert t1.value == pytest.approx(0.005 + 1e-3 / 3.0)
    t5 = trivial_zero_tail(10.0, 2.0, 5)
    assert t5.tail_bound < 1e-7


def test_trivial_tail_bound_is_rigorous():
    # the remainder after K terms is below the stated geometric bound
    ref = trivial_zero_tail(7.0, 1.25, 200).value
    for k in (0, 1, 3, 6):
        t = trivial_zero_tail(7.0, 1.25, k)
        assert abs(ref - t.value) <= t.tail_bound


# ----------------------------------------------------------------------
# zero sums
# ----------------------------------------------------------------------

def test_r_term_empty_zero_list(models):
    res = r_term(models["11a1"], ZeroList((), ()), 100.0, 1.25, 25.0)
    assert res.value == 0.0
    assert res.empty


def test_zero_pole_sum_is_real_and_matches_complex_form(records):
    zeros = records["11a1"].zero_list()
    x, s, t_cut = 100.0, 1.25, 25.0
    got = zero_pole_sum(zeros, x, s, t_cut)
    brute = 0.0 + 0.0j
    for g, m in zeros.positive(t_cut):
        for gg in (g, -g):
            rho = complex(1.0, gg)
            brute += m * x ** complex(rho.real - s, rho.imag) / (rho - s)
    assert abs(brute.imag) < 1e-12
    assert got == pytest.approx(brute.real, abs=1e-10)


def test_r_term_single_pair_against_quadrature(records, models):
    """The T=7 truncation (one pair) against an mpmath quadrature oracle."""
    mpmath = pytest.importorskip("mpmath")
    mp = mpmath.mp
    rec = records["11a1"]
    g1 = [z for z in rec.zeros if z > 0][0]
    x, s = 100.0, 1.25
    got = r_term(models["11a1"], rec.zero_list(), x, s, 7.0)
    assert not got.empty
    with mpmath.workdps(40):
        lx = mp.log(x)
        total = mp.mpf(0)
        for gg in (g1, -g1):
            rho = mp.mpc(1, gg)
            total += (x ** (rho - s) / (rho - s)).real
            integ = mpmath.quad(
                lambda z: (x ** (rho - z) / (rho - z) ** 2).real, [s, s + 60.0 / float(lx)]
            )
            total += integ
        want = float(total / lx)
    assert got.value == pytest.approx(want, abs=1e-8)


def test_r_term_realness_from_pairs(records, models):
    got = r_term(models["11a1"], records["11a1"].zero_list(), 500.5, 1.2, 25.0)
    assert math.isfinite(got.value)
    assert got.tail_estimate >= 0.0


# ----------------------------------------------------------------------
# explicit formula
# ----------------------------------------------------------------------

def test_explicit_formula_residual_bounded_by_tail_scale(records, models, tables_1e5,
                                                         coeffs_afe):
    # the truncated residual is the oscillating zero-sum tail: its size stays
    # within a few times x^(1-s) at strip s, for any truncation height
    m = models["11a1"]
    for t_cut in (5.0, 15.0, 25.0):
        chk = explicit_formula_residual(m, tables_1e5["11a1"], records["11a1"].zero_list(),
                                        500.5, 1.25, t_cut, coeffs_afe["11a1"])
        assert abs(chk.residual) < 500.5 ** -0.25  # ~0.21; measured max 0.14


def test_explicit_formula_can_be_tiny_at_lucky_x(records, models, tables_1e5, coeffs_afe):
    # at x = 700.5 the tail phases nearly cancel; frozen from a survey run
    chk = explicit_formula_residual(models["11a1"], tables_1e5["11a1"],
                                    records["11a1"].zero_list(),
                                    700.5, 1.25, 25.0, coeffs_afe["11a1"])
    assert abs(chk.residual) < 0.01


def test_explicit_formula_strong_regime(records, models, tables_1e5, coeffs_afe):
    chk = explicit_formula_residual(models["11a1"], tables_1e5["11a1"],
                                    records["11a1"].zero_list(),
                                    500.5, 2.5, 25.0, coeffs_afe["11a1"])
    assert abs(chk.residual) < 1e-3


def test_explicit_formula_breakdown_consistency(records, models, tables_1e5, coeffs_afe):
    chk = explicit_formula_residual(models["37a1"], tables_1e5["37a1"],
                                    records["37a1"].zero_list(),
                                    300.5, 1.3, 20.0, coeffs_afe["37a1"])
    assert chk.residual == pytest.approx(chk.lhs - chk.rhs, abs=1e-14)


# ----------------------------------------------------------------------
# the product decomposition
# ----------------------------------------------------------------------

def test_theorem_a_rank0_li_term_vanishes(records, models, tables_1e5, coeffs_afe):
    rec = records["11a1"]
    bd = theorem_a_rhs(models["11a1"], tables_1e5["11a1"], coeffs_afe["11a1"],
                       rec.special_values(), rec.zero_list(), 1e4, 1.2, 25.0)
    assert bd.li_term == 0.0
    assert bd.total == pytest.approx(bd.log_l + bd.r_term + bd.u_term)


def test_theorem_a_gap_within_band_and_tightening(records, models, tables_1e5, coeffs_afe):
    rec = records["11a1"]
    m, t = models["11a1"], tables_1e5["11a1"]
    gaps = []
    for x in (1e3, 1e5):
        bd = theorem_a_rhs(m, t, coeffs_afe["11a1"], rec.special_values(),
                           rec.zero_list(), x, 1.3, 25.0)
        lhs = log_partial_euler_product(m, t, x, 1.3)
        gap = abs(lhs - bd.total)
        assert gap <= bd.err_bound + bd.r_tail, x
        gaps.append(gap)
    assert gaps[-1] < gaps[0]


def test_theorem_a_domain(records, models, tables_1e5, coeffs_afe):
    rec = records["11a1"]
    with pytest.raises(InputError):
        theorem_a_rhs(models["11a1"], tables_1e5["11a1"], coeffs_afe["11a1"],
                      rec.special_values(), rec.zero_list(), 1e3, 1.6, 25.0)


# ----------------------------------------------------------------------
# derivative identity
# ----------------------------------------------------------------------

@pytest.mark.parametrize("label,x,s", [
    ("11a1", 100.0, 1.3),
    ("11a1", 1000.0, 1.2),
    ("37a1", 100.0, 1.3),
    ("37a1", 1000.0, 1.2),
])
def test_derivative_identity(models, tables_1e5, label, x, s):
    m, t = models[label], tables_1e5[label]
    h = 1e-5
    fd = (log_partial_euler_product(m, t, x, s + h)
          - log_partial_euler_product(m, t, x, s - h)) / (2.0 * h)
    assert fd == pytest.approx(-log_euler_derivative_rhs(m, t, x, s), abs=1e-6)
