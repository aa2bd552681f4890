import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from oracles import brute_tail, h, log_binomial_cdf
from statsum import (
    DegenerateSpecError,
    Direction,
    DomainError,
    NumericFailure,
    SumSpec,
    TailQuery,
    WindowError,
    binary_entropy,
    binom_bounds,
    chernoff_numeric,
    corollary1_bound,
    entropy_argument,
    entropy_quadratic_gap,
    stationary_lambda,
    thm1_lower_tail_bound,
    thm1_upper_tail_sandwich,
    thm2_lower_tail_bound,
    thm2_upper_tail_sandwich,
)
from statsum.exponents import chernoff_objective, relaxed_objective

LN2 = math.log(2)


def upper(z, n, A, M=1):
    return TailQuery(SumSpec(z, M, n), A, Direction.UPPER)


def lower(z, n, A, M=1):
    return TailQuery(SumSpec(z, M, n), A, Direction.LOWER)


# ---------------------------------------------------------------- entropy

def test_entropy_values():
    assert binary_entropy(0.5) == pytest.approx(LN2, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.3) == pytest.approx(0.6108643020548935, abs=1e-15)


@pytest.mark.parametrize("x", [-1e-9, 1.000001, float("nan")])
def test_entropy_domain(x):
    with pytest.raises(DomainError):
        binary_entropy(x)


def test_entropy_symmetry_random():
    xs = np.random.default_rng(0).random(1000)
    assert np.max(np.abs(binary_entropy(xs) - binary_entropy(1 - xs))) <= 1e-15


@given(st.floats(0, 1))
def test_entropy_symmetry(x):
    assert abs(binary_entropy(x) - binary_entropy(1 - x)) <= 1e-15


def test_binom_bounds_examples():
    lo, hi = binom_bounds(4, 2)
    assert (lo, hi) == pytest.approx((16 / 5, 16), rel=1e-14)
    assert lo <= 6 <= hi
    lo, hi = binom_bounds(10, 5)
    assert (lo, hi) == pytest.approx((1024 / 11, 1024), rel=1e-13)
    assert binom_bounds(7, 0) == pytest.approx((1 / 8, 1.0))


def test_binom_bounds_contain_exact_coefficients():
    for n in range(1, 61):
        for k in range(n + 1):
            lo, hi = binom_bounds(n, k)
            c = math.comb(n, k)
            assert lo <= c * (1 + 1e-14) and c <= hi * (1 + 1e-14), (n, k)


@pytest.mark.parametrize("n,k", [(5, -1), (5, 6)])
def test_binom_bounds_domain(n, k):
    with pytest.raises(DomainError):
        binom_bounds(n, k)


def test_quadratic_gap_examples():
    assert entropy_quadratic_gap(0.0) == pytest.approx((LN2, LN2), abs=1e-15)
    lhs, rhs = entropy_quadratic_gap(0.5)
    assert lhs == 0.0 and rhs == pytest.approx(LN2 - 0.5)
    lhs, rhs = entropy_quadratic_gap(0.1)
    assert lhs == pytest.approx(h(0.4), abs=1e-15)
    assert rhs == pytest.approx(LN2 - 0.02, abs=1e-15)
    assert lhs <= rhs


def test_quadratic_gap_dense_grid():
    for eps in np.linspace(0.0, 0.5, 501):
        lhs, rhs = entropy_quadratic_gap(float(eps))
        assert lhs <= rhs + 1e-15


def test_quadratic_gap_domain():
    with pytest.raises(DomainError):
        entropy_quadratic_gap(0.6)


# ---------------------------------------------------------------- entropy argument

def test_entropy_argument_examples():
    assert entropy_argument(upper(0.25, 10, 0.25**3)) == pytest.approx(0.3, abs=1e-14)
    assert entropy_argument(upper(0.5, 20, 0.5**10)) == pytest.approx(0.5, abs=1e-14)
    assert entropy_argument(upper(4.0, 10, 4.0**7)) == pytest.approx(0.3, abs=1e-14)


def test_entropy_argument_errors():
    with pytest.raises(DegenerateSpecError):
        entropy_argument(upper(1.0, 10, 0.5))
    with pytest.raises(WindowError):
        entropy_argument(upper(0.5, 10, 2.0))


@pytest.mark.parametrize("z,M,n", [(0.0, 1, 1), (-1.0, 1, 1), (0.5, 0, 3), (0.5, 2, 0), (0.5, 1.5, 3)])
def test_sumspec_validation(z, M, n):
    with pytest.raises(DomainError):
        SumSpec(z, M, n)


def test_tailquery_validation():
    with pytest.raises(DomainError):
        upper(0.5, 4, 0.0)
    assert SumSpec(1.0, 3, 2).degenerate


# ---------------------------------------------------------------- theorem 1

def test_thm1_sandwich_example():
    sw = thm1_upper_tail_sandwich(upper(0.5, 40, 0.5**12))
    center = h(0.3) - LN2
    assert center == pytest.approx(-0.0822829, abs=1e-7)
    assert sw.a_star == pytest.approx(0.3, abs=1e-14)
    assert sw.lower == pytest.approx(center - math.log(41) / 40, abs=1e-14)
    assert sw.upper == pytest.approx(center + math.log(40) / 40, abs=1e-14)


def test_thm1_sandwich_midpoint():
    sw = thm1_upper_tail_sandwich(upper(0.5, 40, 0.5**20))
    assert sw.center == pytest.approx(0.0, abs=1e-15)
    assert sw.lower == pytest.approx(-math.log(41) / 40, abs=1e-15)
    assert sw.upper == pytest.approx(math.log(40) / 40, abs=1e-15)


def test_thm1_sandwich_contains_exact_tail():
    n = 40
    exact = log_binomial_cdf(n, 12) / n
    assert thm1_upper_tail_sandwich(upper(0.5, n, 0.5**12)).contains(exact)


def test_thm1_windows():
    with pytest.raises(WindowError):
        thm1_upper_tail_sandwich(upper(0.5, 40, 0.5**21))
    with pytest.raises(WindowError):
        thm1_upper_tail_sandwich(upper(0.5, 40, 1.5))
    with pytest.raises(DomainError):
        thm1_upper_tail_sandwich(lower(0.5, 40, 0.5**12))
    with pytest.raises(DomainError):
        thm1_upper_tail_sandwich(upper(2.0, 40, 2.0**25))
    # the exact endpoint is admitted despite rounding in z**(n/2)
    thm1_upper_tail_sandwich(upper(0.3, 37, 0.3 ** (37 / 2)))


@given(z=st.floats(0.01, 0.99), n=st.integers(1, 500), a=st.floats(0, 0.5))
def test_sandwich_gap_identity(z, n, a):
    sw = thm1_upper_tail_sandwich(upper(z, n, z ** (a * n)))
    assert sw.upper - sw.lower == pytest.approx((math.log(n) + math.log(n + 1)) / n, abs=1e-14)
    assert sw.lower <= sw.upper


def test_thm1_center_monotone_in_A():
    z, n = 0.6, 30
    As = np.geomspace(1.0, z ** (n / 2), 200)
    centers = [thm1_upper_tail_sandwich(upper(z, n, float(A))).center for A in As]
    assert np.all(np.diff(centers) >= -1e-15)
    assert centers[-1] == pytest.approx(0.0, abs=1e-12)


def test_thm1_lower_tail_example():
    bound = thm1_lower_tail_bound(lower(0.5, 40, 0.5**28))
    assert bound == pytest.approx(h(0.7) - LN2 + math.log(41) / 40, abs=1e-14)
    assert bound == pytest.approx(0.0105564, abs=1e-7)
    assert thm1_lower_tail_bound(lower(0.5, 40, 0.5**20)) == pytest.approx(math.log(41) / 40, abs=1e-15)


def test_thm1_lower_tail_contains_exact():
    half = Fraction(1, 2)
    p = brute_tail(half, 2, 10, half**7, upper=False)
    value = math.log(p) / 20
    assert value <= thm1_lower_tail_bound(lower(0.5, 10, 0.5**7, M=2))


def test_thm1_lower_window():
    with pytest.raises(WindowError):
        thm1_lower_tail_bound(lower(0.5, 40, 0.5**12))


# ---------------------------------------------------------------- theorem 2

def test_thm2_examples():
    sw = thm2_upper_tail_sandwich(upper(2.0, 40, 2.0**28))
    assert sw.a_star == pytest.approx(0.3, abs=1e-14)
    assert sw.center == pytest.approx(h(0.3) - LN2, abs=1e-14)
    assert thm2_upper_tail_sandwich(upper(2.0, 40, 2.0**20)).center == pytest.approx(0.0, abs=1e-15)


def test_thm2_delegation_bit_for_bit():
    A = 2.0**28
    got = thm2_upper_tail_sandwich(upper(2.0, 40, A))
    want = thm1_upper_tail_sandwich(upper(1 / 2.0, 40, A * 2.0 ** (-40)))
    assert got == want


@given(z=st.floats(1.01, 50), n=st.integers(1, 200), a=st.floats(0, 0.5))
def test_duality_identity(z, n, a):
    assume(n * math.log(z) < 600)
    A = z ** ((1 - a) * n)
    got = thm2_upper_tail_sandwich(upper(z, n, A))
    # same two half-steps as the library, so z**-n itself never goes subnormal
    dual_A = A * z ** (-(n // 2)) * z ** (-(n - n // 2))
    assert got == thm1_upper_tail_sandwich(upper(1 / z, n, dual_A))
    assert got.a_star == pytest.approx(1 - math.log(A) / (n * math.log(z)), abs=1e-12)


def test_thm2_lower_tail():
    bound = thm2_lower_tail_bound(lower(2.0, 40, 2.0**12))
    assert bound == pytest.approx(h(0.7) - LN2 + math.log(41) / 40, abs=1e-14)
    assert thm2_lower_tail_bound(lower(2.0, 40, 2.0**20)) == pytest.approx(math.log(41) / 40, abs=1e-15)
    p = brute_tail(Fraction(2), 2, 10, Fraction(8), upper=False)
    assert math.log(p) / 20 <= thm2_lower_tail_bound(lower(2.0, 10, 8.0, M=2))
    with pytest.raises(WindowError):
        thm2_lower_tail_bound(lower(2.0, 10, 0.5))


def test_thm2_upper_window():
    with pytest.raises(WindowError):
        thm2_upper_tail_sandwich(upper(2.0, 10, 2.0**3))


def test_lower_bound_construction_single_term():
    # all mass on one weight l0: (1/n) ln P >= h(l0/n) - ln 2 - ln(n+1)/n
    for z in (0.3, 0.5, 0.8):
        for n in (5, 12, 30):
            for l0 in range(0, n // 2 + 1):
                value = log_binomial_cdf(n, l0) / n
                assert value >= h(l0 / n) - LN2 - math.log(n + 1) / n


# ---------------------------------------------------------------- corollary 1

def test_corollary1_examples():
    thr, logb = corollary1_bound(SumSpec(0.5, 2, 8))
    assert thr == pytest.approx(math.sqrt(8 * math.log(9)) * LN2, rel=1e-15)
    assert thr == pytest.approx(2.90608, abs=1e-5)
    assert logb == pytest.approx(-2 * math.log(9), rel=1e-15)
    thr, _ = corollary1_bound(SumSpec(math.e, 1, 3))
    assert thr == pytest.approx(math.sqrt(3 * math.log(4)), rel=1e-15)


def test_corollary1_rejects_z_one():
    with pytest.raises(DegenerateSpecError, match="degenerate"):
        corollary1_bound(SumSpec(1.0, 2, 8))


# ---------------------------------------------------------------- Chernoff

def _reference_objective(lam, z, n, A, sign):
    terms = [math.log(math.comb(n, l)) + sign * lam * z**l for l in range(n + 1)]
    m = max(terms)
    return (-sign * lam * A + m + math.log(sum(math.exp(t - m) for t in terms))) / n - LN2


def test_chernoff_objective_zero_at_origin():
    for q in (upper(0.5, 20, 0.5**6), lower(0.3, 15, 0.3**10)):
        assert chernoff_objective(0.0, q) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("z,n,a,direction", [
    (0.5, 20, 0.3, "upper"), (0.3, 10, 0.1, "upper"), (0.8, 40, 0.2, "upper"),
    (0.5, 20, 0.7, "lower"), (2.0, 12, 0.75, "upper"), (3.0, 15, 0.2, "lower"),
    (0.3, 10, 0.4, "upper"),
])
def test_chernoff_matches_golden_section(z, n, a, direction):
    A = z ** (a * n)
    sign = 1.0 if direction == "upper" else -1.0
    q = TailQuery(SumSpec(z, 1, n), A, Direction(direction))
    curve = chernoff_numeric(q)
    # |x| keeps the unconstrained golden search on lam >= 0
    ref = minimize_scalar(lambda x: _reference_objective(abs(x), z, n, A, sign),
                          bracket=(0.0, max(curve.lambda_star, 1.0) * 3), method="golden",
                          tol=1e-10)
    ref_value = min(ref.fun, 0.0)
    assert curve.value == pytest.approx(ref_value, abs=1e-10)
    if curve.lambda_star > 0:
        assert curve.lambda_star == pytest.approx(abs(ref.x), rel=1e-4)
    assert 0.0 <= curve.a_at_optimum <= 1.0


def test_chernoff_brackets_example():
    q = upper(0.5, 20, 0.5**6)
    curve = chernoff_numeric(q)
    assert curve.value <= 0.0
    assert curve.value <= h(0.3) - LN2 + math.log(21) / 20
    assert curve.value >= log_binomial_cdf(20, 6) / 20


def test_chernoff_value_bounds_exact_tail_for_pairs():
    half = Fraction(1, 2)
    for n, k in ((6, 2), (8, 3), (10, 4)):
        q = upper(0.5, n, 0.5**k, M=2)
        exact = math.log(brute_tail(half, 2, n, half**k)) / (2 * n)
        assert exact <= chernoff_numeric(q).value + 1e-12


def test_chernoff_trivial_when_A_below_mean():
    curve = chernoff_numeric(upper(0.3, 10, 0.3**4))
    assert curve.lambda_star == 0.0 and curve.value == 0.0


def test_chernoff_support_edge_reaches_infimum():
    # A = 1 = max z**w: the infimum is ln P{w = 0}/n = -ln 2, approached as lam grows
    assert chernoff_numeric(upper(0.5, 10, 1.0)).value == pytest.approx(-LN2, abs=1e-12)


def test_chernoff_reports_no_bracket():
    with pytest.raises(NumericFailure):
        chernoff_numeric(upper(0.5, 10, 1.5))
    with pytest.raises(NumericFailure):
        chernoff_numeric(lower(0.5, 10, 0.5**11))
    with pytest.raises(DegenerateSpecError):
        chernoff_numeric(upper(1.0, 10, 0.5))


# ---------------------------------------------------------------- stationary tilt

def test_stationary_lambda_examples():
    assert stationary_lambda(upper(0.5, 20, 0.5**10)) == 0.0
    lam = stationary_lambda(upper(0.5, 10, 0.5**3))
    assert lam == pytest.approx(math.log(7 / 3) / (0.5**3 * LN2), rel=1e-14)
    assert lam == pytest.approx(9.77914, abs=1e-5)
    assert stationary_lambda(upper(0.5, 10, 1.0)) == math.inf


def test_stationary_lambda_lower_branch():
    q = lower(0.5, 10, 0.5**7)
    lam = stationary_lambda(q)
    assert lam == pytest.approx(math.log(3 / 7) / (0.5**7 * math.log(0.5)), rel=1e-14)
    assert lam > 0


@pytest.mark.parametrize("z,n,a,direction", [(0.5, 10, 0.3, "upper"), (0.3, 20, 0.2, "upper"),
                                             (0.8, 40, 0.7, "lower")])
def test_stationary_point_of_relaxed_objective(z, n, a, direction):
    """At (lam0, a) the a-derivative of the relaxed objective vanishes."""
    q = TailQuery(SumSpec(z, 1, n), z ** (a * n), Direction(direction))
    lam = stationary_lambda(q)
    step = 1e-6
    deriv = (relaxed_objective(lam, a + step, q) - relaxed_objective(lam, a - step, q)) / (2 * step)
    assert deriv == pytest.approx(0.0, abs=1e-5 * n)


def test_stationary_lambda_windows():
    with pytest.raises(WindowError):
        stationary_lambda(upper(0.5, 10, 0.5**7))
    with pytest.raises(DomainError):
        stationary_lambda(upper(2.0, 10, 2.0**7))
