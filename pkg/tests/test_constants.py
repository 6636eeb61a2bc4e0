from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr

from bintrans.bignum_core import DomainError, PrecisionPolicy, gamma_reference, precision
from bintrans.constants import (
    cor3_product_double,
    cor3_product_single,
    cor5_partial,
    gamma_remainder_series,
    gamma_remainder_total,
    remark2_double,
    remark2_double_weights,
    remark2_single,
    remark2_single_weights,
    thm1_partial,
    thm4_partial,
    thm4_partial_signed,
)
from bintrans.binomial_transform import TransformKernel, alt_binom_sum, g_m

mpmath.mp.prec = 300
P256 = PrecisionPolicy(256)


def mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    p, q = x.as_integer_ratio()
    return mpmath.mpf(p) / q


def close(x, y, tol=1e-30):
    return abs(mp(x) - y) < tol


# -- alternating sum tending to 1 ----------------------------------------------

def test_thm1_examples():
    r = thm1_partial(1, 3)
    assert r.value == Fraction(3, 4) and r.exact_residual == Fraction(1, 4)
    assert r.value + r.exact_residual == 1
    r = thm1_partial(1, 1)
    assert r.value == r.exact_residual == Fraction(1, 2)
    r = thm1_partial(2, 2)
    assert r.value == Fraction(7, 15) and r.exact_residual == Fraction(8, 15)


@pytest.mark.parametrize("u", [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(7, 3)])
def test_thm1_exact_residual(u):
    for m in range(1, 41):
        r = thm1_partial(u, m)
        assert r.value + g_m(1 / u, m) == 1
        assert 0 < r.exact_residual < r.proven_bound


def test_thm1_real_u_matches_exact():
    r = thm1_partial("0.5", 30, P256)
    e = thm1_partial(Fraction(1, 2), 30)
    assert close(r.value, mp(e.value), 1e-70)


@pytest.mark.parametrize("u", [0, -1, Fraction(-1, 2), "-0.5"])
def test_thm1_domain(u):
    with pytest.raises(DomainError, match="u must be > 0"):
        thm1_partial(u, 3)


# -- logarithmic sums tending to u -----------------------------------------------

def test_remark2_single_examples():
    assert close(remark2_single(1, 1).value, mpmath.log(2), 1e-15)
    assert close(remark2_single(1, 2, P256).value, 2 * mpmath.log(2) - mpmath.log(3) / 2, 1e-70)
    e20 = abs(remark2_single(1, 20).reference_error)
    e40 = abs(remark2_single(1, 40).reference_error)
    assert e40 < 0.06 and e40 < e20


def test_remark2_double_examples():
    assert close(remark2_double(1, 1).value, mpmath.log(2), 1e-15)
    want = mpmath.log(2) + (2 * mpmath.log(2) - mpmath.log(3)) / 2
    assert close(remark2_double(1, 2, P256).value, want, 1e-70)


@pytest.mark.parametrize("M", [1, 2, 5, 17, 40])
def test_remark2_orderings_agree_exactly(M):
    assert remark2_double_weights(M) == remark2_single_weights(M)


@pytest.mark.parametrize("u", ["0.5", Fraction(1), Fraction(2)])
def test_remark2_orderings_agree_numerically(u):
    a = remark2_single(u, 30, P256).value
    b = remark2_double(u, 30, P256).value
    assert abs(mp(a) - mp(b)) < 1e-70


def test_remark2_double_trend():
    assert abs(remark2_double(1, 200).reference_error) < abs(remark2_double(1, 50).reference_error)


def test_remark2_domain():
    with pytest.raises(DomainError):
        remark2_single(0, 5)
    with pytest.raises(DomainError):
        remark2_double(-1, 5)


# -- products tending to u -------------------------------------------------------

def test_cor3_single_examples():
    assert cor3_product_single(2, 1).value == 3
    assert cor3_product_single(2, 2).value == Fraction(9, 4)
    assert cor3_product_single(2, 3).value == Fraction(135, 64)


@pytest.mark.parametrize("u,want", [
    (1, ["2/1", "2/3", "8/9", "128/135"]),
    (2, ["3/1", "3/4", "15/16", "125/128"]),
    (3, ["4/1", "4/5", "24/25", "864/875"]),
])
def test_cor3_double_factors(u, want):
    assert list(cor3_product_double(u, 3).factors) == [Fraction(w) for w in want]


@pytest.mark.parametrize("u", [Fraction(1), Fraction(5, 2), Fraction(1, 3)])
def test_cor3_double_telescopes_to_single(u):
    for M in range(1, 15):
        assert cor3_product_double(u, M - 1).exact_form == cor3_product_single(u, M).exact_form


@pytest.mark.parametrize("u", [1, 2, 3])
def test_cor3_log_consistency(u):
    pol = PrecisionPolicy(128)
    for m in (1, 5, 12, 30):
        r = cor3_product_single(u, m, pol)
        bits = pol.working_bits(m)
        with precision(bits):
            terms = [gmpy2.log(mpfr(k + u)) for k in range(1, m + 1)]
        s = alt_binom_sum(TransformKernel.of(terms), pol)
        assert abs(mp(r.exact_form.log(bits)) - mp(s)) < mpmath.mpf(2) ** -120


def test_cor3_large_order_stays_factored():
    r = cor3_product_single(2, 40, PrecisionPolicy(64))
    assert isinstance(r.value, type(mpfr(0)))
    assert abs(float(r.reference_error)) < abs(float(cor3_product_single(2, 20).reference_error))


def test_cor3_domain():
    with pytest.raises(DomainError):
        cor3_product_single(0, 3)


# -- ln(k!) sums tending to gamma, and the remainder series --------------------

def test_thm4_examples():
    assert thm4_partial(1).value == 0
    r = thm4_partial(2, P256)
    assert close(r.value, mpmath.log(2) / 2, 1e-70)
    assert close(r.reference_error, mpmath.euler - mpmath.log(2) / 2, 1e-70)
    assert float(r.reference_error) < float(r.proven_bound)
    r = thm4_partial(50, P256)
    assert 0 < r.reference_error < r.proven_bound


def test_thm4_m1_difference_is_gamma():
    r = thm4_partial(1, P256)
    assert r.proven_bound is None
    assert r.reference_error == gamma_reference(P256.working_bits(1))


def test_thm4_sandwich():
    for m in range(2, 201):
        r = thm4_partial(m, P256)
        assert 0 < r.reference_error < r.proven_bound, m


def test_s1_is_gamma():
    """The bound constant S_1 = sum (1/j - ln(1 + 1/j)) equals gamma."""
    # telescoping oracle: partial sums are H_n - ln(n+1)
    n = 10**6
    assert abs(mpmath.harmonic(n) - mpmath.log(n + 1) - mpmath.euler) < 1e-6
    s = gamma_remainder_total(1, PrecisionPolicy(128), Fraction(1, 10**30))
    assert close(s.total, mpmath.euler, 1e-29)


def test_remainder_series_examples():
    s = gamma_remainder_series(1, 1, tail=False)
    assert close(s.partial, 1 - mpmath.log(2), 1e-15)
    s = gamma_remainder_series(1, 2000, PrecisionPolicy(128))
    assert close(s.total, mpmath.euler, 1e-25)


@pytest.mark.parametrize("m", [2, 5, 10])
def test_remainder_identity(m):
    pol = PrecisionPolicy(128)
    signed = thm4_partial_signed(m, pol)
    s = gamma_remainder_total(m, pol, Fraction(1, 10**12))
    assert abs(mp(signed) + mpmath.euler - mp(s.total)) < 1e-8


def test_remainder_partial_sum_matches_mpmath_quad():
    # each term integrated independently by mpmath, straight from the product
    m, N = 3, 50
    s = gamma_remainder_series(m, N, PrecisionPolicy(128), tail=False)
    want = mpmath.fsum(mpmath.quad(lambda u: mpmath.fprod(k * u / (1 + k * u) for k in range(1, m + 1)),
                                   [0, mpmath.mpf(1) / j]) for j in range(1, N + 1))
    assert close(s.partial, want, 1e-40)


# -- double series for gamma ----------------------------------------------------

def test_cor5_examples():
    assert cor5_partial(1).value == 0
    assert close(cor5_partial(2, P256).value, mpmath.log(2) / 2, 1e-70)
    p = PrecisionPolicy(128)
    assert abs(cor5_partial(50, p).reference_error) < abs(cor5_partial(10, p).reference_error)


# -- monotonicity at sampled orders ---------------------------------------------

@pytest.mark.parametrize("u", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_error_shrinks_from_20_to_40(u):
    for f in (thm1_partial, remark2_single, cor3_product_single):
        e20, e40 = abs(f(u, 20).reference_error), abs(f(u, 40).reference_error)
        assert e40 < e20, f.__name__
    assert abs(thm4_partial(40).reference_error) < abs(thm4_partial(20).reference_error)
