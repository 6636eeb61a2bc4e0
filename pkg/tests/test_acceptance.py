"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""
import time
from fractions import Fraction

import pytest
from gmpy2 import mpfr

from bintrans.bignum_core import PrecisionPolicy, gamma_reference, precision
from bintrans.cli import KNOWN_FACTORS, main
from bintrans.conjectures import (
    conj1_partial,
    conj2_partial,
    conj3_partial,
    conj4_partial,
    conj4_residual,
    conjecture_report,
    y_k,
)
from bintrans.constants import (
    cor3_product_double,
    cor5_partial,
    gamma_remainder_total,
    remark2_single,
    thm1_partial,
    thm4_partial,
    thm4_partial_signed,
)
from bintrans.remainder import remainder_integral, remainder_integral_quadrature
from bintrans.results import render_fraction
from bintrans.binomial_transform import g_m, lemma7_check, lemma9_check, lemma10_check

P128 = PrecisionPolicy(128)
P256 = PrecisionPolicy(256)


@pytest.mark.criterion(1, "exact lemma sweeps")
def test_lemma_sweeps():
    t = time.perf_counter()
    for m in range(1, 51):
        for z in (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 7), Fraction(10)):
            assert lemma7_check(m, z), (m, z)
    for m in range(1, 101):
        for k in range(1, m + 1):
            assert lemma9_check(m, k), (m, k)
    for j in range(1, 101):
        for n in range(1, j + 1):
            assert lemma10_check(j, n), (j, n)
    assert time.perf_counter() - t < 10


@pytest.mark.criterion(2, "exact residual identity")
@pytest.mark.parametrize("u", [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(7, 3)])
def test_residual_identity(u):
    for m in range(1, 41):
        v = thm1_partial(u, m).value
        assert isinstance(v, Fraction)
        assert v + g_m(1 / u, m) == 1


@pytest.mark.criterion(3, "gamma sandwich")
def test_gamma_sandwich():
    g = gamma_reference(P256.working_bits(0))
    for m in range(2, 201):
        v = thm4_partial(m, P256).value
        with precision(P256.working_bits(m)):
            assert 0 < g - v < 2 * g / (m + 1), m


@pytest.mark.criterion(3, "gamma sandwich")
def test_gamma_large_order():
    t = time.perf_counter()
    r = thm4_partial(1150)
    assert abs(r.reference_error) < 1e-3
    assert time.perf_counter() - t < 60


@pytest.mark.criterion(4, "product factor match")
@pytest.mark.parametrize("u", [1, 2, 3])
def test_product_factors(u):
    got = tuple(render_fraction(f) for f in cor3_product_double(u, 3).factors)
    assert got == KNOWN_FACTORS[u]


@pytest.mark.criterion(5, "remainder-series identity")
@pytest.mark.parametrize("m", [2, 5, 10])
def test_remainder_identity(m):
    # signed = sum C(m,k) (-1)^(k+1) ln(k!)/k, which equals -gamma + S_m
    signed = thm4_partial_signed(m, P128)
    s = gamma_remainder_total(m, P128, Fraction(1, 10**12))
    assert s.tail_bound <= Fraction(1, 10**12)
    g = gamma_reference(P128.working_bits(m))
    with precision(P128.working_bits(m)):
        assert abs(signed - (-g + s.total)) < 1e-8


@pytest.mark.criterion(6, "double-series trend")
def test_double_series_trend():
    assert abs(cor5_partial(50, P128).reference_error) < abs(cor5_partial(10, P128).reference_error)


@pytest.mark.criterion(7, "conjecture anchors")
def test_anchor_bessel_at_zero():
    for m in range(1, 51):
        assert conj2_partial(0, m).value == 1


@pytest.mark.criterion(7, "conjecture anchors")
def test_anchor_nested_log_single():
    for u in (1, Fraction(1, 2), 3):
        for m in range(1, 31):
            assert conj1_partial((u,), m).value == remark2_single(u, m).value


@pytest.mark.criterion(7, "conjecture anchors")
def test_anchor_single_node():
    assert abs(conj4_residual((1,), P128, Fraction(1, 10**12))) < 1e-10


@pytest.mark.criterion(7, "conjecture anchors")
def test_anchor_y1():
    y = y_k(1, P128, Fraction(1, 10**13))
    assert abs(y - gamma_reference(P128.working_bits(1))) < 1e-12


@pytest.mark.criterion(7, "conjecture anchors")
@pytest.mark.parametrize("nodes", [(1,), (1, 2), (1, 2, 3), (2, 5), (1, 3, 7, 10)])
def test_anchor_quadrature(nodes):
    wb = P128.working_bits(len(nodes))
    for n in (1, 2, 10):
        exact = remainder_integral(nodes, n, P128)
        quad, _ = remainder_integral_quadrature(nodes, n, P128)
        assert abs(exact - quad) <= mpfr(2) ** (-wb + 8)


@pytest.mark.criterion(8, "conjecture evidence")
def test_evidence_nested_log():
    a = conj1_partial((1, 1), 10, P128).reference_error
    b = conj1_partial((1, 1), 30, P128).reference_error
    assert abs(b) < abs(a)


@pytest.mark.criterion(8, "conjecture evidence")
def test_evidence_bessel():
    a = conj2_partial(1, 10, P128).reference_error
    b = conj2_partial(1, 40, P128).reference_error
    assert abs(b) < abs(a)


@pytest.mark.criterion(8, "conjecture evidence")
def test_evidence_lagrange_nodes():
    a = conj4_partial((1, 2), 10, P128).reference_error
    b = conj4_partial((1, 2), 100, P128).reference_error
    assert abs(b) < abs(a)


@pytest.mark.criterion(8, "conjecture evidence")
def test_evidence_double_factorial_reported(capsys):
    rep = conjecture_report(3, P128)
    with capsys.disabled():
        print(f"\n  double-factorial series status: {rep.status}, "
              f"residuals {[f'{float(r):.3e}' for r in rep.residuals]}")


@pytest.mark.criterion(9, "determinism across threads")
def test_determinism(capsys):
    argv = ["converge", "--formula", "thm4", "--m-min", "2", "--m-max", "100", "--digits", "30"]
    outs = []
    for jobs in ("1", "4", "1", "4"):
        assert main(argv + ["--jobs", jobs]) == 0
        outs.append(capsys.readouterr().out.encode())
    assert len(set(outs)) == 1
