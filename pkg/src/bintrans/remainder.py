"""Remainder integrals int_0^{1/n} prod_k a_k x / (1 + a_k x) dx and their sums.

The integrand is a rational function with numerator and denominator of equal
degree, so it splits as 1 + sum_k c_k / (1 + a_k x) with exact rational c_k,
and every integral has the closed form

    1/n + sum_k (c_k / a_k) ln(1 + a_k / n).

Series over n are summed directly; the tail beyond the last term is either
bounded by term domination or estimated by Euler-Maclaurin with a bounded
remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import gmpy2
from gmpy2 import mpfr

from .bignum_core import DEFAULT_POLICY, PrecisionPolicy, bernoulli_even, precision, to_big
from .quadrature import adaptive_quad

DIRECT_MAX_TERMS = 4096


def check_nodes(nodes) -> tuple[int, ...]:
    """Validate a node set: distinct positive integers."""
    nodes = tuple(int(a) for a in nodes)
    if not nodes:
        raise ValueError("node set must be non-empty")
    if any(a < 1 for a in nodes):
        raise ValueError("nodes must be positive integers")
    if len(set(nodes)) != len(nodes):
        raise ValueError("nodes must be pairwise distinct")
    return nodes


@dataclass(frozen=True)
class RemainderIntegrand:
    nodes: tuple[int, ...]
    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(1)

    @classmethod
    def from_nodes(cls, nodes) -> "RemainderIntegrand":
        """Partial-fraction coefficients from the residues at x = -1/a_k."""
        nodes = check_nodes(nodes)
        coeffs = []
        for k, ak in enumerate(nodes):
            x = Fraction(-1, ak)
            num = math.prod(a * x for a in nodes)
            den = math.prod(1 + a * x for j, a in enumerate(nodes) if j != k)
            coeffs.append(num / den)
        return cls(nodes, tuple(coeffs))

    @property
    def log_weights(self) -> tuple[Fraction, ...]:
        return tuple(c / a for c, a in zip(self.coeffs, self.nodes))

    @property
    def cancellation_bits(self) -> int:
        # terms / result <= (1 + sum|c|)(m+1) prod(1+a) n^m; n^m is added per call
        m = len(self.nodes)
        ratio = (1 + sum(abs(c) for c in self.coeffs)) * (m + 1) * math.prod(
            1 + a for a in self.nodes)
        return math.ceil(ratio).bit_length() + 8

    def evaluate(self, x):
        """Integrand via its partial-fraction form."""
        s = self.constant
        for a, c in zip(self.nodes, self.coeffs):
            s = s + c / (1 + a * x)
        return s

    def direct(self, x):
        """Integrand as the plain product."""
        p = 1
        for a in self.nodes:
            p = p * (a * x) / (1 + a * x)
        return p


def _closed_form(ri: RemainderIntegrand, n: int, bits: int):
    wp = bits + ri.cancellation_bits + len(ri.nodes) * n.bit_length()
    with precision(wp):
        s = mpfr(1) / n
        for a, w in zip(ri.nodes, ri.log_weights):
            s += to_big(w, wp) * gmpy2.log1p(mpfr(a) / n)
    return mpfr(s, bits)


def remainder_integral(nodes, n: int, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Closed-form int_0^{1/n} prod_k a_k x/(1 + a_k x) dx."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ri = RemainderIntegrand.from_nodes(nodes)
    return _closed_form(ri, n, policy.working_bits(len(ri.nodes)))


def remainder_integral_quadrature(nodes, n: int, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Quadrature of the same integral from the plain product; (value, err)."""
    nodes = check_nodes(nodes)
    bits = policy.working_bits(len(nodes))

    def f(x):
        p = mpfr(1)
        for a in nodes:
            p = p * (a * x) / (1 + a * x)
        return p

    tol = mpfr(2) ** (-(bits + 4))
    with precision(bits + 32):
        upper = mpfr(1) / n
    return adaptive_quad(f, mpfr(0), upper, bits + 32, tol, order=32)


def domination_tail_bound(nodes, n_max: int) -> Fraction:
    """Bound on sum_{n > n_max} of the integrals, from integrand <= prod(a) x^m."""
    nodes = check_nodes(nodes)
    m = len(nodes)
    return Fraction(math.prod(nodes), (m + 1) * m * n_max**m)


def domination_terms_needed(nodes, target) -> int:
    """Smallest N whose domination tail bound is <= target."""
    nodes = check_nodes(nodes)
    m = len(nodes)
    target = Fraction(target)
    c = Fraction(math.prod(nodes), (m + 1) * m)
    need = c / target  # smallest n with n^m >= need
    lo, hi = 1, 1
    while Fraction(hi) ** m < need:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if Fraction(mid) ** m >= need:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _em_tail(ri: RemainderIntegrand, n0: int, bits: int, target):
    """Euler-Maclaurin estimate of sum_{n > n0} phi(n); returns (tail, bound).

    phi(x) = 1/x + sum_k d_k (ln(x + a_k) - ln x) with d_k = c_k / a_k. The
    remainder after the B_{2p} term is bounded by |B_{2p}|/(2p)! times a bound
    on int_{n0}^inf |phi^(2p)|, obtained term by term.
    """
    m = len(ri.nodes)
    wp = bits + ri.cancellation_bits + (m + 3) * n0.bit_length() + 32
    target = Fraction(target)
    with precision(wp):
        d = [to_big(w, wp) for w in ri.log_weights]
        ab = sum(abs(w) for w in ri.log_weights)
        x = mpfr(n0)
        # int_{n0}^inf phi = -F(n0), F(x) = ln x + sum d_k ((x+a)ln(x+a) - x ln x - a)
        lx = gmpy2.log(x)
        big_f = lx
        for a, dk in zip(ri.nodes, d):
            big_f += dk * ((x + a) * gmpy2.log(x + a) - x * lx - a)
        phi = mpfr(1) / x
        for a, dk in zip(ri.nodes, d):
            phi += dk * gmpy2.log1p(a / x)
        tail = -big_f - phi / 2
        best = None
        fact = {0: 1}
        for r in range(1, 4 * n0 + 200):
            fact[r] = fact[r - 1] * r
        p = 1
        while True:
            r = 2 * p - 1
            deriv = (-1) ** r * fact[r] / x ** (r + 1)
            for a, dk in zip(ri.nodes, d):
                deriv += dk * (-1) ** (r - 1) * fact[r - 1] * ((x + a) ** (-r) - x ** (-r))
            tail -= to_big(bernoulli_even(p) / fact[2 * p], wp) * deriv
            # (x+a)^(1-2p) + x^(1-2p) <= 2 x^(1-2p)
            integral = (Fraction(fact[2 * p - 1], n0 ** (2 * p))
                        + ab * fact[2 * p - 2] * Fraction(2, n0 ** (2 * p - 1)))
            bound = abs(bernoulli_even(p)) / fact[2 * p] * integral
            if best is not None and bound >= best[1]:
                break
            best = (mpfr(tail), bound)
            if bound <= target / 2 or 2 * p + 2 >= len(fact) - 1:
                break
            p += 1
    tail, bound = best
    return mpfr(tail, bits), bound + Fraction(1, 1 << bits)


class RemainderSeries(NamedTuple):
    partial: object
    tail: object
    tail_bound: Fraction
    terms: int
    method: str

    @property
    def total(self):
        with precision(max(self.partial.precision, self.tail.precision)):
            return self.partial + self.tail


def _partial_sum(ri: RemainderIntegrand, n_max: int, bits: int):
    wp = bits + n_max.bit_length() + 8
    with precision(wp):
        s = mpfr(0)
        for n in range(1, n_max + 1):
            s += _closed_form(ri, n, wp)
    return mpfr(s, bits)


def remainder_series(nodes, n_max: int, policy: PrecisionPolicy = DEFAULT_POLICY,
                     tail: bool = True, tail_target=None) -> RemainderSeries:
    """sum_{n=1}^{n_max} of the remainder integrals, optionally plus a tail.

    Without ``tail`` the result is the raw partial sum and ``tail_bound`` is
    the domination bound on everything omitted.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ri = RemainderIntegrand.from_nodes(nodes)
    bits = policy.working_bits(len(ri.nodes))
    partial = _partial_sum(ri, n_max, bits)
    if not tail:
        return RemainderSeries(partial, mpfr(0, bits), domination_tail_bound(ri.nodes, n_max),
                               n_max, "truncated")
    target = Fraction(tail_target) if tail_target is not None else Fraction(1, 1 << bits)
    t, bound = _em_tail(ri, n_max, bits, target)
    return RemainderSeries(partial, t, bound, n_max, "euler-maclaurin")


def remainder_series_to(nodes, policy: PrecisionPolicy = DEFAULT_POLICY,
                        tail_target=Fraction(1, 10**12)) -> RemainderSeries:
    """Whole series to within ``tail_target``.

    Sums directly when the domination bound is met within DIRECT_MAX_TERMS
    terms; otherwise sums a fixed head and adds the Euler-Maclaurin tail.
    """
    nodes = check_nodes(nodes)
    target = Fraction(tail_target)
    n_dom = domination_terms_needed(nodes, target)
    if n_dom <= DIRECT_MAX_TERMS:
        s = remainder_series(nodes, n_dom, policy, tail=False)
        return s._replace(method="direct")
    n0 = max(128, policy.working_bits(len(nodes)) // 4)
    return remainder_series(nodes, n0, policy, tail=True, tail_target=target)
