"""Evaluators and residual reports for the conjectured binomial-transform limits.

Nothing here asserts that a conjectured limit holds. Each evaluator returns
its partial value and the residual against an independent reference, and
:func:`conjecture_report` turns a residual trail into an empirical status.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .bignum_core import (
    DEFAULT_POLICY,
    DomainError,
    PrecisionPolicy,
    as_rational,
    gamma_reference,
    is_exact,
    ln_pi_half_reference,
    precision,
    sign,
    to_big,
)
from .remainder import (
    check_nodes,
    remainder_series,
    remainder_series_to,
)
from .results import PartialResult
from .binomial_transform import TransformKernel, alt_binom_sum

SUPPORTED = "SUPPORTED"
INCONCLUSIVE = "INCONCLUSIVE"
REFUTED = "REFUTED-at-tolerance"


def check_nested_args(zs) -> tuple:
    zs = tuple(zs)
    if not zs:
        raise ValueError("need at least one z")
    for z in zs:
        if sign(z) <= 0:
            raise DomainError("every z must be > 0")
    return zs


def conj1_partial(zs, m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_k C(m,k) (-1)^(k+1) ln(1 + z1 ln(1 + z2 ... ln(1 + zn k)...)) / k.

    Compared against z1 z2 ... zn. With a single z the terms are formed
    exactly as in :func:`constants.remark2_single`, so the two agree bit
    for bit.
    """
    zs = check_nested_args(zs)
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.working_bits(m)
    with precision(bits):
        zb = [to_big(z, bits) for z in zs]
        terms = []
        for k in range(1, m + 1):
            inner = k
            for z in reversed(zb):
                arg = inner * z + 1
                if arg <= 0:
                    raise DomainError("nested logarithm argument must be > 0")
                inner = gmpy2.log(arg)
            terms.append(inner / k)
    value = alt_binom_sum(TransformKernel.of(terms), policy)
    with precision(bits):
        ref = mpfr(1)
        for z in zb:
            ref *= z
        return PartialResult(m, value, reference_error=ref - value)


def bessel_series(z, n_terms: int, bits: int):
    """sum_{n<n_terms} (-z)^n / (n!)^2 and the alternating tail bound.

    The bound (next term's magnitude, plus the final rounding) holds once
    terms decrease, i.e. when n_terms^2 > z.
    """
    z = as_rational(z) if is_exact(z) else z
    wp = bits + 2 * math.isqrt(max(0, math.ceil(float(z)))) * 2 + 24
    with precision(wp):
        zb = to_big(z, wp)
        term = mpfr(1)
        total = mpfr(0)
        for n in range(n_terms):
            total += term
            term = -term * zb / ((n + 1) * (n + 1))
        valid = n_terms * n_terms > float(z)
        out = mpfr(total, bits)
        return out, (abs(term) + abs(out) * mpfr(2) ** (1 - bits) if valid else None)


def conj2_reference(z, policy: PrecisionPolicy = DEFAULT_POLICY, m: int = 0):
    """sum_{n>=0} (-1)^n z^n / (n!)^2, summed until the tail is below 2^-bits."""
    if sign(z) < 0:
        raise DomainError("z must be >= 0")
    bits = policy.working_bits(m)
    eps = mpfr(2) ** (-bits)
    n = max(8, math.isqrt(math.ceil(float(to_big(z, 64)))) + 2)
    while True:
        value, bound = bessel_series(z, n, bits + 8)
        if bound is not None and bound < eps:
            return mpfr(value, bits)
        n *= 2


def conj2_partial(z, m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{n=1}^m C(m,n) (-1)^(n+1) / (z (n+1) + 1), read literally.

    Exact for rational z.
    """
    if sign(z) < 0:
        raise DomainError("z must be >= 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.working_bits(m)
    ref = conj2_reference(z, policy, m)
    if is_exact(z) or (isinstance(z, str) and "/" in z):
        z = as_rational(z)
        value = alt_binom_sum(TransformKernel.of(1 / (z * (n + 1) + 1) for n in range(1, m + 1)))
        with precision(bits):
            return PartialResult(m, value, reference_error=ref - to_big(value, bits))
    with precision(bits):
        zb = to_big(z, bits)
        terms = [1 / (zb * (n + 1) + 1) for n in range(1, m + 1)]
    value = alt_binom_sum(TransformKernel.of(terms), policy)
    with precision(bits):
        return PartialResult(m, value, reference_error=ref - value)


def double_factorial_ratios(m: int) -> list[Fraction]:
    """[k!! / (k-1)!! for k = 1..m] by r_k = k / r_{k-1}."""
    out = []
    r = Fraction(1)  # 0!! / (-1)!! taken as 1 so that r_1 = 1
    for k in range(1, m + 1):
        r = Fraction(k) / r
        out.append(r)
    return out


def conj3_weight(m: int) -> Fraction:
    """sum_{n=1}^m 2^(n-1) / n."""
    return sum((Fraction(2 ** (n - 1), n) for n in range(1, m + 1)), Fraction(0))


def conj3_partial(m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{k=1}^m C(m,k) (-1)^k ln(k!!/(k-1)!!) / (k W_m), W_m = sum 2^(n-1)/n.

    W_m divides every term, as written; compared against ln(pi/2).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.working_bits(m)
    w = conj3_weight(m)
    with precision(bits):
        wb = to_big(w, bits)
        terms = [-gmpy2.log(to_big(r, bits)) / (k * wb)
                 for k, r in enumerate(double_factorial_ratios(m), start=1)]
    value = alt_binom_sum(TransformKernel.of(terms), policy)
    with precision(bits):
        return PartialResult(m, value, reference_error=ln_pi_half_reference(bits) - value)


@dataclass(frozen=True)
class LagrangeWeights:
    nodes: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __getitem__(self, a: int) -> Fraction:
        return self.weights[self.nodes.index(a)]


def lagrange_weights(nodes) -> LagrangeWeights:
    """f(a_k) = prod_{n != k} a_n / (a_n - a_k), exactly."""
    nodes = check_nodes(nodes)
    weights = tuple(
        math.prod((Fraction(a, a - ak) for j, a in enumerate(nodes) if j != k), start=Fraction(1))
        for k, ak in enumerate(nodes))
    return LagrangeWeights(nodes, weights)


def conj4_finite_part(nodes, bits: int):
    """sum_n f(a_n) ln(a_n!) / a_n."""
    lw = lagrange_weights(nodes)
    wp = bits + max(abs(w).numerator.bit_length() for w in lw.weights) + 16
    with precision(wp):
        s = mpfr(0)
        for a, w in zip(lw.nodes, lw.weights):
            s += to_big(w / a, wp) * gmpy2.log(mpfr(math.factorial(a)))
    return mpfr(s, bits)


def conj4_partial(nodes, n_max: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """Finite part plus the first ``n_max`` remainder integrals (no tail).

    ``proven_bound`` bounds the omitted integrals.
    """
    nodes = check_nodes(nodes)
    bits = policy.working_bits(len(nodes))
    series = remainder_series(nodes, n_max, policy, tail=False)
    with precision(bits):
        value = conj4_finite_part(nodes, bits) + series.partial
        gamma = gamma_reference(bits)
        return PartialResult(n_max, value, proven_bound=to_big(series.tail_bound, 64),
                             reference_error=gamma - value)


def conj4_residual(nodes, policy: PrecisionPolicy = DEFAULT_POLICY,
                   tail_target=Fraction(1, 10**12)):
    """Finite part plus the whole remainder series, minus gamma."""
    nodes = check_nodes(nodes)
    bits = policy.working_bits(len(nodes))
    series = remainder_series_to(nodes, policy, tail_target)
    with precision(bits):
        return conj4_finite_part(nodes, bits) + series.total - gamma_reference(bits)


def y_k(k: int, policy: PrecisionPolicy = DEFAULT_POLICY, tail_target=Fraction(1, 10**12)):
    """sum_{n>=1} int_0^{1/n} dx / (1 + (k x)^-1), to within ``tail_target``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return remainder_series_to((k,), policy, tail_target).total


# -- evidence -----------------------------------------------------------------

@dataclass(frozen=True)
class ConjectureReport:
    conjecture: int
    label: str
    orders: tuple
    residuals: tuple
    status: str | None


def classify(residuals, tol, last_bound=None) -> str:
    """Empirical verdict on a residual trail.

    SUPPORTED when the last residual is within ``tol``. REFUTED-at-tolerance
    when the last residual exceeds ``tol`` by more than its error bound
    ``last_bound`` (if known), or when magnitudes stall or grow. Otherwise
    INCONCLUSIVE: still shrinking, not yet within tolerance.
    """
    mags = [abs(r) for r in residuals]
    if mags[-1] <= tol:
        return SUPPORTED
    if last_bound is not None and mags[-1] - last_bound > tol:
        return REFUTED
    if all(b < a for a, b in zip(mags, mags[1:])):
        return INCONCLUSIVE
    return REFUTED


def conjecture_report(cid: int, policy: PrecisionPolicy = DEFAULT_POLICY, *, zs=(1, 1), z=1,
                      nodes=(1, 2), orders=None, tol=Fraction(1, 10**6),
                      tail_target=Fraction(1, 10**12), k_max: int = 4) -> ConjectureReport:
    """Residual trail of one conjecture at increasing orders, with a status.

    Residuals are reference minus partial value. For id 4 the final
    entry ("all") includes the whole remainder series to ``tail_target``.
    Id 5 reports the y_k values only and carries no status.
    """
    last_bound = None
    if cid == 1:
        orders = orders or (10, 20, 40, 80)
        res = [conj1_partial(zs, m, policy).reference_error for m in orders]
        label = "z=" + ",".join(map(str, zs))
    elif cid == 2:
        orders = orders or (10, 20, 40, 80)
        res = [conj2_partial(z, m, policy).reference_error for m in orders]
        label = f"z={z}"
    elif cid == 3:
        orders = orders or (10, 20, 40, 80)
        res = [conj3_partial(m, policy).reference_error for m in orders]
        label = "ln(pi/2)"
    elif cid == 4:
        orders = orders or (10, 100, 1000)
        res = [conj4_partial(nodes, n, policy).reference_error for n in orders]
        r = conj4_residual(nodes, policy, tail_target)
        with precision(r.precision):
            res.append(-r)
        orders = tuple(orders) + ("all",)
        label = "nodes=" + ",".join(map(str, check_nodes(nodes)))
        last_bound = tail_target
    elif cid == 5:
        orders = tuple(range(1, k_max + 1))
        vals = tuple(y_k(k, policy, tail_target) for k in orders)
        return ConjectureReport(5, "y_k values", orders, vals, None)
    else:
        raise ValueError(f"unknown conjecture {cid}")
    return ConjectureReport(cid, label, tuple(orders), tuple(res), classify(res, tol, last_bound))
