"""Partial sums and products converging to 1, u, ln u and Euler's constant."""
from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .bignum_core import (
    DEFAULT_POLICY,
    DomainError,
    FactoredRational,
    PrecisionPolicy,
    as_rational,
    binomial_row,
    gamma_reference,
    harmonic,
    is_exact,
    precision,
    sign,
    to_big,
)
from .remainder import RemainderSeries, remainder_series, remainder_series_to
from .results import PartialResult
from .binomial_transform import TransformKernel, alt_binom_sum, g_m

# Expanded exact products larger than this are reported as mpfr only.
MAX_EXPANDED_BITS = 1 << 16


def _positive(u, name="u"):
    if sign(u) <= 0:
        raise DomainError(f"{name} must be > 0")


def _logs(n: int, bits: int) -> list:
    """[ln 1, ..., ln n] at ``bits`` bits; index 0 is unused."""
    with precision(bits):
        return [mpfr(0)] + [gmpy2.log(mpfr(i)) for i in range(1, n + 1)]


def thm1_partial(u, m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{k=1}^m C(m,k) (-1)^(k+1) / (k u + 1), which tends to 1.

    For rational u the sum is exact and ``exact_residual`` is g_m(1/u), so
    value + residual == 1 identically. ``proven_bound`` is u / H_m, from the
    uniform estimate g_m(z)/z < 1/(z^2 H_m).
    """
    _positive(u)
    if m < 1:
        raise ValueError("m must be >= 1")
    if is_exact(u) or (isinstance(u, str) and "/" in u):
        u = as_rational(u)
        value = alt_binom_sum(TransformKernel.of(1 / (k * u + 1) for k in range(1, m + 1)))
        residual = g_m(1 / u, m)
        return PartialResult(m, value, exact_residual=residual,
                             proven_bound=u / harmonic(m), reference_error=1 - value)
    bits = policy.working_bits(m)
    with precision(bits):
        u = to_big(u, bits)
        terms = [1 / (k * u + 1) for k in range(1, m + 1)]
        value = alt_binom_sum(TransformKernel.of(terms), policy)
        bound = u / to_big(harmonic(m), bits)
        return PartialResult(m, value, proven_bound=bound, reference_error=1 - value)


def _log_transform_terms(u, m: int, bits: int) -> list:
    with precision(bits):
        return [gmpy2.log(k * u + 1) / k for k in range(1, m + 1)]


def remark2_single(u, m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{k=1}^m C(m,k) (-1)^(k+1) ln(k u + 1) / k, which tends to u."""
    _positive(u)
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.working_bits(m)
    u = to_big(u, bits)
    value = alt_binom_sum(TransformKernel.of(_log_transform_terms(u, m, bits)), policy)
    with precision(bits):
        return PartialResult(m, value, reference_error=u - value)


def remark2_double(u, M: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{n=1}^M sum_{k=1}^n C(n,k) (-1)^(k+1) ln(k u + 1) / n.

    No tail estimate is attached; the outer truncation is reported raw.
    """
    _positive(u)
    if M < 1:
        raise ValueError("M must be >= 1")
    bits = policy.working_bits(M)
    with precision(bits):
        u = to_big(u, bits)
        logs = [None] + [gmpy2.log(k * u + 1) for k in range(1, M + 1)]
        total = mpfr(0)
        for n in range(1, M + 1):
            inner = mpfr(0)
            for k, c in enumerate(binomial_row(n)):
                if k == 0:
                    continue
                if k % 2:
                    inner += c * logs[k]
                else:
                    inner -= c * logs[k]
            total += inner / n
        return PartialResult(M, total, reference_error=u - total)


def remark2_single_weights(M: int) -> list[Fraction]:
    """Exact coefficient of ln(k u + 1), k = 1..M, in the single sum."""
    return [Fraction(c if k % 2 else -c, k) for k, c in enumerate(binomial_row(M)) if k]


def remark2_double_weights(M: int) -> list[Fraction]:
    """Exact coefficient of ln(k u + 1), k = 1..M, accumulated over the triangle k <= n <= M."""
    w = [Fraction(0)] * (M + 1)
    for n in range(1, M + 1):
        for k, c in enumerate(binomial_row(n)):
            if k:
                w[k] += Fraction(c if k % 2 else -c, n)
    return w[1:]


def _render_exact(f: FactoredRational, bits: int):
    exact = f.to_fraction(MAX_EXPANDED_BITS)
    return exact if exact is not None else f.to_big(bits)


def cor3_product_single(u, m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """prod_{k=1}^m (k + u)^(C(m,k) (-1)^(k+1)) for rational u; tends to u.

    The product is kept exactly as a prime exponent vector (``exact_form``);
    ``value`` is the expanded Fraction while that stays small, else an mpfr.
    """
    u = as_rational(u)
    _positive(u)
    if m < 1:
        raise ValueError("m must be >= 1")
    powers = [(k + u, c if k % 2 else -c) for k, c in enumerate(binomial_row(m)) if k]
    exact = FactoredRational.from_powers(powers)
    bits = policy.working_bits(m)
    value = _render_exact(exact, bits)
    with precision(bits):
        err = u - value if is_exact(value) else to_big(u, bits) - value
    return PartialResult(m, value, reference_error=err, exact_form=exact)


def cor3_factor(u, m: int) -> FactoredRational:
    """prod_{k=0}^m (k + u + 1)^(C(m,k) (-1)^k), the m-th factor of the double product."""
    u = as_rational(u)
    return FactoredRational.from_powers(
        (k + u + 1, -c if k % 2 else c) for k, c in enumerate(binomial_row(m)))


def cor3_product_double(u, M: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """prod_{m=0}^M of :func:`cor3_factor`, with the individual factors listed."""
    u = as_rational(u)
    _positive(u)
    if M < 0:
        raise ValueError("M must be >= 0")
    bits = policy.working_bits(M + 1)
    factors = [cor3_factor(u, m) for m in range(M + 1)]
    total = FactoredRational(())
    for f in factors:
        total = total * f
    value = _render_exact(total, bits)
    with precision(bits):
        err = u - value if is_exact(value) else to_big(u, bits) - value
    return PartialResult(M, value, reference_error=err, exact_form=total,
                         factors=tuple(_render_exact(f, bits) for f in factors))


def _ln_factorial_terms(m: int, bits: int) -> list:
    """[ln(k!)/k for k = 1..m], with ln k! accumulated from cached ln i."""
    logs = _logs(m, bits)
    out = []
    with precision(bits):
        acc = mpfr(0)
        for k in range(1, m + 1):
            acc += logs[k]
            out.append(acc / k)
    return out


def thm4_partial_signed(m: int, policy: PrecisionPolicy = DEFAULT_POLICY):
    """sum_{k=1}^m C(m,k) (-1)^(k+1) ln(k!) / k, which tends to -gamma."""
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.working_bits(m)
    return alt_binom_sum(TransformKernel.of(_ln_factorial_terms(m, bits)), policy)


def thm4_partial(m: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{k=1}^m C(m,k) (-1)^k ln(k!) / k, which tends to gamma from below.

    For m >= 2 the error gamma - value lies in (0, 2 gamma / (m+1)); the
    bound constant is the m = 1 remainder series, which equals gamma.
    """
    bits = policy.working_bits(m)
    signed = thm4_partial_signed(m, policy)
    gamma = gamma_reference(bits)
    with precision(bits):
        value = -signed
        bound = 2 * gamma / (m + 1) if m >= 2 else None
        return PartialResult(m, value, proven_bound=bound, reference_error=gamma - value)


def gamma_remainder_series(m: int, j_max: int, policy: PrecisionPolicy = DEFAULT_POLICY,
                           tail: bool = True) -> RemainderSeries:
    """S_m = sum_{j>=1} int_0^{1/j} g_m(1/u) du, truncated at ``j_max``.

    g_m(1/u) = prod_{k=1}^m k u / (1 + k u), so each term is the remainder
    integral on nodes 1..m. With ``tail`` an Euler-Maclaurin estimate of
    the terms beyond ``j_max`` is included.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return remainder_series(range(1, m + 1), j_max, policy, tail=tail)


def gamma_remainder_total(m: int, policy: PrecisionPolicy = DEFAULT_POLICY,
                          tail_target=Fraction(1, 10**12)) -> RemainderSeries:
    """S_m to within ``tail_target``, truncation chosen from the tail bounds."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return remainder_series_to(range(1, m + 1), policy, tail_target)


def cor5_partial(J: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PartialResult:
    """sum_{j=1}^J sum_{i=1}^j C(j-1, i-1) (-1)^i ln(i) / j, which tends to gamma."""
    if J < 1:
        raise ValueError("J must be >= 1")
    bits = policy.working_bits(J)
    logs = _logs(J, bits)
    with precision(bits):
        total = mpfr(0)
        for j in range(1, J + 1):
            inner = mpfr(0)
            for i, c in enumerate(binomial_row(j - 1), start=1):
                if i % 2:
                    inner -= c * logs[i]
                else:
                    inner += c * logs[i]
            total += inner / j
        gamma = gamma_reference(bits)
        return PartialResult(J, total, reference_error=gamma - total)
