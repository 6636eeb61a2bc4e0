"""Alternating binomial transform engine and exact combinatorial checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpfr

from .bignum_core import (
    DEFAULT_POLICY,
    DomainError,
    PrecisionPolicy,
    as_rational,
    binomial,
    binomial_row,
    harmonic,
    is_exact,
    precision,
    to_big,
)


@dataclass(frozen=True)
class TransformKernel:
    """Order ``m`` and the summand values f(1), ..., f(m)."""

    m: int
    terms: tuple

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("order m must be >= 1")
        if len(self.terms) != self.m:
            raise ValueError(f"expected {self.m} terms, got {len(self.terms)}")

    @classmethod
    def of(cls, terms: Sequence) -> "TransformKernel":
        terms = tuple(terms)
        return cls(len(terms), terms)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: object
    rhs: object

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self) -> bool:
        return self.equal


def alt_binom_sum(kernel: TransformKernel, policy: PrecisionPolicy = DEFAULT_POLICY):
    """sum_{k=1}^m C(m,k) (-1)^(k+1) f(k).

    Exact when every term is an int or Fraction; otherwise evaluated at
    ``policy.working_bits(m)``. Terms are added in ascending k.
    """
    m = kernel.m
    row = binomial_row(m)
    next(row)
    if all(is_exact(t) for t in kernel.terms):
        total = Fraction(0)
        for k, (c, f) in enumerate(zip(row, kernel.terms), start=1):
            total += c * f if k % 2 else -c * f
        return total
    with precision(policy.working_bits(m)):
        total = mpfr(0)
        for k, (c, f) in enumerate(zip(row, kernel.terms), start=1):
            if k % 2:
                total += c * f
            else:
                total -= c * f
    return total


def g_m(z, m: int):
    """m! / ((z+1)(z+2)...(z+m)); exact for rational z.

    A real ``z`` is evaluated at the calling thread's current precision.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if is_exact(z):
        z = Fraction(z)
        if z.denominator == 1 and -m <= z.numerator <= -1:
            raise DomainError(f"z = {z} is a pole of g_{m}")
        den = math.prod(z + i for i in range(1, m + 1))
        return math.factorial(m) / den
    if z < 0 and z == int(z) and -m <= int(z):
        raise DomainError(f"z = {z} is a pole of g_{m}")
    v = mpfr(1)
    for i in range(1, m + 1):
        v = v * i / (z + i)
    return v


def lemma7_check(m: int, z) -> IdentityCheck:
    """sum_{k=0}^m C(m,k) (-1)^k / (k+z) against g_m(z)/z, exactly."""
    z = as_rational(z)
    if z <= 0:
        raise DomainError("z must be > 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    lhs = Fraction(0)
    for k, c in enumerate(binomial_row(m)):
        lhs += Fraction(c if k % 2 == 0 else -c) / (k + z)
    return IdentityCheck(lhs, g_m(z, m) / z)


def lemma9_check(m: int, k: int) -> IdentityCheck:
    """C(m,k)/k against sum_{n=k}^m C(n,k)/n."""
    if not 1 <= k <= m:
        raise ValueError("need 1 <= k <= m")
    rhs = sum((Fraction(binomial(n, k), n) for n in range(k, m + 1)), Fraction(0))
    return IdentityCheck(Fraction(binomial(m, k), k), rhs)


def lemma10_check(j: int, n: int) -> IdentityCheck:
    """sum_{k=n}^j (-1)^(k+n) C(j,k) against C(j-1, n-1)."""
    if not 1 <= n <= j:
        raise ValueError("need 1 <= n <= j")
    lhs = sum(binomial(j, k) if (k + n) % 2 == 0 else -binomial(j, k)
              for k in range(n, j + 1))
    return IdentityCheck(lhs, binomial(j - 1, n - 1))


def uniform_bound(z0, m: int, bits: int | None = None):
    """1 / (z0^2 H_m), which dominates g_m(z)/z for every z >= z0.

    Exact for rational ``z0``; otherwise rounded to ``bits`` (default 53).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if is_exact(z0):
        z0 = Fraction(z0)
        if z0 <= 0:
            raise DomainError("z0 must be > 0")
        return 1 / (z0 * z0 * harmonic(m))
    bits = bits or 53
    with precision(bits + 16):
        z0 = to_big(z0, bits + 16)
        if z0 <= 0:
            raise DomainError("z0 must be > 0")
        v = 1 / (z0 * z0 * to_big(harmonic(m), bits + 16))
    return mpfr(v, bits)
