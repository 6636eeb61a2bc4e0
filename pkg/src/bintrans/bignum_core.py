"""Arbitrary-precision substrate: exact integers and rationals, mpfr reals,
the precision policy, and independently computed reference constants.

Exact values are plain ``int`` and :class:`fractions.Fraction`. Real values
are :class:`gmpy2.mpfr`, which carries its own precision in bits. gmpy2
contexts are thread-local, so every function here can run concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

Rational = Union[int, Fraction]
Real = Union[int, Fraction, str, float, "mpfr"]

LOG2_10 = math.log2(10)


class DomainError(ValueError):
    """An argument lies outside the domain where a formula holds."""


def precision(bits: int):
    """Context manager running mpfr arithmetic at ``bits`` bits (thread-local)."""
    return gmpy2.context(precision=bits)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_rational(x) -> Fraction:
    """Exact rational from an int, Fraction, float or ``p/q``/decimal literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, type(mpfr(0))):
        return Fraction(*x.as_integer_ratio())
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def to_big(x, bits: int):
    """Round ``x`` to an mpfr of ``bits`` bits.

    Strings of the form ``p/q`` are read exactly; other strings are parsed
    as decimal literals directly at the target precision.
    """
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator), bits)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            return to_big(Fraction(s), bits)
        return mpfr(s, bits)
    return mpfr(x, bits)


def sign(x) -> int:
    if isinstance(x, str):
        x = to_big(x, 64) if "/" not in x else Fraction(x)
    return (x > 0) - (x < 0)


# -- exact combinatorics ----------------------------------------------------

def binomial(m: int, k: int) -> int:
    """Exact binomial coefficient; zero when ``k`` lies outside ``[0, m]``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if k < 0 or k > m:
        return 0
    return math.comb(m, k)


def binomial_row(m: int):
    """Yield C(m, 0), ..., C(m, m) by the incremental ratio (m-k)/(k+1)."""
    c = 1
    for k in range(m + 1):
        yield c
        c = c * (m - k) // (k + 1)


def double_factorial(k: int) -> int:
    """k!! = k(k-2)(k-4)...; 0!! = 1!! = 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return math.prod(range(k, 0, -2))


def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, m + 1)), Fraction(0))


@lru_cache(maxsize=None)
def _tangent_numbers(n: int) -> tuple[int, ...]:
    # Brent-Harvey in-place recurrence; T[k] is the k-th tangent number.
    t = [0] * (n + 1)
    if n >= 1:
        t[1] = 1
    for k in range(2, n + 1):
        t[k] = (k - 1) * t[k - 1]
    for k in range(2, n + 1):
        for j in range(k, n + 1):
            t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
    return tuple(t)


def bernoulli_even(k: int) -> Fraction:
    """Exact Bernoulli number B_{2k} for k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = 16
    while n < k:
        n *= 2
    t = _tangent_numbers(n)[k]
    four_k = 1 << (2 * k)
    b = Fraction(2 * k * t, four_k * (four_k - 1))
    return b if k % 2 == 1 else -b


# -- precision policy ---------------------------------------------------------

@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision for an alternating binomial sum of order m.

    The terms of such a sum total about 2**m in magnitude while the result is
    O(1), so m extra bits are spent on cancellation on top of the guard bits.
    """

    target_bits: int = 53
    guard_bits: int = 64

    def __post_init__(self):
        if self.target_bits < 1 or self.guard_bits < 1:
            raise ValueError("target_bits and guard_bits must be positive")

    @classmethod
    def from_digits(cls, digits: int, guard_bits: int = 64) -> "PrecisionPolicy":
        if digits < 1:
            raise ValueError("digits must be >= 1")
        return cls(math.ceil(digits * LOG2_10) + 8, guard_bits)

    def working_bits(self, m: int) -> int:
        if m < 0:
            raise ValueError("m must be non-negative")
        return self.target_bits + m + self.guard_bits


def working_precision(policy: PrecisionPolicy, m: int) -> int:
    return policy.working_bits(m)


DEFAULT_POLICY = PrecisionPolicy()


# -- factored exact rationals -------------------------------------------------

def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of a positive integer by trial division."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FactoredRational:
    """Exact positive rational stored as prime exponents.

    Products with binomial exponents (C(40, 20) is about 1.4e11) are far too
    large to expand, but their prime exponent vectors stay small.
    """

    exponents: tuple[tuple[int, int], ...]

    @classmethod
    def from_powers(cls, powers) -> "FactoredRational":
        """Build from ``(base, exponent)`` pairs with rational positive bases."""
        acc: dict[int, int] = {}
        for base, e in powers:
            base = as_rational(base)
            if base <= 0:
                raise DomainError("bases must be positive")
            for p, v in factorize(base.numerator).items():
                acc[p] = acc.get(p, 0) + e * v
            if base.denominator != 1:
                for p, v in factorize(base.denominator).items():
                    acc[p] = acc.get(p, 0) - e * v
        return cls(tuple(sorted((p, e) for p, e in acc.items() if e)))

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        acc = dict(self.exponents)
        for p, e in other.exponents:
            acc[p] = acc.get(p, 0) + e
        return FactoredRational(tuple(sorted((p, e) for p, e in acc.items() if e)))

    def bit_size(self) -> float:
        return sum(abs(e) * math.log2(p) for p, e in self.exponents)

    def max_exponent_bits(self) -> int:
        return max((abs(e).bit_length() for _, e in self.exponents), default=0)

    def to_fraction(self, max_bits: float = 1 << 20) -> Fraction | None:
        """Expanded value, or None when it would exceed ``max_bits`` bits."""
        if self.bit_size() > max_bits:
            return None
        num = den = 1
        for p, e in self.exponents:
            if e > 0:
                num *= p**e
            else:
                den *= p ** (-e)
        return Fraction(num, den)

    def log(self, bits: int):
        """Natural log at ``bits`` bits, with guard for exponent cancellation."""
        wb = bits + self.max_exponent_bits() + len(self.exponents).bit_length() + 16
        with precision(wb):
            s = mpfr(0)
            for p, e in self.exponents:
                s += e * gmpy2.log(mpfr(p))
        return mpfr(s, bits)

    def to_big(self, bits: int):
        with precision(bits + 8):
            v = gmpy2.exp(self.log(bits + 8))
        return mpfr(v, bits)


# -- reference constants ------------------------------------------------------

@lru_cache(maxsize=256)
def gamma_reference(bits: int, n: int | None = None):
    """Euler's constant via Euler-Maclaurin correction of the harmonic sum.

    gamma = H_n - ln n - 1/(2n) + sum_k B_{2k} / (2k n^{2k}); the correction
    series is cut once its next term falls below 2**-(bits + 8), which bounds
    the truncation error for 1/x. ``n`` defaults to ``bits // 4``.
    """
    if bits < 16:
        raise ValueError("bits must be >= 16")
    if n is None:
        n = max(16, bits // 4)
    wb = bits + 32 + n.bit_length()
    eps = Fraction(1, 1 << (bits + 8))
    with precision(wb):
        h = mpfr(0)
        for i in range(1, n + 1):
            h += mpfr(1) / i
        g = h - gmpy2.log(mpfr(n)) - mpfr(1) / (2 * n)
        k = 1
        while True:
            term = bernoulli_even(k) / (2 * k * Fraction(n) ** (2 * k))
            g += to_big(term, wb)
            nxt = bernoulli_even(k + 1) / (2 * (k + 1) * Fraction(n) ** (2 * k + 2))
            if abs(nxt) < eps:
                break
            k += 1
            if k > 4 * n:
                raise RuntimeError("Euler-Maclaurin series did not reach target")
    return mpfr(g, bits)


_PI_FORMULAS = {
    # pi/4 = sum coeff * arctan(1/x)
    "machin": ((4, 5), (-1, 239)),
    "stormer": ((12, 49), (32, 57), (-5, 239), (12, 110443)),
}


def _arctan_inv_fixed(x: int, one: int) -> tuple[int, int]:
    """Fixed-point arctan(1/x) scaled by ``one``; returns (value, term_count).

    Each term is floored (error < 1 unit) and the alternating tail after the
    last nonzero term is below one unit, so |error| <= term_count + 1 units.
    """
    x2 = x * x
    power = one // x
    total = 0
    n = 0
    k = 1
    sgn = 1
    while power:
        total += sgn * (power // k)
        power //= x2
        k += 2
        sgn = -sgn
        n += 1
    return total, n


@lru_cache(maxsize=64)
def pi_reference(bits: int, formula: str = "machin"):
    """pi from a Machin-type arctangent formula in fixed-point integers."""
    if bits < 16:
        raise ValueError("bits must be >= 16")
    terms = _PI_FORMULAS[formula]
    guard = 32 + (bits // 2).bit_length()
    scale = bits + guard
    one = 1 << scale
    total = 0
    err_units = 0
    for coeff, x in terms:
        v, n = _arctan_inv_fixed(x, one)
        total += coeff * v
        err_units += abs(coeff) * (n + 1)
    if 4 * err_units >= 1 << (guard - 4):
        raise RuntimeError("insufficient guard bits for pi")
    return mpfr(mpq(4 * total, one), bits)


@lru_cache(maxsize=64)
def ln_pi_half_reference(bits: int, formula: str = "machin"):
    """ln(pi/2) from :func:`pi_reference`."""
    if bits < 16:
        raise ValueError("bits must be >= 16")
    with precision(bits + 16):
        v = gmpy2.log(pi_reference(bits + 16, formula) / 2)
    return mpfr(v, bits)
