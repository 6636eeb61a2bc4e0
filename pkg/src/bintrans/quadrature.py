"""Adaptive Gauss-Legendre quadrature in mpfr arithmetic.

Used as an oracle for the closed-form remainder integrals, so it never
touches partial fractions: it only samples the integrand.
"""
from __future__ import annotations

import math
from functools import lru_cache

from gmpy2 import mpfr

from .bignum_core import precision


@lru_cache(maxsize=32)
def gauss_legendre(n: int, bits: int) -> tuple[tuple, tuple]:
    """Nodes and weights of the n-point rule on [-1, 1], by Newton iteration."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    wp = bits + 16
    eps = mpfr(2) ** (-(bits + 4))
    xs, ws = [], []
    with precision(wp):
        for i in range(1, n // 2 + 1):
            x = mpfr(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
            for _ in range(200):
                p0, p1 = mpfr(1), x
                for j in range(1, n):
                    p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < eps:
                    break
            else:
                raise RuntimeError("Legendre root iteration did not converge")
            p0, p1 = mpfr(1), x
            for j in range(1, n):
                p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            xs += [x, -x]
            ws += [w, w]
    return tuple(xs), tuple(ws)


def _rule(f, a, b, xs, ws):
    half = (b - a) / 2
    mid = (a + b) / 2
    s = mpfr(0)
    for x, w in zip(xs, ws):
        s += w * f(mid + half * x)
    return s * half


def adaptive_quad(f, a, b, bits: int, tol, order: int = 32, max_depth: int = 48):
    """Integrate ``f`` over [a, b]; returns ``(value, error_estimate)``.

    An interval is accepted when its rule value and the sum over its two
    halves differ by at most its share of ``tol``; the summed differences
    form the (conservative) error estimate of the refined values.
    """
    xs, ws = gauss_legendre(order, bits)
    with precision(bits + 16):
        a, b, tol = mpfr(a), mpfr(b), mpfr(tol)
        stack = [(a, b, _rule(f, a, b, xs, ws), tol, 0)]
        total = mpfr(0)
        err = mpfr(0)
        while stack:
            lo, hi, coarse, t, depth = stack.pop()
            mid = (lo + hi) / 2
            left = _rule(f, lo, mid, xs, ws)
            right = _rule(f, mid, hi, xs, ws)
            diff = abs(left + right - coarse)
            if diff <= t or depth >= max_depth:
                total += left + right
                err += diff
            else:
                stack.append((mid, hi, right, t / 2, depth + 1))
                stack.append((lo, mid, left, t / 2, depth + 1))
    return mpfr(total, bits), mpfr(err, 53)
