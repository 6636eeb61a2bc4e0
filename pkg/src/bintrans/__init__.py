"""Binomial-transform series for 1, u, ln u and Euler's constant, computed
in exact and arbitrary-precision arithmetic, with convergence tables and an
empirical harness for the conjectured limits."""

from .bignum_core import (
    DomainError,
    FactoredRational,
    PrecisionPolicy,
    binomial,
    double_factorial,
    gamma_reference,
    ln_pi_half_reference,
    pi_reference,
    working_precision,
)
from .constants import (
    cor3_product_double,
    cor3_product_single,
    cor5_partial,
    gamma_remainder_series,
    remark2_double,
    remark2_single,
    thm1_partial,
    thm4_partial,
)
from .conjectures import (
    conj1_partial,
    conj2_partial,
    conj2_reference,
    conj3_partial,
    conj4_residual,
    lagrange_weights,
    y_k,
)
from .remainder import remainder_integral
from .results import ConvergenceTable, PartialResult
from .binomial_transform import (
    TransformKernel,
    alt_binom_sum,
    g_m,
    lemma7_check,
    lemma9_check,
    lemma10_check,
    uniform_bound,
)

__version__ = "0.1.0"
