"""Evaluation records, convergence tables and their CSV/JSON rendering."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context, Decimal, localcontext
from fractions import Fraction

from gmpy2 import mpfr

GUARD_DIGITS = 8
CSV_HEADER = ("m", "value", "abs_error", "bound")


@dataclass(frozen=True)
class PartialResult:
    """One evaluation of a partial sum or product.

    ``reference_error`` is always ``reference - value``.
    """

    order: int
    value: object
    exact_residual: Fraction | None = None
    proven_bound: object = None
    reference_error: object = None
    factors: tuple | None = None
    exact_form: object = None

    @property
    def abs_error(self):
        return None if self.reference_error is None else abs(self.reference_error)


def to_decimal(x, digits: int) -> Decimal:
    """Round ``x`` to ``digits`` significant decimal digits.

    The value is first produced with 8 guard digits (correctly rounded), and
    the final digit is then rounded half-even from those.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    wide = digits + GUARD_DIGITS
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        with localcontext(Context(prec=wide, rounding=ROUND_HALF_EVEN)):
            d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        x = mpfr(x)
        if x == 0:
            return Decimal(0)
        mant, exp, _ = x.digits(10, wide)
        neg = mant.startswith("-")
        d = Decimal(f"{'-' if neg else ''}0.{mant.lstrip('-')}E{exp}")
    return Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(d)


def render(x, digits: int) -> str | None:
    if x is None:
        return None
    return str(to_decimal(x, digits))


def render_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def trend(errors) -> str:
    """Classify a sequence of absolute errors."""
    errs = [e for e in errors if e is not None]
    if len(errs) < 2:
        return "undetermined"
    pairs = list(zip(errs, errs[1:]))
    if all(b < a for a, b in pairs):
        return "decreasing"
    if all(b > a for a, b in pairs):
        return "increasing"
    return "mixed"


@dataclass
class ConvergenceTable:
    formula: str
    reference: object
    parameter: str | None = None
    rows: list = field(default_factory=list)

    def __post_init__(self):
        orders = [r.order for r in self.rows]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise ValueError("rows must be strictly increasing in order")

    def trend(self) -> str:
        return trend(r.abs_error for r in self.rows)

    def records(self, digits: int) -> list[dict]:
        return [
            {
                "m": r.order,
                "value": render(r.value, digits),
                "abs_error": render(r.abs_error, digits),
                "bound": render(r.proven_bound, digits),
            }
            for r in self.rows
        ]

    def to_csv(self, digits: int) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec in self.records(digits):
            w.writerow(["" if rec[k] is None else rec[k] for k in CSV_HEADER])
        return buf.getvalue()

    def to_json(self, digits: int) -> str:
        doc = {
            "formula": self.formula,
            "parameter": self.parameter,
            "reference": render(self.reference, digits),
            "trend": self.trend(),
            "rows": self.records(digits),
        }
        return json.dumps(doc, indent=2) + "\n"


def read_csv(text: str) -> list[dict]:
    """Parse table CSV back into Decimal-valued rows."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({
            "m": int(rec["m"]),
            **{k: (Decimal(rec[k]) if rec[k] else None)
               for k in ("value", "abs_error", "bound")},
        })
    return rows
