"""Command-line front end.

    bintrans eval --formula thm4 --m 100 --digits 15
    bintrans converge --formula thm4 --m-min 2 --m-max 200 --step 2 --format csv
    bintrans verify lemmas --max 50
    bintrans verify theorems --max-m 100 --bits 256
    bintrans verify conjectures --id 4 --nodes 1,2

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

from . import conjectures as cj
from . import constants as cs
from .bignum_core import (
    DomainError,
    PrecisionPolicy,
    gamma_reference,
    ln_pi_half_reference,
    precision,
    to_big,
)
from .remainder import RemainderIntegrand, remainder_series, remainder_series_to
from .results import (
    ConvergenceTable,
    PartialResult,
    render,
    render_fraction,
)
from .binomial_transform import (
    alt_binom_sum,
    lemma7_check,
    lemma9_check,
    lemma10_check,
    TransformKernel,
)

FORMULAS = ("thm1", "remark2a", "remark2b", "cor3a", "cor3b", "thm4", "cor5",
            "conj1", "conj2", "conj3", "conj4", "y")
NEEDS_U = {"thm1", "remark2a", "remark2b", "cor3a", "cor3b"}
RATIONAL_U = {"cor3a", "cor3b"}
NEEDS_Z = {"conj1", "conj2"}
KNOWN_FACTORS = {
    1: ("2/1", "2/3", "8/9", "128/135"),
    2: ("3/1", "3/4", "15/16", "125/128"),
    3: ("4/1", "4/5", "24/25", "864/875"),
}

_INT = re.compile(r"[+-]?\d+$")


class UsageError(ValueError):
    pass


def parse_number(s: str):
    """``p/q`` and integer literals are exact; anything else stays a decimal string."""
    s = s.strip()
    try:
        if "/" in s or _INT.match(s):
            return Fraction(s)
        to_big(s, 53)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {s!r}")
    return s


def parse_list(s: str, conv):
    try:
        return tuple(conv(p) for p in s.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"bad list: {s!r}")


def _arg(conv):
    """Wrap a converter so argparse reports its message verbatim."""
    def f(s):
        try:
            return conv(s)
        except UsageError as e:
            raise argparse.ArgumentTypeError(str(e))
    f.__name__ = conv.__name__
    return f


@dataclass(frozen=True)
class RunConfig:
    formula: str
    u: object = None
    z: tuple = ()
    nodes: tuple = ()
    k: int | None = None
    digits: int = 20
    bits: int | None = None
    guard: int = 64
    fmt: str = "plain"
    tail_target: Fraction = Fraction(1, 10**12)

    @property
    def policy(self) -> PrecisionPolicy:
        if self.bits is not None:
            return PrecisionPolicy(self.bits, self.guard)
        return PrecisionPolicy.from_digits(self.digits, self.guard)

    @property
    def parameter(self) -> str | None:
        if self.formula in NEEDS_U:
            return f"u={self.u}"
        if self.formula in NEEDS_Z:
            return "z=" + ",".join(map(str, self.z))
        if self.formula == "conj4":
            return "nodes=" + ",".join(map(str, self.nodes))
        if self.formula == "y":
            return f"k={self.k}"
        return None

    def validate(self):
        if self.digits < 1:
            raise UsageError("digits must be >= 1")
        if self.bits is not None and self.bits < 16:
            raise UsageError("bits must be >= 16")
        f = self.formula
        if f in NEEDS_U:
            if self.u is None:
                raise UsageError(f"{f} needs --u")
            if f in RATIONAL_U:
                try:
                    Fraction(str(self.u))
                except ValueError:
                    raise UsageError("u must be rational (p/q or a decimal literal)")
        if f in NEEDS_Z and not self.z:
            raise UsageError(f"{f} needs --z")
        if f == "conj2" and len(self.z) != 1:
            raise UsageError("conj2 takes a single z")
        if f == "conj4":
            if not self.nodes:
                raise UsageError("conj4 needs --nodes")
            try:
                cj.check_nodes(self.nodes)
            except ValueError as e:
                raise UsageError(str(e))
        if f == "y" and (self.k is None or self.k < 1):
            raise UsageError("y needs --k >= 1")


def evaluate(cfg: RunConfig, m: int | None) -> PartialResult:
    """One evaluation; ``m`` is the order (or truncation for conj4 and y)."""
    f, pol = cfg.formula, cfg.policy
    if m is None and f not in ("conj4", "y"):
        raise UsageError(f"{f} needs --m")
    lo = 0 if f == "cor3b" else 1
    if m is not None and m < lo:
        raise UsageError(f"m must be >= {lo}")
    if f == "thm1":
        return cs.thm1_partial(cfg.u, m, pol)
    if f == "remark2a":
        return cs.remark2_single(cfg.u, m, pol)
    if f == "remark2b":
        return cs.remark2_double(cfg.u, m, pol)
    if f == "cor3a":
        return cs.cor3_product_single(cfg.u, m, pol)
    if f == "cor3b":
        return cs.cor3_product_double(cfg.u, m, pol)
    if f == "thm4":
        return cs.thm4_partial(m, pol)
    if f == "cor5":
        return cs.cor5_partial(m, pol)
    if f == "conj1":
        return cj.conj1_partial(cfg.z, m, pol)
    if f == "conj2":
        return cj.conj2_partial(cfg.z[0], m, pol)
    if f == "conj3":
        return cj.conj3_partial(m, pol)
    if f == "conj4":
        if m is not None:
            return cj.conj4_partial(cfg.nodes, m, pol)
        bits = pol.working_bits(len(cfg.nodes))
        series = remainder_series_to(cfg.nodes, pol, cfg.tail_target)
        with precision(bits):
            value = cj.conj4_finite_part(cfg.nodes, bits) + series.total
            return PartialResult(series.terms, value, proven_bound=to_big(series.tail_bound, 64),
                                 reference_error=gamma_reference(bits) - value)
    if f == "y":
        if m is not None:
            s = remainder_series((cfg.k,), m, pol, tail=False)
            return PartialResult(m, s.partial, proven_bound=to_big(s.tail_bound, 64))
        s = remainder_series_to((cfg.k,), pol, cfg.tail_target)
        return PartialResult(s.terms, s.total, proven_bound=to_big(s.tail_bound, 64))
    raise UsageError(f"unknown formula {f}")


def reference_value(cfg: RunConfig):
    bits = cfg.policy.working_bits(0)
    f = cfg.formula
    with precision(bits):
        if f == "thm1":
            return 1
        if f in NEEDS_U:
            return cfg.u if isinstance(cfg.u, Fraction) else to_big(cfg.u, bits)
        if f in ("thm4", "cor5", "conj4"):
            return gamma_reference(bits)
        if f == "conj1":
            p = to_big(1, bits)
            for z in cfg.z:
                p *= to_big(z, bits)
            return p
        if f == "conj2":
            return cj.conj2_reference(cfg.z[0], cfg.policy)
        if f == "conj3":
            return ln_pi_half_reference(bits)
    return None


# -- rendering ------------------------------------------------------------------

def _fmt_exact(x):
    return render_fraction(x) if isinstance(x, Fraction) else None


def result_record(cfg: RunConfig, r: PartialResult) -> dict:
    d = cfg.digits
    rec = {
        "formula": cfg.formula,
        "parameter": cfg.parameter,
        "m": r.order,
        "value": render(r.value, d),
        "abs_error": render(r.abs_error, d),
        "bound": render(r.proven_bound, d),
    }
    if isinstance(r.value, Fraction):
        rec["exact_value"] = render_fraction(r.value)
    if r.exact_residual is not None:
        rec["exact_residual"] = render_fraction(r.exact_residual)
    if r.factors is not None:
        rec["factors"] = [_fmt_exact(f) or render(f, d) for f in r.factors]
    return rec


def render_result(cfg: RunConfig, r: PartialResult) -> str:
    rec = result_record(cfg, r)
    if cfg.fmt == "json":
        return json.dumps(rec, indent=2) + "\n"
    if cfg.fmt == "csv":
        table = ConvergenceTable(cfg.formula, None, cfg.parameter, [r])
        return table.to_csv(cfg.digits)
    lines = []
    for key, val in rec.items():
        if val is None:
            continue
        if isinstance(val, list):
            val = " ".join(val)
        lines.append(f"{key:<15}{val}")
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------

def cmd_eval(args) -> int:
    cfg = _config(args)
    out = render_result(cfg, evaluate(cfg, args.m))
    sys.stdout.write(out)
    return 0


def build_table(cfg: RunConfig, m_min: int, m_max: int, step: int, jobs: int = 1) -> ConvergenceTable:
    if step < 1:
        raise UsageError("step must be >= 1")
    if m_min > m_max:
        raise UsageError("empty range: m-min > m-max")
    if m_min < (0 if cfg.formula == "cor3b" else 1):
        raise UsageError("m-min out of range")
    orders = range(m_min, m_max + 1, step)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(lambda m: evaluate(cfg, m), orders))
    else:
        rows = [evaluate(cfg, m) for m in orders]
    return ConvergenceTable(cfg.formula, reference_value(cfg), cfg.parameter, rows)


def cmd_converge(args) -> int:
    cfg = _config(args)
    if cfg.fmt == "plain":
        cfg = replace(cfg, fmt="csv")
    table = build_table(cfg, args.m_min, args.m_max, args.step, args.jobs)
    text = table.to_json(cfg.digits) if cfg.fmt == "json" else table.to_csv(cfg.digits)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.fmt == "csv":
        print(f"trend: {table.trend()}", file=sys.stderr)
    return 0


class _Report:
    def __init__(self):
        self.failed = 0

    def line(self, ok: bool, name: str, detail: str):
        self.failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")

    @property
    def code(self) -> int:
        return 1 if self.failed else 0


def verify_lemmas(n_max: int, rep: _Report):
    t = time.perf_counter()
    zs = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 7), Fraction(10))
    bad = [(m, z) for m in range(1, n_max + 1) for z in zs if not lemma7_check(m, z)]
    rep.line(not bad, "lemma7", f"{n_max * len(zs)} cases, m <= {n_max}, z in 1,2,1/2,3/7,10"
             + (f"; failures {bad[:3]}" if bad else ""))
    bad = [(m, k) for m in range(1, n_max + 1) for k in range(1, m + 1) if not lemma9_check(m, k)]
    rep.line(not bad, "lemma9", f"all 1 <= k <= m <= {n_max}" + (f"; failures {bad[:3]}" if bad else ""))
    bad = [(j, n) for j in range(1, n_max + 1) for n in range(1, j + 1) if not lemma10_check(j, n)]
    rep.line(not bad, "lemma10", f"all 1 <= n <= j <= {n_max}" + (f"; failures {bad[:3]}" if bad else ""))
    bad = [m for m in range(1, n_max + 1)
           if alt_binom_sum(TransformKernel.of([1] * m)) != 1]
    rep.line(not bad, "alternating binomial sum of ones", f"equals 1 for m <= {n_max}")
    print(f"# lemmas verified in {time.perf_counter() - t:.2f} s")


def verify_theorems(max_m: int, bits: int, rep: _Report):
    pol = PrecisionPolicy(bits)
    us = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(7, 3))
    bad = []
    for u in us:
        for m in range(1, max_m + 1):
            r = cs.thm1_partial(u, m)
            if r.value + r.exact_residual != 1 or not r.exact_residual < r.proven_bound:
                bad.append((u, m))
    rep.line(not bad, "thm1 residual identity",
             f"value + g_m(1/u) == 1 and g_m(1/u) < u/H_m for m <= {max_m}, u in 1,2,1/2,3,7/3")
    bad = []
    for m in range(2, max_m + 1):
        r = cs.thm4_partial(m, pol)
        if not 0 < r.reference_error < r.proven_bound:
            bad.append(m)
    rep.line(not bad, "thm4 sandwich",
             f"0 < gamma - value < 2 gamma/(m+1) for 2 <= m <= {max_m} at {bits} bits"
             + (f"; failures {bad[:5]}" if bad else ""))
    ok = all(tuple(render_fraction(f) for f in cs.cor3_product_double(u, 3).factors) == want
             for u, want in KNOWN_FACTORS.items())
    rep.line(ok, "cor3 factors", "u = 1, 2, 3 factors for m = 0..3 match the displayed rationals")
    ok = all((cs.cor3_product_double(u, M - 1).exact_form
              == cs.cor3_product_single(u, M).exact_form)
             for u in (Fraction(1), Fraction(5, 2)) for M in range(1, 13))
    rep.line(ok, "cor3 single/double", "double product to M-1 equals single product at M exactly, M <= 12")
    s1 = cs.gamma_remainder_total(1, pol, Fraction(1, 2**bits))
    g = gamma_reference(pol.working_bits(1))
    with precision(pol.working_bits(1)):
        diff = abs(s1.total - g)
    ok = diff <= 2 * s1.tail_bound + Fraction(1, 2**bits)
    rep.line(ok, "S_1 = gamma", f"|S_1 - gamma| = {render(diff, 3)}")


def verify_conjectures(args, rep: _Report):
    pol = PrecisionPolicy(args.bits)
    bad = [m for m in range(1, 51) if cj.conj2_partial(0, m, pol).value != 1]
    rep.line(not bad, "conj2 anchor", "z = 0 sum equals 1 exactly for m <= 50")
    nodes = args.nodes
    lw = cj.lagrange_weights(nodes)
    ri = RemainderIntegrand.from_nodes(nodes)
    rep.line(sum(lw.weights) == 1, "lagrange weights", f"sum to 1 on nodes {','.join(map(str, nodes))}")
    rep.line(all(c == -w for c, w in zip(ri.coeffs, lw.weights)), "partial fractions",
             "residue coefficients equal minus the weights")
    ids = (args.id,) if args.id else (1, 2, 3, 4, 5)
    tol = Fraction(args.tol)
    for cid in ids:
        r = cj.conjecture_report(cid, pol, zs=args.zs, z=args.z, nodes=nodes, tol=tol)
        trail = "  ".join(f"{o}: {render(v, 6)}" for o, v in zip(r.orders, r.residuals))
        if r.status is None:
            print(f"conjecture {cid} [{r.label}] {trail}")
        else:
            print(f"conjecture {cid} [{r.label}] {r.status}  residuals {trail}")


def cmd_verify(args) -> int:
    rep = _Report()
    if args.scope == "lemmas":
        verify_lemmas(args.max, rep)
    elif args.scope == "theorems":
        verify_theorems(args.max_m, args.bits, rep)
    else:
        verify_conjectures(args, rep)
    return rep.code


# -- argument parsing -----------------------------------------------------------

def _config(args) -> RunConfig:
    cfg = RunConfig(
        formula=args.formula,
        u=args.u,
        z=args.z or (),
        nodes=args.nodes or (),
        k=args.k,
        digits=args.digits,
        bits=args.bits,
        guard=args.guard,
        fmt=args.format,
        tail_target=Fraction(args.tail_target),
    )
    cfg.validate()
    return cfg


def _add_formula_args(p):
    p.add_argument("--formula", required=True, choices=FORMULAS)
    p.add_argument("--u", type=_arg(parse_number), help="u as p/q, integer or decimal")
    p.add_argument("--z", type=_arg(lambda s: parse_list(s, parse_number)),
                   help="z (conj2) or z1,...,zn (conj1)")
    p.add_argument("--nodes", type=_arg(lambda s: parse_list(s, int)), help="distinct positive integers")
    p.add_argument("--k", type=int, help="index for y")
    p.add_argument("--digits", type=int, default=20)
    p.add_argument("--bits", type=int, help="target bits (overrides --digits)")
    p.add_argument("--guard", type=int, default=64)
    p.add_argument("--tail-target", default="1e-12")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bintrans", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one partial sum or product")
    _add_formula_args(p)
    p.add_argument("--m", type=int, help="order (truncation N for conj4 and y)")
    p.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("converge", help="convergence table over a range of orders")
    _add_formula_args(p)
    p.add_argument("--m-min", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", help="exact sweeps, theorem checks, conjecture status")
    p.add_argument("scope", choices=("lemmas", "theorems", "conjectures"))
    p.add_argument("--max", type=int, default=50, help="sweep bound for lemmas")
    p.add_argument("--max-m", type=int, default=100)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--id", type=int, choices=(1, 2, 3, 4, 5))
    p.add_argument("--nodes", type=_arg(lambda s: parse_list(s, int)), default=(1, 2))
    p.add_argument("--zs", type=_arg(lambda s: parse_list(s, parse_number)), default=(1, 1))
    p.add_argument("--z", type=_arg(parse_number), default=Fraction(1))
    p.add_argument("--tol", default="1e-6")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
