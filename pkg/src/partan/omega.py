"""Crude-form expressions, the Omega operator and checks of its elimination rules.

An expression is a sum of products; each product is a monomial prefactor
times factors of three shapes: a monomial, ``1 + m``, or ``1/(1 - m)``.
Expansion goes through :func:`partan.series.expand_product`, so
``lambda`` exponents of any sign are carried until :func:`omega_ge`
deletes the terms with a negative ``lambda`` exponent and sets the
``lambda`` variables to 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .partitions import (
    ALL, G1, G1P, G2, G2P, P1, P1P, P2, P2P, FamilySpec, Tag, brute_refined,
)
from .report import Report, compare_sides
from .series import (
    LaurentPoly, Monomial, TruncationContext, expand_product,
)


class Kind(Enum):
    MONO = "mono"
    ONE_PLUS = "one_plus"
    GEOM_INV = "geom_inv"


@dataclass(frozen=True)
class Factor:
    kind: Kind
    m: Monomial

    @classmethod
    def mono(cls, m):
        return cls(Kind.MONO, m)

    @classmethod
    def one_plus(cls, m):
        return cls(Kind.ONE_PLUS, m)

    @classmethod
    def geom_inv(cls, m):
        return cls(Kind.GEOM_INV, m)


@dataclass(frozen=True)
class ProductExpr:
    prefactor: Monomial
    factors: tuple[Factor, ...] = ()

    def __mul__(self, other: ProductExpr) -> ProductExpr:
        return ProductExpr(self.prefactor * other.prefactor, self.factors + other.factors)

    def expand(self, ctx: TruncationContext) -> LaurentPoly:
        pre = self.prefactor
        binomials, geometric = [], []
        for f in self.factors:
            if f.kind is Kind.MONO:
                pre = pre * f.m
            elif f.kind is Kind.ONE_PLUS:
                binomials.append(f.m)
            else:
                geometric.append(f.m)
        return expand_product(ctx, pre, binomials, geometric)


@dataclass(frozen=True)
class SumExpr:
    terms: tuple[ProductExpr, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, prefactor: Monomial, *factors: Factor) -> SumExpr:
        return cls((ProductExpr(prefactor, tuple(factors)),))

    def __add__(self, other: SumExpr) -> SumExpr:
        return SumExpr(self.terms + other.terms)

    def __mul__(self, other: SumExpr) -> SumExpr:
        return SumExpr(tuple(a * b for a in self.terms for b in other.terms))


def expand_expr(e: SumExpr, ctx: TruncationContext) -> LaurentPoly:
    out = LaurentPoly.zero(ctx)
    for t in e.terms:
        out = out + t.expand(ctx)
    return out


def chi_block(x: Monomial, lam: Monomial, k: int) -> SumExpr:
    """``(1 + x lam^(1-k)) / (1 - x^2 lam^2)``, i.e. ``sum_n x^n lam^(n - k chi(n))``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return SumExpr.of(
        Monomial((0,) * len(x.exps)),
        Factor.one_plus(x * lam ** (1 - k)),
        Factor.geom_inv(x**2 * lam**2),
    )


def omega_ge(p: LaurentPoly) -> LaurentPoly:
    """Drop terms with a negative exponent on any lambda variable, then set lambdas to 1."""
    ctx = p.ctx
    lam_idx = [i for i, v in enumerate(ctx.vars) if v in ctx.lambdas]
    keep = [i for i in range(ctx.nvars) if i not in lam_idx]
    out_ctx = ctx.without_lambdas()
    terms: dict[tuple[int, ...], int] = {}
    for e, c in p.terms.items():
        if any(e[i] < 0 for i in lam_idx):
            continue
        f = tuple(e[i] for i in keep)
        terms[f] = terms.get(f, 0) + c
    return LaurentPoly(out_ctx, terms)


# --- elimination rules -------------------------------------------------------

RULE_NAMES = ("BASE", "R0", "R01", "R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "CHI")


@dataclass(frozen=True)
class RuleId:
    name: str
    param: int | None = None

    def __post_init__(self):
        if self.name not in RULE_NAMES:
            raise ValueError(f"unknown rule {self.name}")
        if self.name in ("BASE", "CHI") and (self.param is None or self.param < 0):
            raise ValueError(f"{self.name} needs a non-negative parameter")

    def __str__(self):
        return self.name if self.param is None else f"{self.name}({self.param})"


ALL_RULES = tuple(RuleId(n) for n in RULE_NAMES if n not in ("BASE", "CHI"))


def rule_context(order: int) -> TruncationContext:
    return TruncationContext.build(("x", "y", "z", "w", "l"), order, lambdas=("l",))


def _rule_sides(r: RuleId, ctx: TruncationContext) -> tuple[SumExpr, SumExpr]:
    """(argument of Omega, closed form) for each rule."""
    one = ctx.one()
    G, O = Factor.geom_inv, Factor.one_plus
    x, y, z, w, l = (ctx.var(v) for v in "xyzwl")
    den = (G(x), G(x * y))
    name = r.name
    if name == "BASE":
        A = r.param
        return (SumExpr.of(l ** -A, G(x * l), G(y / l)), SumExpr.of(x**A, *den))
    if name == "R0":
        return (SumExpr.of(l**-2, O(z / l), G(x * l**2), G(y / l**2)),
                SumExpr.of(x, O(x * z), *den))
    if name == "R01":
        return (SumExpr.of(l**-2, O(z * l), G(x * l**2), G(y / l**2)),
                SumExpr.of(x, O(z), *den))
    if name == "R1":
        return (SumExpr.of(l**-1, O(z * l), G(x * l**2), G(y / l**2)),
                SumExpr.of(x, *den) + SumExpr.of(z, *den))
    if name == "R2":
        return (SumExpr.of(l**-1, G(x * l), G(y / l**2)),
                SumExpr.of(x, G(x), G(x**2 * y)))
    if name == "R3":
        return (SumExpr.of(l**-1, G(x * l**2), G(y / l)),
                SumExpr.of(x, O(y), G(x), G(x * y**2)))
    if name == "R4":
        return (SumExpr.of(one, O(z * l), G(x * l**2), G(y / l**2)),
                SumExpr.of(one, O(z), *den))
    if name == "R5":
        return (SumExpr.of(one, G(x * l), G(y / l**2)),
                SumExpr.of(one, G(x), G(x**2 * y)))
    if name == "R6":
        return (SumExpr.of(one, G(x * l**2), G(y / l)),
                SumExpr.of(one, O(x * y), G(x), G(x * y**2)))
    if name == "R7":
        return (SumExpr.of(one, O(z / l**4), G(x * l), G(y / l**2)),
                SumExpr.of(one, O(x**4 * z), G(x), G(x**2 * y)))
    if name == "R8":
        return (SumExpr.of(one, O(w * l), O(z / l**4), G(x * l**2), G(y / l**2)),
                SumExpr.of(one, O(w), O(x**2 * z), *den))
    if name == "R9":
        return (SumExpr.of(one, O(w / l**2), O(z / l), G(x * l**2), G(y / l**2)),
                SumExpr.of(one, O(w * x), O(x * z), *den))
    raise ValueError(f"no sides for {r}")


def _chi_direct(k: int, ctx: TruncationContext) -> LaurentPoly:
    terms = {}
    for n in range(ctx.order + 1):
        e = ctx.mono(x=n, l=n - k * (n % 2)).exps
        terms[e] = 1
    return LaurentPoly(ctx, terms)


def _zero_vars(p: LaurentPoly, names: Sequence[str]) -> LaurentPoly:
    idx = [p.ctx.index(v) for v in names]
    return LaurentPoly(p.ctx, {e: c for e, c in p.terms.items() if not any(e[i] for i in idx)})


def check_rule(r: RuleId, order: int, zero: Sequence[str] = ()) -> Report:
    """Compare Omega of a rule's argument with its closed form up to ``order``.

    Every parameter variable gets weight 1 and ``lambda`` weight 0.
    ``zero`` specialises the listed parameter variables to 0 on both sides.
    CHI(k) compares the two-term closed form with the direct sum
    ``sum_n x^n lambda^(n - k chi(n))`` (no Omega involved).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    t0 = time.perf_counter()
    ctx = rule_context(order)
    params: dict = {"rule": str(r)}
    if zero:
        params["zero"] = sorted(zero)
    if r.name == "CHI":
        lhs = expand_expr(chi_block(ctx.var("x"), ctx.var("l"), r.param), ctx)
        rhs = _chi_direct(r.param, ctx)
        sides = {"closed_form": lhs, "direct_sum": rhs}
    else:
        arg, closed = _rule_sides(r, ctx)
        lhs = omega_ge(expand_expr(arg, ctx))
        rhs = omega_ge(expand_expr(closed, ctx))
        if zero:
            lhs, rhs = _zero_vars(lhs, zero), _zero_vars(rhs, zero)
        sides = {"omega": lhs, "closed_form": rhs}
    return compare_sides(f"rule:{r}", params, order, sides, t0)


def check_base_rule(order: int, amax: int = 6) -> Report:
    """BASE for every A in 0..amax, collapsed into one report."""
    t0 = time.perf_counter()
    for A in range(amax + 1):
        rep = check_rule(RuleId("BASE", A), order)
        if rep.status != "pass":
            rep.params["A"] = A
            return rep
    return Report("rule:BASE", {"rule": "BASE", "A": list(range(amax + 1))}, order,
                  "pass", None, int((time.perf_counter() - t0) * 1000))


# --- crude forms ---------------------------------------------------------------

@dataclass(frozen=True)
class _Constraints:
    """Gap-condition encoding of a family.

    scale(pos): parts at ``pos`` are ``scale * a`` (2 forces evenness);
    gap: constant slack subtracted on each consecutive constraint;
    chi: (``'self'`` | ``'next'``, k) -- an odd part pays k extra on its own
    constraint or on the preceding one; min_last: smallest admissible last part
    in exact-length mode.
    """
    even_positions: int | None
    gap: int
    chi: tuple[str, int] | None
    min_last: int

    def scale(self, pos: int) -> int:
        if self.even_positions is None:
            return 1
        return 2 if pos % 2 == self.even_positions else 1


_CONSTRAINTS = {
    Tag.ALL: _Constraints(None, 0, None, 1),
    Tag.G1: _Constraints(None, 2, ("self", 1), 1),
    Tag.G2: _Constraints(None, 2, ("self", 1), 2),
    Tag.G1P: _Constraints(0, 1, None, 1),
    Tag.G2P: _Constraints(1, 1, None, 1),
    Tag.P1: _Constraints(None, 0, ("next", 3), 1),
    Tag.P2: _Constraints(None, 0, ("self", 3), 2),
    Tag.P1P: _Constraints(0, 0, None, 1),
    Tag.P2P: _Constraints(1, 0, None, 1),
}

SUPPORTED_CRUDE = {
    (Tag.ALL, "bounded"),
    (Tag.G1, "exact"), (Tag.G2, "exact"),
    (Tag.G1P, "paired"), (Tag.G2P, "paired"),
    (Tag.P1, "exact"), (Tag.P1, "bounded"),
    (Tag.P2, "exact"), (Tag.P2, "bounded"),
    (Tag.P1P, "exact"), (Tag.P1P, "bounded"),
    (Tag.P2P, "exact"), (Tag.P2P, "bounded"),
}


class UnsupportedCrudeForm(ValueError):
    pass


def crude_parts(mode: str, n: int) -> int:
    return 2 * n if mode == "paired" else n


def crude_context(m: int, parts: int, order: int, cap: int | None = None) -> TruncationContext:
    xs = [f"x{i}" for i in range(1, m + 1)]
    ls = [f"l{i}" for i in range(1, parts + 1)]
    caps = {v: cap for v in xs} if cap is not None else None
    return TruncationContext.build(xs + ls, order, caps=caps, lambdas=ls)


def crude_form(f: FamilySpec, mode: str, n: int, ctx: TruncationContext) -> SumExpr:
    """The Omega argument whose image is the length-restricted refined series.

    Part ``i`` contributes ``sum_a x_i^(s a) lambda_i^(s a) lambda_{i-1}^(-s a)``
    with the parity-dependent slack of the family realised as a chi block.
    Constraint ``i`` (between parts i and i+1) carries the constant gap as a
    ``lambda_i`` prefactor.  The last ``lambda`` encodes the smallest part
    (exact), nothing (bounded / paired), or the gap to an implicit zero part
    (bounded P2).  ``mode`` is exact (length n), paired (length 2n-1 or 2n)
    or bounded (length <= n).
    """
    if (f.tag, mode) not in SUPPORTED_CRUDE:
        raise UnsupportedCrudeForm(f"no crude form for ({f.name}, {mode})")
    if n < 1:
        raise ValueError("n must be positive")
    c = _CONSTRAINTS[f.tag]
    L = crude_parts(mode, n)
    one = ctx.one()
    lam = [one] + [ctx.var(f"l{i}") for i in range(1, L + 1)]
    pre = one
    for i in range(1, L):
        pre = pre * lam[i] ** -c.gap
    if mode == "exact":
        pre = pre * lam[L] ** -c.min_last
    expr = SumExpr.of(pre)
    for i in range(1, L + 1):
        s = c.scale(i)
        y = ctx.var(f"x{i}") ** s * lam[i] ** s / lam[i - 1] ** s
        mu = None
        if c.chi is not None and s == 1:
            where, k = c.chi
            if where == "self" and (i < L or mode == "bounded"):
                mu = lam[i]
            elif where == "next" and i >= 2:
                mu = lam[i - 1]
        if mu is None:
            block = SumExpr.of(one, Factor.geom_inv(y))
        else:
            block = chi_block(y / mu, mu, k)
        expr = expr * block
    return expr


def crude_length_filter(mode: str, n: int):
    return (mode, n)


def verify_crude(f: FamilySpec, mode: str, n: int, order: int, cap: int | None = None) -> Report:
    """Omega of the crude form against the enumerated refined series."""
    t0 = time.perf_counter()
    L = crude_parts(mode, n)
    ctx = crude_context(L, L, order, cap)
    e = crude_form(f, mode, n, ctx)
    lhs = omega_ge(expand_expr(e, ctx))
    rhs = brute_refined(f, crude_length_filter(mode, n), lhs.ctx)
    params = {"family": f.name, "mode": mode, "n": n}
    if cap is not None:
        params["cap"] = cap
    sides = {"omega": lhs, "brute": rhs}
    if f.tag is Tag.ALL and mode == "bounded":
        params["closed_form"] = f"prod_{{i=1}}^{{{n}}} 1/(1 - X_i)"
        out = lhs.ctx
        X = out.one()
        factors = []
        for i in range(1, n + 1):
            X = X * out.var(f"x{i}")
            factors.append(Factor.geom_inv(X))
        sides["closed form"] = ProductExpr(out.one(), tuple(factors)).expand(out)
    return compare_sides("crude", params, order, sides, t0)


__all__ = [
    "Factor", "Kind", "ProductExpr", "SumExpr", "RuleId", "ALL_RULES",
    "chi_block", "expand_expr", "omega_ge", "check_rule", "check_base_rule",
    "crude_form", "verify_crude", "crude_context", "crude_parts", "UnsupportedCrudeForm",
    "ALL", "G1", "G2", "G1P", "G2P", "P1", "P2", "P1P", "P2P",
]
