"""Registry of generating-function identities and their truncated checks.

Each registered identity knows how to build its sides in a truncation
context: the summation side as a list of term families (each term a
:class:`~partan.omega.ProductExpr`), zero or more infinite-product sides, and
the enumeration oracle.  Summation stops at the first index whose term has a
lower degree bound above the order; every registered family has a lower
bound that grows with the index.

Refined identities live in ``x1..xm`` with ``X_i = x1*...*xi`` and the
conventions ``X_0 = X_-1 = 1`` and empty products equal to 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .omega import Factor, Kind, ProductExpr
from .partitions import (
    ALL, ALT, G1, G1P, G2, G2P, P1, P1P, P2, P2P, PLAIN, SCHMIDT,
    FamilySpec, StatScheme, Tag, brute_refined, brute_series, refined_context,
)
from .report import Report, compare_stages
from .series import (
    LaurentPoly, Monomial, TruncationContext, pochhammer_infinite, substitute_monomial,
)

ONE_PLUS, GEOM = Factor.one_plus, Factor.geom_inv


def base_context(order: int) -> TruncationContext:
    return TruncationContext.build(["q"], order)


def biv_context(order: int) -> TruncationContext:
    return TruncationContext.build(["z", "q"], order, weights={"z": 0, "q": 1})


def binom2(n: int) -> int:
    return n * (n - 1) // 2


class _B:
    """Monomial and Pochhammer-factor shorthands bound to one context."""

    def __init__(self, ctx: TruncationContext):
        self.ctx = ctx

    def m(self, sign=1, **e) -> Monomial:
        return self.ctx.mono(sign, **e)

    def q(self, k: int) -> Monomial:
        return self.ctx.mono(q=k)

    def zq(self, j: int, k: int) -> Monomial:
        return self.ctx.mono(z=j, q=k)

    def poch(self, base: Monomial, step: Monomial, n: int) -> list[Factor]:
        """Factors of ``(base; step)_n``."""
        return [ONE_PLUS(-(base * step**i)) for i in range(n)]

    def ipoch(self, base: Monomial, step: Monomial, n: int) -> list[Factor]:
        """Factors of ``1/(base; step)_n``."""
        return [GEOM(base * step**i) for i in range(n)]


def term(prefactor: Monomial, *groups) -> ProductExpr:
    factors = []
    for g in groups:
        factors.extend(g if isinstance(g, list) else [g])
    return ProductExpr(prefactor, tuple(factors))


def lower_degree(t: ProductExpr, ctx: TruncationContext) -> int:
    """A lower bound on the weighted degree of every monomial of ``t``."""
    d = ctx.degree(t.prefactor.exps)
    for f in t.factors:
        deg = ctx.degree(f.m.exps)
        if f.kind is Kind.MONO:
            d += deg
        elif f.kind is Kind.ONE_PLUS:
            d += min(0, deg)
    return d


@dataclass
class SeriesForm:
    """``const + sum over families of sum_{n >= start} family(n)``."""

    families: list[tuple[int, Callable[[_B, int], ProductExpr]]]
    const: int = 0

    def evaluate(self, ctx: TruncationContext, max_terms: int = 10_000) -> LaurentPoly:
        b = _B(ctx)
        out = LaurentPoly.one(ctx) * self.const
        for start, fam in self.families:
            n = start
            while True:
                t = fam(b, n)
                if lower_degree(t, ctx) > ctx.order:
                    break
                out = out + t.expand(ctx)
                n += 1
                if n - start > max_terms:
                    raise RuntimeError("summation did not terminate")
        return out


# (base, step, power): power +1 for a numerator (a;q)_inf, -1 for 1/(a;q)_inf
ProductSpec = Sequence[tuple[Callable[[_B], Monomial], Callable[[_B], Monomial], int]]


def evaluate_product(spec: ProductSpec, ctx: TruncationContext) -> LaurentPoly:
    b = _B(ctx)
    out = LaurentPoly.one(ctx)
    for base, step, power in spec:
        base_m, step_m = base(b), step(b)
        if ctx.degree(base_m.exps) < 0:
            raise ValueError("product sides need bases of non-negative degree")
        out = out * pochhammer_infinite(base_m, step_m, ctx, invert=power < 0)
    return out


def _inv_mod8(*residues) -> ProductSpec:
    return [((lambda b, r=r: b.q(r)), (lambda b: b.q(8)), -1) for r in residues]


@dataclass
class Identity:
    id: str
    kind: str  # base | biv | ref | classical
    family: FamilySpec | None = None
    scheme: StatScheme | None = None
    sum: SeriesForm | None = None
    products: list[ProductSpec] = field(default_factory=list)
    context: Callable[[int], TruncationContext] = base_context
    grading: str = "q:1"
    note: str = ""
    # literal transcription that fails and the reason the adopted form differs
    display: SeriesForm | None = None
    correction: str = ""


REGISTRY: dict[str, Identity] = {}


def _register(ident: Identity) -> Identity:
    REGISTRY[ident.id] = ident
    return ident


# --- base q-series --------------------------------------------------------------

_register(Identity(
    "LG1", "base", G1, PLAIN,
    SeriesForm([(0, lambda b, n: term(b.q(n * n + n), b.poch(-b.q(-1), b.q(2), n),
                                      b.ipoch(b.q(2), b.q(2), n)))]),
    [_inv_mod8(1, 5, 6)],
))
_register(Identity(
    "LG2", "base", G2, PLAIN,
    SeriesForm([(0, lambda b, n: term(b.q(n * n + n), b.poch(-b.q(1), b.q(2), n),
                                      b.ipoch(b.q(2), b.q(2), n)))]),
    [_inv_mod8(2, 3, 7)],
))
_register(Identity(
    "NLG1", "base", G1P, PLAIN,
    SeriesForm([(0, lambda b, n: term(b.q(binom2(2 * n)), b.poch(-b.q(1), b.q(4), n),
                                      b.ipoch(b.q(2), b.q(2), 2 * n)))]),
    [_inv_mod8(1, 5, 6)],
))
_register(Identity(
    "NLG2", "base", G2P, PLAIN,
    SeriesForm([(0, lambda b, n: term(b.q(binom2(2 * n + 1)), b.poch(-b.q(-1), b.q(4), n),
                                      b.ipoch(b.q(2), b.q(2), 2 * n)))]),
    [_inv_mod8(2, 3, 7)],
))
_register(Identity(
    "AP1", "base", P1, PLAIN,
    SeriesForm([(1, lambda b, n: term(b.q(2 * n), b.poch(-b.q(1), b.q(4), n - 1),
                                      ONE_PLUS(b.q(2 * n - 3)), b.ipoch(b.q(2), b.q(2), n)))],
               const=1),
    [_inv_mod8(1, 4, 5, 6, 8)],
))
_register(Identity(
    "AP2", "base", P2, PLAIN,
    SeriesForm([(1, lambda b, n: term(b.q(2 * n), b.poch(-b.q(3), b.q(4), n - 1),
                                      ONE_PLUS(b.q(2 * n - 1)), b.ipoch(b.q(2), b.q(2), n)))],
               const=1),
    [_inv_mod8(2, 3, 4, 7, 8)],
))
_register(Identity(
    "NP1", "base", P1P, PLAIN,
    SeriesForm([
        (0, lambda b, n: term(b.q(4 * n), b.poch(-b.q(-3), b.q(4), n), b.ipoch(b.q(2), b.q(2), 2 * n))),
        (0, lambda b, n: term(b.q(4 * n + 2), b.poch(-b.q(1), b.q(4), n),
                              b.ipoch(b.q(2), b.q(2), 2 * n + 1))),
    ]),
    [_inv_mod8(1, 4, 5, 6, 8)],
))
_register(Identity(
    "NP2", "base", P2P, PLAIN,
    SeriesForm([
        (0, lambda b, n: term(b.q(4 * n), b.poch(-b.q(-1), b.q(4), n), b.ipoch(b.q(2), b.q(2), 2 * n))),
        (0, lambda b, n: term(b.q(4 * n + 2), b.poch(-b.q(3), b.q(4), n),
                              b.ipoch(b.q(2), b.q(2), 2 * n + 1))),
    ]),
    [_inv_mod8(2, 3, 4, 7, 8)],
))

BASE_IDS = ("LG1", "LG2", "NLG1", "NLG2", "AP1", "AP2", "NP1", "NP2")
BASE_OF_FAMILY = {REGISTRY[i].family.tag: i for i in BASE_IDS}


# --- bivariate (alternating sum / Schmidt weight) ------------------------------------

def _d4(b, n, k):
    # 1/((q^4;q^4)_n (z^2q^2;q^4)_k)
    return b.ipoch(b.q(4), b.q(4), n) + b.ipoch(b.zq(2, 2), b.q(4), k)


def _d2(b, n, k):
    # 1/((q^2;q^2)_n (z^2q^2;q^2)_k)
    return b.ipoch(b.q(2), b.q(2), n) + b.ipoch(b.zq(2, 2), b.q(2), k)


def _spec(*items):
    """Product spec from (z-exp, q-exp, q-step, power) tuples."""
    return [((lambda b, j=j, k=k: b.zq(j, k)), (lambda b, s=s: b.q(s)), p)
            for j, k, s, p in items]


def _neg(j, k, s):
    # (-z^j q^k; q^s)_inf
    return ((lambda b, j=j, k=k: -b.zq(j, k)), (lambda b, s=s: b.q(s)), 1)


def _biv(fam: FamilySpec, scheme: StatScheme, series: SeriesForm, products=(), note=""):
    sid = f"BIV_{fam.tag.name}_{scheme.tag.name}"
    _register(Identity(sid, "biv", fam, scheme, series, list(products), biv_context,
                       "z:0,q:1", note))


_NO_PRODUCT = "no bivariate product form exists for this family"

_biv(G1, ALT, SeriesForm([
    (0, lambda b, n: term(b.zq(2 * n, 2 * binom2(2 * n + 1)), b.poch(-b.zq(1, -1), b.q(2), 2 * n),
                          _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2 * n + 2, 2 * binom2(2 * n + 2)), b.poch(-b.zq(1, 1), b.q(2), 2 * n),
                          ONE_PLUS(b.zq(-1, -1)), _d4(b, n, n + 1))),
]), note=_NO_PRODUCT)
_biv(G2, ALT, SeriesForm([
    (0, lambda b, n: term(b.zq(2 * n, 2 * binom2(2 * n + 1)), b.poch(-b.zq(1, 1), b.q(2), 2 * n),
                          _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2 * n + 2, 2 * binom2(2 * n + 2)), b.poch(-b.zq(1, 1), b.q(2), 2 * n + 1),
                          _d4(b, n, n + 1))),
]), note=_NO_PRODUCT)
_biv(G1, SCHMIDT, SeriesForm([
    (0, lambda b, n: term(b.zq(2 * n, 4 * binom2(n + 1)), b.poch(-b.zq(1, 0), b.q(1), 2 * n),
                          _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2 * n + 2, 2 * (n + 1) ** 2), b.poch(-b.zq(1, 1), b.q(1), 2 * n),
                          ONE_PLUS(b.zq(-1, -1)), _d2(b, n, n + 1))),
]), note=_NO_PRODUCT)
_biv(G2, SCHMIDT, SeriesForm([
    (0, lambda b, n: term(b.zq(2 * n, 4 * binom2(n + 1)), b.poch(-b.zq(1, 1), b.q(1), 2 * n),
                          _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2 * n + 2, 2 * (n + 1) ** 2), b.poch(-b.zq(1, 1), b.q(1), 2 * n + 1),
                          _d2(b, n, n + 1))),
]), note=_NO_PRODUCT)

_biv(G1P, ALT, SeriesForm([
    (0, lambda b, n: term(b.zq(n, binom2(2 * n)), b.poch(-b.zq(1, 1), b.q(4), n), _d4(b, n, n))),
]), [
    [_neg(1, 1, 4)] + _spec((2, 2, 4, -1)),
    _spec((1, 1, 4, -1), (2, 6, 8, -1)),
])
_biv(G2P, ALT, SeriesForm([
    (0, lambda b, n: term(b.zq(n, binom2(2 * n + 1)), b.poch(-b.zq(1, -1), b.q(4), n), _d4(b, n, n))),
]), [
    [_neg(1, 3, 4)] + _spec((2, 2, 4, -1)),
    _spec((1, 3, 4, -1), (2, 2, 8, -1)),
])
_biv(G1P, SCHMIDT, SeriesForm([
    (0, lambda b, n: term(b.zq(n, n * n), b.poch(-b.zq(1, 1), b.q(2), n), _d2(b, n, n))),
]), [
    [_neg(1, 1, 2)] + _spec((2, 2, 2, -1)),
    _spec((1, 1, 2, -1), (2, 4, 4, -1)),
])
_biv(G2P, SCHMIDT, SeriesForm([
    (0, lambda b, n: term(b.zq(n, n * n + n), b.poch(-b.zq(1, 0), b.q(2), n), _d2(b, n, n))),
]), [
    [_neg(1, 2, 2)] + _spec((2, 2, 2, -1)),
    _spec((1, 2, 2, -1), (2, 2, 4, -1)),
])

_biv(P1, ALT, SeriesForm([
    (1, lambda b, n: term(b.q(4 * n), b.poch(-b.zq(1, 1), b.q(8), n), b.poch(-b.zq(3, 5), b.q(8), n - 1),
                          ONE_PLUS(b.zq(3, 4 * n - 3)), _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 4 * n + 2), b.poch(-b.zq(1, 1), b.q(8), n), b.poch(-b.zq(3, 5), b.q(8), n),
                          ONE_PLUS(b.zq(-1, 4 * n - 1)), _d4(b, n, n + 1))),
], const=1), [
    [_neg(1, 1, 8), _neg(3, 5, 8)] + _spec((2, 2, 4, -1), (0, 4, 4, -1)),
])
_biv(P2, ALT, SeriesForm([
    (1, lambda b, n: term(b.q(4 * n), b.poch(-b.zq(3, 3), b.q(8), n), b.poch(-b.zq(1, 7), b.q(8), n - 1),
                          ONE_PLUS(b.zq(1, 4 * n - 1)), _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 4 * n + 2), b.poch(-b.zq(3, 3), b.q(8), n), b.poch(-b.zq(1, 7), b.q(8), n),
                          ONE_PLUS(b.zq(1, 4 * n + 1)), _d4(b, n, n + 1))),
], const=1), [
    [_neg(3, 3, 8), _neg(1, 7, 8)] + _spec((2, 2, 4, -1), (0, 4, 4, -1)),
])
_biv(P1, SCHMIDT, SeriesForm([
    (1, lambda b, n: term(b.q(2 * n), b.poch(-b.zq(1, 1), b.q(4), n), b.poch(-b.zq(3, 4), b.q(4), n - 1),
                          ONE_PLUS(b.zq(3, 2 * n)), _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 2 * n + 2), b.poch(-b.zq(1, 1), b.q(4), n), b.poch(-b.zq(3, 4), b.q(4), n),
                          ONE_PLUS(b.zq(-1, 2 * n - 1)), _d2(b, n, n + 1))),
], const=1), [
    [_neg(1, 1, 4), _neg(3, 4, 4)] + _spec((2, 2, 2, -1), (0, 2, 2, -1)),
])
_biv(P2, SCHMIDT, SeriesForm([
    (1, lambda b, n: term(b.q(2 * n), b.poch(-b.zq(3, 3), b.q(4), n), b.poch(-b.zq(1, 4), b.q(4), n - 1),
                          ONE_PLUS(b.zq(1, 2 * n)), _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 2 * n + 2), b.poch(-b.zq(3, 3), b.q(4), n), b.poch(-b.zq(1, 4), b.q(4), n),
                          ONE_PLUS(b.zq(1, 2 * n + 1)), _d2(b, n, n + 1))),
], const=1), [
    [_neg(3, 3, 4), _neg(1, 4, 4)] + _spec((2, 2, 2, -1), (0, 2, 2, -1)),
])

_biv(P1P, ALT, SeriesForm([
    (0, lambda b, n: term(b.q(4 * n), b.poch(-b.zq(1, -3), b.q(4), n), _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 4 * n + 2), b.poch(-b.zq(1, 1), b.q(4), n), _d4(b, n, n + 1))),
]), [
    [_neg(1, 1, 4)] + _spec((2, 2, 4, -1), (0, 4, 4, -1)),
])
_biv(P2P, ALT, SeriesForm([
    (0, lambda b, n: term(b.q(4 * n), b.poch(-b.zq(1, -1), b.q(4), n), _d4(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 4 * n + 2), b.poch(-b.zq(1, 3), b.q(4), n), _d4(b, n, n + 1))),
]), [
    [_neg(1, 3, 4)] + _spec((2, 2, 4, -1), (0, 4, 4, -1)),
])
_biv(P1P, SCHMIDT, SeriesForm([
    (0, lambda b, n: term(b.q(2 * n), b.poch(-b.zq(1, -1), b.q(2), n), _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 2 * n + 2), b.poch(-b.zq(1, 1), b.q(2), n), _d2(b, n, n + 1))),
]), [
    [_neg(1, 1, 2)] + _spec((2, 2, 2, -1), (0, 2, 2, -1)),
])
_biv(P2P, SCHMIDT, SeriesForm([
    (1, lambda b, n: term(b.q(2 * n), b.poch(-b.zq(1, 0), b.q(2), n), _d2(b, n, n))),
    (0, lambda b, n: term(b.zq(2, 2 * n + 2), b.poch(-b.zq(1, 2), b.q(2), n), _d2(b, n, n + 1))),
], const=1), [
    [_neg(1, 2, 2)] + _spec((2, 2, 2, -1), (0, 2, 2, -1)),
])

BIV_IDS = tuple(i for i in REGISTRY if i.startswith("BIV_"))


def _record_display(iid: str, display: SeriesForm, correction: str) -> None:
    REGISTRY[iid].display = display
    REGISTRY[iid].correction = correction


# Displayed summands that disagree with the enumeration; the adopted forms are
# what substituting into the refined per-length terms produces.
_record_display("BIV_G1_SCHMIDT", SeriesForm([
    REGISTRY["BIV_G1_SCHMIDT"].sum.families[0],
    (0, lambda b, n: term(b.zq(2 * n + 2, 2 * (n + 1) ** 2), b.poch(-b.zq(1, 1), b.q(1), 2 * n),
                          ONE_PLUS(b.zq(-1, 0)), _d2(b, n, n + 1))),
]), "odd-length factor 1 + 1/(zq), not 1 + 1/z (X_{2n}/X_{2n+1} = 1/(zq))")
_record_display("BIV_G2P_SCHMIDT", SeriesForm([
    (0, lambda b, n: term(b.zq(n, n * n + n), b.poch(-b.zq(1, -1), b.q(2), n), _d2(b, n, n))),
]), "summand (-z;q^2)_n, not (-zq^{-1};q^2)_n (X_{2n-1}/X_{2n} = z)")
_record_display("BIV_P1_SCHMIDT", SeriesForm([
    REGISTRY["BIV_P1_SCHMIDT"].sum.families[0],
    (0, lambda b, n: term(b.zq(2, 2 * n + 2), b.poch(-b.zq(1, 1), b.q(4), n), b.poch(-b.zq(3, 4), b.q(4), n),
                          ONE_PLUS(b.zq(-1, 2 * n)), _d2(b, n, n + 1))),
], const=1), "odd-length factor 1 + z^{-1}q^{2n-1}, not 1 + z^{-1}q^{2n} (X_{2n}^3/X_{2n+1})")


# --- classical inputs ----------------------------------------------------------------

def _qgauss_context(order):
    return TruncationContext.build(["a", "b", "c", "q"], order, weights={"a": 0, "b": 0})


def _qgauss_lim_context(order):
    return TruncationContext.build(["b", "c", "q"], order, weights={"b": 0})


def _qlebesgue_context(order):
    return TruncationContext.build(["a", "q"], order, weights={"a": 0})


def _v(name, sign=1, **extra):
    return lambda b: b.m(sign, **{name: 1, **extra}) if name else b.m(sign, **extra)


_register(Identity(
    "QGAUSS", "classical",
    sum=SeriesForm([(0, lambda b, n: term(
        b.m(c=n, a=-n, b=-n),
        b.poch(b.m(a=1), b.q(1), n), b.poch(b.m(b=1), b.q(1), n),
        b.ipoch(b.q(1), b.q(1), n), b.ipoch(b.m(c=1), b.q(1), n)))]),
    products=[[
        (lambda b: b.m(c=1, a=-1), lambda b: b.q(1), 1),
        (lambda b: b.m(c=1, b=-1), lambda b: b.q(1), 1),
        (lambda b: b.m(c=1), lambda b: b.q(1), -1),
        (lambda b: b.m(c=1, a=-1, b=-1), lambda b: b.q(1), -1),
    ]],
    context=_qgauss_context, grading="q:1,c:1,a:0,b:0",
))
_register(Identity(
    "QGAUSS_LIM", "classical",
    sum=SeriesForm([(0, lambda b, n: term(
        b.m((-1) ** n, q=binom2(n), c=n, b=-n),
        b.poch(b.m(b=1), b.q(1), n),
        b.ipoch(b.q(1), b.q(1), n), b.ipoch(b.m(c=1), b.q(1), n)))]),
    products=[[
        (lambda b: b.m(c=1, b=-1), lambda b: b.q(1), 1),
        (lambda b: b.m(c=1), lambda b: b.q(1), -1),
    ]],
    context=_qgauss_lim_context, grading="q:1,c:1,b:0",
))
_register(Identity(
    "QLEBESGUE", "classical",
    sum=SeriesForm([(0, lambda b, n: term(
        b.q(binom2(n + 1)), b.poch(b.m(-1, a=1), b.q(1), n), b.ipoch(b.q(1), b.q(1), n)))]),
    products=[
        [(lambda b: b.m(-1, a=1, q=1), lambda b: b.q(2), 1),
         (lambda b: b.m(-1, q=1), lambda b: b.q(1), 1)],
        [(lambda b: b.m(-1, a=1, q=1), lambda b: b.q(2), 1),
         (lambda b: b.q(1), lambda b: b.q(2), -1)],
    ],
    context=_qlebesgue_context, grading="q:1,a:0",
))
_record_display("QLEBESGUE", SeriesForm([(0, lambda b, n: term(
    b.q(binom2(n + 1)), b.poch(b.m(-1, a=1, q=1), b.q(1), n), b.ipoch(b.q(1), b.q(1), n)))]),
    "summand (-a;q)_n, not (-aq;q)_n; the product sides are unchanged")
CLASSICAL_IDS = ("QGAUSS", "QGAUSS_LIM", "QLEBESGUE")


# --- refined forms ---------------------------------------------------------------------

REF_FAMILIES = {
    "REF_G1": G1, "REF_G2": G2, "REF_G1P": G1P, "REF_G2P": G2P,
    "REF_P1": P1, "REF_P2": P2, "REF_P1P": P1P, "REF_P2P": P2P,
}
for _rid, _fam in REF_FAMILIES.items():
    _register(Identity(_rid, "ref", _fam, grading="x_i:1"))
REF_IDS = tuple(REF_FAMILIES)
BOUNDED_REF = ("REF_P1", "REF_P2", "REF_P1P", "REF_P2P", "ALL")


class _XB:
    """``X_i`` products over ``x1..xm``; ``X_i = 1`` for ``i <= 0``."""

    def __init__(self, ctx: TruncationContext):
        self.ctx = ctx
        self.one = ctx.one()

    def X(self, i: int) -> Monomial:
        out = self.one
        for j in range(1, i + 1):
            out = out * self.ctx.var(f"x{j}")
        return out

    def dens(self, upto: int) -> list[Factor]:
        return [GEOM(self.X(i) ** 2) for i in range(1, upto + 1)]


def length_filter(rid: str, n: int):
    """Length filter matched by ``refined_exact_length(rid, n)``."""
    tag = REF_FAMILIES[rid].tag
    if tag in (Tag.G1P, Tag.G2P):
        return ("paired", n)
    return ("exact", n)


def _refined_term(rid: str, n: int, ctx: TruncationContext, sign: int = 1) -> ProductExpr:
    x = _XB(ctx)
    X = x.X
    tag = REF_FAMILIES[rid].tag if rid in REF_FAMILIES else None
    if n < 1:
        raise ValueError("index must be at least 1")
    if tag is Tag.G1:
        pre = x.one
        for i in range(1, n + 1):
            pre = pre * X(i) ** 2
        chain = [ONE_PLUS(X(i - 1) * X(i)) for i in range(1, n)]
        return term(pre, chain, ONE_PLUS(X(n - 1) / X(n)), x.dens(n))
    if tag is Tag.G2:
        pre = x.one
        for i in range(1, n + 1):
            pre = pre * X(i) ** 2
        return term(pre, [ONE_PLUS(X(i - 1) * X(i)) for i in range(1, n + 1)], x.dens(n))
    if tag is Tag.G1P:
        pre = x.one
        for i in range(1, 2 * n):
            pre = pre * X(i)
        chain = [ONE_PLUS(X(2 * i - 2) * X(2 * i - 1)) for i in range(1, n + 1)]
        return term(pre, chain, x.dens(2 * n))
    if tag is Tag.G2P:
        pre = x.one
        for i in range(1, 2 * n + 1):
            pre = pre * X(i)
        chain = [ONE_PLUS(X(2 * i - 1) * X(2 * i)) for i in range(1, n)]
        last = X(2 * n - 1) / X(2 * n)
        return term(pre, chain, ONE_PLUS(last if sign > 0 else -last), x.dens(2 * n))
    if tag is Tag.P1:
        chain = [ONE_PLUS(X(i - 1) ** 3 * X(i)) for i in range(1, n)]
        return term(X(n) ** 2, chain, ONE_PLUS(X(n - 1) ** 3 / X(n)), x.dens(n))
    if tag is Tag.P2:
        chain = [ONE_PLUS(X(i - 1) * X(i) ** 3) for i in range(1, n)]
        return term(X(n) ** 2, chain, ONE_PLUS(X(n - 1) * X(n)), x.dens(n))
    if tag is Tag.P1P:
        h = n // 2
        chain = [ONE_PLUS(X(2 * i - 2) * X(2 * i - 1)) for i in range(1, h + 1)]
        if n % 2 == 0:
            return term(X(n) ** 2, chain, x.dens(n))
        return term(X(n) ** 2, chain, ONE_PLUS(X(n - 1) / X(n)), x.dens(n))
    if tag is Tag.P2P:
        h = n // 2
        if n % 2 == 0:
            chain = [ONE_PLUS(X(2 * i - 1) * X(2 * i)) for i in range(1, h)]
            return term(X(n) ** 2, chain, ONE_PLUS(X(n - 1) / X(n)), x.dens(n))
        chain = [ONE_PLUS(X(2 * i - 1) * X(2 * i)) for i in range(1, h + 1)]
        return term(X(n) ** 2, chain, x.dens(n))
    raise ValueError(f"{rid} has no exact-length form")


def refined_exact_length(rid: str, n: int, ctx: TruncationContext, sign: int = 1) -> LaurentPoly:
    """Closed form for members of the family of ``rid`` with index ``n``.

    ``n`` is the length for G1, G2, P1, P2, P1P and P2P, and the pair index
    (lengths 2n-1 and 2n) for G1P and G2P.  ``sign=-1`` selects the
    ``1 - X_{2n-1}/X_{2n}`` transcription of the G2P form.
    """
    if rid not in REF_FAMILIES:
        raise ValueError(f"{rid} is not a refined identity")
    return _refined_term(rid, n, ctx, sign).expand(ctx)


def _display_p1p_terms(ctx):
    """Series form of P1P in its product-style grouping (not per length)."""
    x = _XB(ctx)
    X = x.X

    def even(n):
        chain = [ONE_PLUS(X(2 * i - 2) * X(2 * i - 1)) for i in range(1, n)]
        return term(X(2 * n) ** 2, chain, ONE_PLUS(X(2 * n - 2) * X(2 * n - 1) / X(2 * n) ** 2),
                    x.dens(2 * n))

    def odd(n):
        chain = [ONE_PLUS(X(2 * i - 2) * X(2 * i - 1)) for i in range(1, n + 1)]
        return term(X(2 * n + 1) ** 2, chain, x.dens(2 * n + 1))

    return [(1, even), (0, odd)]


def refined_series(rid: str, ctx: TruncationContext, display: bool = False) -> LaurentPoly:
    """``1 + sum_n term_n`` over every index whose term can reach the order."""
    m = sum(1 for v in ctx.vars if v.startswith("x"))
    out = LaurentPoly.one(ctx)
    if display:
        if REF_FAMILIES[rid].tag is not Tag.P1P:
            raise ValueError("only P1P has a separately displayed grouping")
        fams = _display_p1p_terms(ctx)
    else:
        fams = [(1, lambda n: _refined_term(rid, n, ctx))]
    for start, fam in fams:
        n = start
        while True:
            top = 2 * n + 1 if display else (2 * n if REF_FAMILIES[rid].tag in (Tag.G1P, Tag.G2P) else n)
            if top > m:
                break
            t = fam(n)
            if lower_degree(t, ctx) > ctx.order:
                break
            out = out + t.expand(ctx)
            n += 1
    return out


def refined_bounded_product(rid: str, bound: int, ctx: TruncationContext) -> LaurentPoly:
    """Finite product of the displayed factors for lengths up to ``bound``."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    x = _XB(ctx)
    X = x.X
    factors: list[Factor] = []
    for i in range(1, bound + 1):
        if rid == "ALL":
            factors.append(GEOM(X(i)))
            continue
        if rid == "REF_P1":
            factors.append(ONE_PLUS(X(i - 1) ** 3 * X(i)))
        elif rid == "REF_P2":
            factors.append(ONE_PLUS(X(i - 1) * X(i) ** 3))
        elif rid == "REF_P1P":
            if i % 2:
                factors.append(ONE_PLUS(X(i - 1) * X(i)))
        elif rid == "REF_P2P":
            if i % 2 == 0:
                factors.append(ONE_PLUS(X(i - 1) * X(i)))
        else:
            raise ValueError(f"{rid} has no bounded-length product form")
        factors.append(GEOM(X(i) ** 2))
    return ProductExpr(x.one, tuple(factors)).expand(ctx)


def conjecture_product(residues, k: int, bound: int, ctx: TruncationContext) -> LaurentPoly:
    """``prod 1/(1 - X_n^2) * prod_{n mod k not in T} (1 + X_{n-1} X_n)`` for n <= bound."""
    x = _XB(ctx)
    X = x.X
    factors = []
    for n in range(1, bound + 1):
        if n % k not in residues:
            factors.append(ONE_PLUS(X(n - 1) * X(n)))
        factors.append(GEOM(X(n) ** 2))
    return ProductExpr(x.one, tuple(factors)).expand(ctx)


# --- sides and checks ----------------------------------------------------------------

def normalize_id(name: str) -> str:
    key = name.strip().upper().replace("-", "_").replace("'", "P")
    if key not in REGISTRY:
        raise KeyError(name)
    return key


def context_for(iid: str, order: int) -> TruncationContext:
    return REGISTRY[normalize_id(iid)].context(order)


def sum_side(iid: str, ctx: TruncationContext) -> LaurentPoly:
    ident = REGISTRY[normalize_id(iid)]
    if ident.sum is None:
        raise ValueError(f"{iid} has no summation side")
    return ident.sum.evaluate(ctx)


def product_side(iid: str, ctx: TruncationContext, which: int = 0) -> LaurentPoly:
    ident = REGISTRY[normalize_id(iid)]
    if not ident.products:
        raise ValueError(f"{iid} has no product side" + (f" ({ident.note})" if ident.note else ""))
    return evaluate_product(ident.products[which], ctx)


def brute_side(iid: str, ctx: TruncationContext) -> LaurentPoly:
    ident = REGISTRY[normalize_id(iid)]
    if ident.family is None or ident.kind not in ("base", "biv"):
        raise ValueError(f"{iid} has no enumeration oracle")
    return brute_series(ident.family, ident.scheme, ctx)


def specialize_z(p: LaurentPoly, target: TruncationContext) -> LaurentPoly:
    """Set ``z = 1`` in a (z, q) series."""
    return substitute_monomial(p, {"z": target.one(), "q": target.var("q")}, target)


def _check_plain(iid: str, order: int) -> tuple[list, dict]:
    ident = REGISTRY[iid]
    ctx = ident.context(order)
    sides = {"sum": sum_side(iid, ctx)}
    for i in range(len(ident.products)):
        sides["product" if i == 0 else f"product{i + 1}"] = product_side(iid, ctx, i)
    if ident.family is not None:
        sides["brute"] = brute_side(iid, ctx)
    stages = [("identity", sides)]
    params = {"grading": ident.grading}
    if ident.note:
        params["note"] = ident.note
    if ident.display is not None:
        names = list(sides)
        literal = ident.display.evaluate(ctx)
        rej = compare_stages(iid, {}, order, [("literal", {"literal": literal, names[-1]: sides[names[-1]]})],
                             time.perf_counter())
        params["adopted"] = ident.correction
        params["rejected"] = {"status": rej.status, "first_mismatch": rej.first_mismatch}
    if ident.kind == "biv" and ident.scheme is ALT:
        base_id = BASE_OF_FAMILY[ident.family.tag]
        bctx = base_context(order)
        stages.append(("z=1", {"specialized": specialize_z(sides["sum"], bctx),
                               base_id + ".sum": sum_side(base_id, bctx)}))
    return stages, params


def refined_stages(rid: str, order: int, cap: int | None = None, indices: int = 4,
                   sign: int = 1, full: bool = True) -> list:
    """Per-index, bounded-length, full-series and substitution comparisons."""
    fam = REF_FAMILIES[rid]
    tag = fam.tag
    stages = []
    paired = tag in (Tag.G1P, Tag.G2P)
    m = 2 * indices if paired else indices
    ctx = refined_context(m, order, cap)
    for n in range(1, indices + 1):
        filt = length_filter(rid, n)
        stages.append((f"index {n}", {
            "formula": refined_exact_length(rid, n, ctx, sign),
            "brute": brute_refined(fam, filt, ctx),
        }))
    if rid in BOUNDED_REF:
        for bnd in range(1, indices + 1):
            stages.append((f"bounded {bnd}", {
                "product": refined_bounded_product(rid, bnd, ctx),
                "brute": brute_refined(fam, ("bounded", bnd), ctx),
            }))
    if full:
        fctx = refined_context(order, order, cap)
        series = refined_series(rid, fctx)
        brute = brute_refined(fam, None, fctx)
        sides = {"series": series, "brute": brute}
        if tag is Tag.P1P:
            sides["displayed grouping"] = refined_series(rid, fctx, display=True)
        stages.append(("series", sides))
        if cap is not None:
            # caps drop terms that survive x_i -> q, so specialize the uncapped series
            series = refined_series(rid, refined_context(order, order))
        bctx = base_context(order)
        qmap = {f"x{i}": bctx.var("q") for i in range(1, order + 1)}
        base_id = BASE_OF_FAMILY[tag]
        stages.append(("x_i=q", {
            "substituted": substitute_monomial(series, qmap, bctx),
            base_id + ".sum": sum_side(base_id, bctx),
        }))
    return stages


def check_identity(iid: str, order: int, cap: int | None = None, variant: str | None = None) -> Report:
    """Compute every available side of ``iid`` under one context and compare exactly.

    Failures are reported, never raised.  For refined ids ``order`` is the
    total degree in the x variables.  ``variant='minus'`` checks the
    ``1 - X_{2n-1}/X_{2n}`` transcription of REF_G2P.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    iid = normalize_id(iid)
    t0 = time.perf_counter()
    ident = REGISTRY[iid]
    params: dict = {}
    if ident.kind == "ref":
        params["grading"] = ident.grading
        if cap is not None:
            params["cap"] = cap
        sign = 1
        if variant == "minus":
            if iid != "REF_G2P":
                raise ValueError("the minus variant exists only for REF_G2P")
            sign = -1
            params["variant"] = "1 - X_{2n-1}/X_{2n}"
            stages = refined_stages(iid, order, cap, sign=-1, full=False)
        else:
            stages = refined_stages(iid, order, cap)
        if iid == "REF_G2P" and sign > 0:
            alt = compare_stages(iid, {}, order, refined_stages(iid, order, cap, indices=1,
                                                                sign=-1, full=False), t0)
            params["adopted"] = "1 + X_{2n-1}/X_{2n}"
            params["rejected"] = {"form": "1 - X_{2n-1}/X_{2n}", "status": alt.status,
                                  "failed_stage": alt.params.get("failed_stage")}
        if iid == "REF_P1P":
            params["adopted"] = "1 + X_{2n}/X_{2n+1} for odd length 2n+1"
        if iid == "REF_P2P":
            params["adopted"] = "1 + X_{2n-1}/X_{2n} for even length 2n"
    else:
        if cap is not None or variant is not None:
            raise ValueError("cap and variant apply to refined ids only")
        stages, params = _check_plain(iid, order)
    return compare_stages(iid, params, order, stages, t0)


def check_conjecture(residues, k: int, order: int, length: int = 4, refined_order: int = 12,
                     cap: int | None = None) -> Report:
    """Finite evidence for the product formula over the (T, k) position-parity family."""
    t0 = time.perf_counter()
    fam = FamilySpec.gen(residues, k)
    T = frozenset(residues)
    bctx = base_context(order)
    spec_q = conjecture_product(T, k, order, refined_context(order, order, cap))
    qmap = {f"x{i}": bctx.var("q") for i in range(1, order + 1)}
    stages = [("specialized", {
        "product": substitute_monomial(spec_q, qmap, bctx),
        "brute": brute_series(fam, PLAIN, bctx),
    })]
    rctx = refined_context(length, refined_order, cap)
    stages.append((f"bounded {length}", {
        "product": conjecture_product(T, k, length, rctx),
        "brute": brute_refined(fam, ("bounded", length), rctx),
    }))
    params = {"k": k, "T": sorted(T), "label": "evidence", "length": length,
              "refined_order": refined_order}
    return compare_stages(f"conjecture:{fam.name}", params, order, stages, t0)


ALL_IDS = BASE_IDS + REF_IDS + BIV_IDS + CLASSICAL_IDS
