"""Partitions, the families studied here, their statistics and brute-force series.

Positions are 1-based throughout: ``parts[0]`` is the first (odd-indexed)
part.  The empty partition belongs to every family.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

from .series import LaurentPoly, Monomial, TruncationContext

SAFETY_BOUND = 60


class Partition(tuple):
    """A weakly decreasing tuple of positive integers."""

    def __new__(cls, parts: Sequence[int] = ()):
        parts = tuple(parts)
        for i, p in enumerate(parts):
            if not isinstance(p, int) or p < 1:
                raise ValueError(f"parts must be positive integers, got {p!r}")
            if i and parts[i - 1] < p:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def __repr__(self):
        return f"Partition({tuple(self)})"


class Tag(Enum):
    ALL = "all"
    G1 = "g1"
    G2 = "g2"
    G1P = "g1p"
    G2P = "g2p"
    P1 = "p1"
    P2 = "p2"
    P1P = "p1p"
    P2P = "p2p"
    GEN = "gen"


@dataclass(frozen=True)
class FamilySpec:
    tag: Tag
    residues: frozenset[int] = frozenset()
    modulus: int = 0

    def __post_init__(self):
        if self.tag is Tag.GEN:
            if self.modulus < 2:
                raise ValueError("GEN family needs modulus k >= 2")
            if not self.residues:
                raise ValueError("GEN family needs at least one residue")
            bad = [t for t in self.residues if not 0 <= t < self.modulus]
            if bad:
                raise ValueError(f"residues {bad} out of range for k={self.modulus}")

    @classmethod
    def gen(cls, residues, k: int) -> FamilySpec:
        return cls(Tag.GEN, frozenset(residues), k)

    @classmethod
    def parse(cls, name: str) -> FamilySpec:
        return cls(Tag(name.lower().replace("'", "p")))

    @property
    def name(self) -> str:
        if self.tag is Tag.GEN:
            ts = ",".join(str(t) for t in sorted(self.residues))
            return f"gen({ts};{self.modulus})"
        return self.tag.value


ALL = FamilySpec(Tag.ALL)
G1 = FamilySpec(Tag.G1)
G2 = FamilySpec(Tag.G2)
G1P = FamilySpec(Tag.G1P)
G2P = FamilySpec(Tag.G2P)
P1 = FamilySpec(Tag.P1)
P2 = FamilySpec(Tag.P2)
P1P = FamilySpec(Tag.P1P)
P2P = FamilySpec(Tag.P2P)
BASE_FAMILIES = (G1, G2, G1P, G2P, P1, P2, P1P, P2P)


class Scheme(Enum):
    PLAIN = "plain"
    ALT = "alt"
    SCHMIDT = "schmidt"
    REFINED = "refined"


@dataclass(frozen=True)
class StatScheme:
    tag: Scheme
    m: int = 0

    def __post_init__(self):
        if self.tag is Scheme.REFINED and self.m < 1:
            raise ValueError("REFINED scheme needs at least one variable")


PLAIN = StatScheme(Scheme.PLAIN)
ALT = StatScheme(Scheme.ALT)
SCHMIDT = StatScheme(Scheme.SCHMIDT)


def REFINED(m: int) -> StatScheme:
    return StatScheme(Scheme.REFINED, m)


# --- enumeration -----------------------------------------------------------

def gen_partitions(
    n: int,
    length: Callable[[int], bool] | None = None,
    bound: int = SAFETY_BOUND,
) -> Iterator[Partition]:
    """All partitions of ``n`` in descending lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > bound:
        raise ValueError(f"n={n} exceeds the safety bound {bound}")

    def rec(rest, cap, acc):
        if rest == 0:
            yield acc
            return
        for p in range(min(rest, cap), 0, -1):
            yield from rec(rest - p, p, acc + (p,))

    for parts in rec(n, n, ()):
        if length is None or length(len(parts)):
            yield Partition(parts)


def conjugate(lam: Sequence[int]) -> Partition:
    if not lam:
        return Partition()
    return Partition([sum(1 for p in lam if p > j) for j in range(lam[0])])


def alt_sum(lam: Sequence[int]) -> int:
    return sum(p if i % 2 == 0 else -p for i, p in enumerate(lam))


def schmidt_weight(lam: Sequence[int]) -> int:
    return sum(lam[0::2])


def _gap_ok_g(lam) -> bool:
    for a, b in zip(lam, lam[1:]):
        if a - b < 2 or (a % 2 and a - b < 3):
            return False
    return True


def _is_strict(lam) -> bool:
    return all(a > b for a, b in zip(lam, lam[1:]))


def is_member(f: FamilySpec, lam: Sequence[int]) -> bool:
    """Direct test of the defining conditions of ``f``."""
    lam = tuple(lam)
    if not lam:
        return True
    tag = f.tag
    even = lambda p: p % 2 == 0  # noqa: E731
    if tag is Tag.ALL:
        return True
    if tag is Tag.G1:
        return _gap_ok_g(lam)
    if tag is Tag.G2:
        return _gap_ok_g(lam) and lam[-1] >= 2
    if tag is Tag.G1P:
        return _is_strict(lam) and all(even(p) for p in lam[1::2])
    if tag is Tag.G2P:
        return _is_strict(lam) and all(even(p) for p in lam[0::2])
    if tag is Tag.P1:
        return all(not (b % 2) or a - b >= 3 for a, b in zip(lam, lam[1:]))
    if tag is Tag.P2:
        return lam[-1] >= 2 and all(not (a % 2) or a - b >= 3 for a, b in zip(lam, lam[1:]))
    if tag is Tag.P1P:
        return all(even(p) for p in lam[1::2])
    if tag is Tag.P2P:
        return all(even(p) for p in lam[0::2])
    if tag is Tag.GEN:
        k, ts = f.modulus, f.residues
        if any(not even(p) for i, p in enumerate(lam, 1) if i % k in ts):
            return False
        odd = [p for p in lam if p % 2]
        return len(odd) == len(set(odd))
    raise ValueError(f"unknown family {f}")


# Local form of each family: a per-position parity rule, a rule on consecutive
# parts, and a rule on the last part.  Used to prune enumeration.

def _local_rules(f: FamilySpec):
    tag = f.tag
    anything = lambda *a: True  # noqa: E731
    if tag is Tag.ALL:
        return anything, anything, anything
    if tag in (Tag.G1, Tag.G2):
        pair = lambda a, b: a - b >= (3 if a % 2 else 2)  # noqa: E731
        last = (lambda p: p >= 2) if tag is Tag.G2 else anything
        return anything, pair, last
    if tag in (Tag.G1P, Tag.G2P):
        r = 0 if tag is Tag.G1P else 1
        return (lambda i, p: i % 2 != r or p % 2 == 0), (lambda a, b: a > b), anything
    if tag is Tag.P1:
        return anything, (lambda a, b: b % 2 == 0 or a - b >= 3), anything
    if tag is Tag.P2:
        return anything, (lambda a, b: a % 2 == 0 or a - b >= 3), (lambda p: p >= 2)
    if tag in (Tag.P1P, Tag.P2P):
        r = 0 if tag is Tag.P1P else 1
        return (lambda i, p: i % 2 != r or p % 2 == 0), anything, anything
    if tag is Tag.GEN:
        k, ts = f.modulus, f.residues
        return (
            (lambda i, p: i % k not in ts or p % 2 == 0),
            (lambda a, b: not (a == b and a % 2)),
            anything,
        )
    raise ValueError(f"unknown family {f}")


def family_members(
    f: FamilySpec,
    max_weight: int | None = None,
    max_schmidt: int | None = None,
    max_length: int | None = None,
) -> Iterator[Partition]:
    """Members of ``f`` with weight (or Schmidt weight) bounded, generated with pruning.

    Exactly one of ``max_weight`` / ``max_schmidt`` must be given.  Under a
    Schmidt bound each even-indexed part is bounded by its predecessor, so the
    search is finite.
    """
    if (max_weight is None) == (max_schmidt is None):
        raise ValueError("give exactly one of max_weight, max_schmidt")
    part_ok, pair_ok, last_ok = _local_rules(f)
    budget0 = max_weight if max_weight is not None else max_schmidt
    schmidt = max_schmidt is not None

    def rec(acc, budget):
        if not acc or last_ok(acc[-1]):
            yield Partition(acc)
        pos = len(acc) + 1
        if max_length is not None and pos > max_length:
            return
        charged = not schmidt or pos % 2 == 1
        top = acc[-1] if acc else budget
        if charged:
            top = min(top, budget)
        for p in range(top, 0, -1):
            if not part_ok(pos, p):
                continue
            if acc and not pair_ok(acc[-1], p):
                continue
            yield from rec(acc + (p,), budget - p if charged else budget)

    yield from rec((), budget0)


def _length_filter(spec) -> Callable[[int], bool]:
    """``None`` | ``('exact', l)`` | ``('paired', n)`` | ``('bounded', l)``."""
    if spec is None:
        return lambda l: True
    kind, n = spec
    if kind == "exact":
        return lambda l: l == n
    if kind == "paired":
        return lambda l: l in (2 * n - 1, 2 * n) or l == 0 and n == 0
    if kind == "bounded":
        return lambda l: l <= n
    raise ValueError(f"unknown length filter {spec!r}")


def max_length_of(spec) -> int | None:
    if spec is None:
        return None
    kind, n = spec
    return 2 * n if kind == "paired" else n


# --- statistics as monomials -----------------------------------------------

def refined_monomial(lam: Sequence[int], scheme: StatScheme, ctx: TruncationContext) -> LaurentPoly:
    return LaurentPoly.monomial(ctx, _scheme_monomial(lam, scheme, ctx))


def _scheme_monomial(lam, scheme: StatScheme, ctx: TruncationContext) -> Monomial:
    tag = scheme.tag
    if tag is Scheme.PLAIN:
        return ctx.mono(q=sum(lam))
    if tag is Scheme.ALT:
        return ctx.mono(z=alt_sum(lam), q=sum(lam))
    if tag is Scheme.SCHMIDT:
        return ctx.mono(z=alt_sum(lam), q=schmidt_weight(lam))
    if len(lam) > scheme.m:
        raise ValueError(f"partition of length {len(lam)} needs more than {scheme.m} variables")
    return ctx.mono(**{f"x{i}": p for i, p in enumerate(lam, 1)})


def brute_series(f: FamilySpec, scheme: StatScheme, ctx: TruncationContext) -> LaurentPoly:
    """Sum of the scheme monomial over members of ``f``, by enumeration.

    PLAIN and ALT need a context grading ``q`` with weight 1; SCHMIDT grades
    ``q`` by the Schmidt weight so the enumeration runs over S(lambda) <= order.
    """
    wq = ctx.weights[ctx.index("q")]
    if wq != 1:
        raise ValueError("brute_series expects q to carry weight 1")
    if "z" in ctx.vars.names and ctx.weights[ctx.index("z")] != 0:
        raise ValueError("brute_series expects z to carry weight 0")
    if scheme.tag is Scheme.SCHMIDT:
        members = family_members(f, max_schmidt=ctx.order)
    elif scheme.tag in (Scheme.PLAIN, Scheme.ALT):
        members = family_members(f, max_weight=ctx.order)
    else:
        raise ValueError("use brute_refined for the REFINED scheme")
    terms: dict[tuple[int, ...], int] = {}
    for lam in members:
        e = _scheme_monomial(lam, scheme, ctx).exps
        terms[e] = terms.get(e, 0) + 1
    return LaurentPoly(ctx, terms)


def refined_context(m: int, order: int, cap: int | None = None) -> TruncationContext:
    names = [f"x{i}" for i in range(1, m + 1)]
    caps = {v: cap for v in names} if cap is not None else None
    return TruncationContext.build(names, order, caps=caps)


def brute_refined(f: FamilySpec, length_filter, ctx: TruncationContext) -> LaurentPoly:
    """Sum of ``x^lambda`` over members of ``f`` whose length passes the filter.

    ``ctx`` must contain ``x1..xm`` with weight 1 on each; other variables
    are left at exponent zero.
    """
    m = sum(1 for v in ctx.vars if v[0] == "x" and v[1:].isdigit())
    need = max_length_of(length_filter)
    if need is None:
        need = ctx.order
    if m < need:
        raise ValueError(f"length filter needs {need} variables, context has {m}")
    keep = _length_filter(length_filter)
    idx = [ctx.index(f"x{i}") for i in range(1, m + 1)]
    for i in idx:
        if ctx.weights[i] != 1:
            raise ValueError("brute_refined expects weight 1 on every x variable")
    terms: dict[tuple[int, ...], int] = {}
    zero = [0] * ctx.nvars
    for lam in family_members(f, max_weight=ctx.order, max_length=max_length_of(length_filter)):
        if not keep(len(lam)):
            continue
        e = list(zero)
        for i, p in enumerate(lam):
            e[idx[i]] = p
        e = tuple(e)
        terms[e] = terms.get(e, 0) + 1
    return LaurentPoly(ctx, terms)
