"""Sparse multivariate Laurent polynomials under weighted-degree truncation.

Every series in the package is a :class:`LaurentPoly`: a dict from exponent
tuples to Python ints, bound to a :class:`TruncationContext` that fixes the
variables, their grading weights, the truncation order and optional
per-variable exponent caps.  Coefficients are exact integers.

Truncation drops every monomial whose weighted degree exceeds the order (or
whose exponent exceeds a cap).  That is only coherent for factors without
negative-degree terms, so the builders here (:func:`expand_product`,
:func:`pochhammer_finite`, :func:`pochhammer_infinite`) carry enough
headroom through intermediate products to keep the final result exact up to
the order even when a factor such as ``1 + q^-1`` is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

INT32_MAX = 2**31 - 1


class ContextMismatch(ValueError):
    pass


class ExponentOverflow(OverflowError):
    pass


class NonContractingError(ValueError):
    """A geometric series or infinite product would not terminate."""


class UnmappedVariable(KeyError):
    pass


@dataclass(frozen=True)
class VarTable:
    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None


@dataclass(frozen=True)
class Monomial:
    """Signed monomial ``sign * prod v_i^exps[i]``."""

    exps: tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        for e in self.exps:
            if abs(e) > INT32_MAX:
                raise ExponentOverflow(f"exponent {e} does not fit 32 bits")

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(_add_exps(self.exps, other.exps), self.sign * other.sign)

    def __pow__(self, k: int) -> Monomial:
        sign = self.sign if k % 2 else 1
        return Monomial(tuple(e * k for e in self.exps), sign)

    def __neg__(self) -> Monomial:
        return Monomial(self.exps, -self.sign)

    def __truediv__(self, other: Monomial) -> Monomial:
        return self * other.inverse()

    def inverse(self) -> Monomial:
        return Monomial(tuple(-e for e in self.exps), self.sign)

    @property
    def is_one(self) -> bool:
        return self.sign == 1 and not any(self.exps)


def _add_exps(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = tuple(x + y for x, y in zip(a, b))
    for e in out:
        if e > INT32_MAX or e < -INT32_MAX:
            raise ExponentOverflow(f"exponent {e} does not fit 32 bits")
    return out


@dataclass(frozen=True)
class TruncationContext:
    """Variables, grading and truncation limits shared by a family of series.

    ``caps[i]`` (when not None) is an upper bound on the exponent of variable
    ``i``; ``lambdas`` names the variables eliminated by the Omega operator.
    """

    vars: VarTable
    weights: tuple[int, ...]
    order: int
    caps: tuple[int | None, ...] = ()
    lambdas: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.vars)
        if len(self.weights) != n:
            raise ValueError("one weight per variable required")
        if not self.caps:
            object.__setattr__(self, "caps", (None,) * n)
        if len(self.caps) != n:
            raise ValueError("one cap slot per variable required")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if not any(w > 0 for w in self.weights):
            raise ValueError("at least one variable needs a positive weight")
        if self.order < 0:
            raise ValueError("order must be non-negative")
        for name in self.lambdas:
            if self.weights[self.vars.index(name)] != 0:
                raise ValueError(f"lambda variable {name} must have weight 0")

    @classmethod
    def build(
        cls,
        names: Sequence[str],
        order: int,
        weights: Mapping[str, int] | Sequence[int] | None = None,
        caps: Mapping[str, int] | None = None,
        lambdas: Iterable[str] = (),
    ) -> TruncationContext:
        """Convenience constructor; unspecified weights default to 1, lambdas to 0."""
        lambdas = frozenset(lambdas)
        if weights is None:
            weights = {}
        if isinstance(weights, Mapping):
            w = tuple(
                weights.get(v, 0 if v in lambdas else 1) for v in names
            )
        else:
            w = tuple(weights)
        caps = caps or {}
        c = tuple(caps.get(v) for v in names)
        return cls(VarTable(tuple(names)), w, order, c, lambdas)

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        return self.vars.index(name)

    def degree(self, exps: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, exps))

    def admits(self, exps: Sequence[int]) -> bool:
        if self.degree(exps) > self.order:
            return False
        for e, c in zip(exps, self.caps):
            if c is not None and e > c:
                return False
        return True

    def mono(self, sign: int = 1, **exps: int) -> Monomial:
        """``ctx.mono(q=2, z=-1)`` is q^2/z."""
        v = [0] * self.nvars
        for name, e in exps.items():
            v[self.index(name)] += e
        return Monomial(tuple(v), sign)

    def var(self, name: str) -> Monomial:
        return self.mono(**{name: 1})

    def one(self) -> Monomial:
        return Monomial((0,) * self.nvars)

    def with_order(self, order: int) -> TruncationContext:
        return TruncationContext(self.vars, self.weights, order, self.caps, self.lambdas)

    def widened(self, extra: int, cap_extra: Sequence[int] | None = None) -> TruncationContext:
        caps = self.caps
        if cap_extra is not None:
            caps = tuple(
                None if c is None else c + d for c, d in zip(self.caps, cap_extra)
            )
        return TruncationContext(self.vars, self.weights, self.order + extra, caps, self.lambdas)

    def without_lambdas(self) -> TruncationContext:
        keep = [i for i, v in enumerate(self.vars) if v not in self.lambdas]
        return TruncationContext(
            VarTable(tuple(self.vars.names[i] for i in keep)),
            tuple(self.weights[i] for i in keep),
            self.order,
            tuple(self.caps[i] for i in keep),
            frozenset(),
        )

    def format_monomial(self, exps: Sequence[int]) -> str:
        parts = []
        for name, e in zip(self.vars, exps):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"


class LaurentPoly:
    """Immutable truncated Laurent polynomial with integer coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: TruncationContext, terms: Mapping[tuple[int, ...], int] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            for e, c in terms.items():
                if c and ctx.admits(e):
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, ctx, terms):
        # caller guarantees non-zero coefficients and admissible exponents
        p = object.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        return p

    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {(0,) * ctx.nvars: 1})

    @classmethod
    def monomial(cls, ctx, m: Monomial, coeff: int = 1):
        return cls(ctx, {m.exps: m.sign * coeff})

    @classmethod
    def from_dict(cls, ctx, data: Mapping[Mapping[str, int] | tuple, int] | Iterable):
        """Build from ``{(('q', 2),): 3, ...}``-style or exponent-tuple keys."""
        terms: dict[tuple[int, ...], int] = {}
        items = data.items() if isinstance(data, Mapping) else data
        for key, c in items:
            if isinstance(key, Mapping):
                exps = ctx.mono(**key).exps
            elif key and isinstance(key[0], tuple):
                exps = ctx.mono(**dict(key)).exps
            else:
                exps = tuple(key)
            terms[exps] = terms.get(exps, 0) + c
        return cls(ctx, terms)

    def _check(self, other: LaurentPoly):
        if self.ctx != other.ctx:
            raise ContextMismatch("operands live in different truncation contexts")

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.one(self.ctx) * other if other else LaurentPoly.zero(self.ctx)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return LaurentPoly.zero(self.ctx)
            return LaurentPoly._raw(self.ctx, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        return LaurentPoly._raw(self.ctx, _mul_terms(self.terms, other.terms, self.ctx))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported; use expand_geometric")
        out = LaurentPoly.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == ({(0,) * self.ctx.nvars: other} if other else {})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, m: Monomial | Mapping[str, int] | None = None, **exps: int) -> int:
        if m is None:
            m = self.ctx.mono(**exps)
        elif isinstance(m, Mapping):
            m = self.ctx.mono(**m)
        return m.sign * self.terms.get(m.exps, 0)

    def items(self):
        return self.terms.items()

    def sorted_items(self):
        """Terms ordered by weighted degree, then exponent tuple."""
        return sorted(self.terms.items(), key=lambda t: (self.ctx.degree(t[0]), t[0]))

    def min_degree(self) -> int | None:
        if not self.terms:
            return None
        return min(self.ctx.degree(e) for e in self.terms)

    def truncate(self, ctx: TruncationContext | None = None) -> LaurentPoly:
        """Re-truncate under ``ctx`` (same variables, possibly tighter limits)."""
        ctx = ctx or self.ctx
        if ctx.vars != self.ctx.vars:
            raise ContextMismatch("truncate cannot change the variable table")
        return LaurentPoly(ctx, self.terms)

    def coefficients(self, var: str) -> dict[int, int]:
        """Univariate view: exponent of ``var`` -> coefficient (other vars must be 0)."""
        i = self.ctx.index(var)
        out = {}
        for e, c in self.terms.items():
            if any(x for j, x in enumerate(e) if j != i):
                raise ValueError("series is not univariate in " + var)
            out[e[i]] = c
        return dict(sorted(out.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        chunks = []
        for e, c in self.sorted_items():
            mono = self.ctx.format_monomial(e)
            if mono == "1":
                chunks.append(str(c))
            elif c == 1:
                chunks.append(mono)
            elif c == -1:
                chunks.append("-" + mono)
            else:
                chunks.append(f"{c}*{mono}")
        return " + ".join(chunks).replace("+ -", "- ")


def _mul_terms(a: Mapping, b: Mapping, ctx: TruncationContext) -> dict:
    """Convolution of two term dicts, truncated under ``ctx``."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    weights = ctx.weights
    order = ctx.order
    capped = [(i, c) for i, c in enumerate(ctx.caps) if c is not None]
    bl = sorted(
        ((sum(w * x for w, x in zip(weights, e)), e, c) for e, c in b.items()),
        key=lambda t: t[0],
    )
    out: dict[tuple[int, ...], int] = {}
    get = out.get
    for ea, ca in a.items():
        da = sum(w * x for w, x in zip(weights, ea))
        limit = order - da
        for db, eb, cb in bl:
            if db > limit:
                break
            e = tuple(x + y for x, y in zip(ea, eb))
            if capped and any(e[i] > c for i, c in capped):
                continue
            out[e] = get(e, 0) + ca * cb
    for e in out:
        for x in e:
            if x > INT32_MAX or x < -INT32_MAX:
                raise ExponentOverflow(f"exponent {x} does not fit 32 bits")
    return {e: c for e, c in out.items() if c}


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def poly_coeff(p: LaurentPoly, m: Monomial) -> int:
    return p.coeff(m)


def substitute_monomial(
    p: LaurentPoly,
    mapping: Mapping[str, Monomial],
    target_ctx: TruncationContext,
) -> LaurentPoly:
    """Apply the monomial homomorphism ``v -> mapping[v]`` and truncate.

    Variables of ``p`` that never occur with a non-zero exponent may be left
    out of ``mapping``.
    """
    src = p.ctx.vars.names
    used = set()
    for e in p.terms:
        used.update(i for i, x in enumerate(e) if x)
    images = []
    for i, name in enumerate(src):
        if name in mapping:
            images.append(mapping[name])
        elif i in used:
            raise UnmappedVariable(name)
        else:
            images.append(None)
    out: dict[tuple[int, ...], int] = {}
    zero = (0,) * target_ctx.nvars
    for e, c in p.terms.items():
        img = Monomial(zero)
        for i, x in enumerate(e):
            if x:
                img = img * images[i] ** x
        out[img.exps] = out.get(img.exps, 0) + img.sign * c
    return LaurentPoly(target_ctx, out)


def expand_geometric(m: Monomial, ctx: TruncationContext) -> LaurentPoly:
    """Truncated ``1 + m + m^2 + ...``, the series inverse of ``1 - m``."""
    return expand_product(ctx, geometric=[m])


def _geometric_shift(acc: dict, m: Monomial, ctx: TruncationContext) -> dict:
    """``acc / (1 - m)`` truncated; ``m`` must have positive degree."""
    out = dict(acc)
    cur = acc
    while cur:
        nxt = {}
        for e, c in cur.items():
            f = _add_exps(e, m.exps)
            if ctx.admits(f):
                nxt[f] = c * m.sign
        for e, c in nxt.items():
            out[e] = out.get(e, 0) + c
        cur = nxt
    return {e: c for e, c in out.items() if c}


def _binomial_terms(m: Monomial, coeff: int = 1) -> dict:
    one = (0,) * len(m.exps)
    if m.exps == one:
        return {one: coeff + m.sign * coeff} if coeff + m.sign * coeff else {}
    return {one: coeff, m.exps: m.sign * coeff}


def expand_product(
    ctx: TruncationContext,
    prefactor: Monomial | None = None,
    binomials: Sequence[Monomial] = (),
    geometric: Sequence[Monomial] = (),
    finite: Sequence[Mapping[tuple[int, ...], int]] = (),
) -> LaurentPoly:
    """Expand ``prefactor * prod(1 + b) * prod(finite) / prod(1 - g)`` exactly up to ``ctx``.

    Negative-degree pieces in the numerator are handled by computing
    intermediate products with enough extra order (and cap) headroom that
    nothing which could fall back below the limits is discarded.  Every
    geometric base must have strictly positive weighted degree and must not
    lower any capped exponent.
    """
    n = ctx.nvars
    for g in geometric:
        if ctx.degree(g.exps) <= 0:
            raise NonContractingError(
                f"geometric base {ctx.format_monomial(g.exps)} has non-positive degree"
            )
        if any(c is not None and x < 0 for x, c in zip(g.exps, ctx.caps)):
            raise NonContractingError("geometric base lowers a capped exponent")

    factors: list[dict] = []
    if prefactor is not None and not prefactor.is_one:
        factors.append({prefactor.exps: prefactor.sign})
    factors.extend(_binomial_terms(b) for b in binomials)
    factors.extend(dict(f) for f in finite)

    # deficiency of each finite factor: how far below zero it can pull degree/caps
    defs = []
    for f in factors:
        if not f:
            return LaurentPoly.zero(ctx)
        d = max(0, -min(ctx.degree(e) for e in f))
        cd = tuple(
            max(0, -min(e[i] for e in f)) if ctx.caps[i] is not None else 0
            for i in range(n)
        )
        defs.append((d, cd))
    rem = sum(d for d, _ in defs)
    rem_caps = [sum(cd[i] for _, cd in defs) for i in range(n)]

    acc = {(0,) * n: 1}
    for f, (d, cd) in zip(factors, defs):
        rem -= d
        for i in range(n):
            rem_caps[i] -= cd[i]
        acc = _mul_terms(acc, f, ctx.widened(rem, rem_caps))
        if not acc:
            return LaurentPoly.zero(ctx)
    for g in geometric:
        acc = _geometric_shift(acc, g, ctx)
    return LaurentPoly(ctx, acc)


def pochhammer_factors(base: Monomial, step: Monomial, n: int) -> list[Monomial]:
    """The monomials ``-base*step^i`` so that ``(base; step)_n = prod(1 + m)``."""
    return [-(base * step**i) for i in range(n)]


def pochhammer_finite(base: Monomial, step: Monomial, n: int, ctx: TruncationContext) -> LaurentPoly:
    """``(base; step)_n = prod_{i<n} (1 - base*step^i)``, truncated."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return expand_product(ctx, binomials=pochhammer_factors(base, step, n))


def _infinite_factor_count(base: Monomial, step: Monomial, ctx: TruncationContext, headroom: int) -> int:
    ds = ctx.degree(step.exps)
    db = ctx.degree(base.exps)
    if ds <= 0:
        raise NonContractingError("step must have positive weighted degree")
    # factors with degree > order + headroom cannot reach the truncated range
    count = 0
    while db + count * ds <= ctx.order + headroom:
        count += 1
    return count


def pochhammer_infinite(
    base: Monomial, step: Monomial, ctx: TruncationContext, invert: bool = False
) -> LaurentPoly:
    """``(base; step)_inf`` truncated, or its reciprocal when ``invert`` is set."""
    ds = ctx.degree(step.exps)
    db = ctx.degree(base.exps)
    if ds <= 0:
        raise NonContractingError("step must have positive weighted degree")
    if invert:
        if db <= 0:
            raise NonContractingError("inverted product needs a base of positive degree")
        k = _infinite_factor_count(base, step, ctx, 0)
        return expand_product(ctx, geometric=[base * step**i for i in range(k)])
    # negative-degree leading factors can pull later terms back down
    headroom = sum(max(0, -(db + i * ds)) for i in range(max(0, -db // ds + 1)))
    k = _infinite_factor_count(base, step, ctx, headroom)
    return expand_product(ctx, binomials=pochhammer_factors(base, step, k))
