import pytest
from hypothesis import given, settings, strategies as st

from partan.series import (
    ContextMismatch, ExponentOverflow, INT32_MAX, LaurentPoly, Monomial, NonContractingError,
    TruncationContext, UnmappedVariable, VarTable, expand_geometric, pochhammer_finite,
    pochhammer_infinite, poly_add, poly_coeff, poly_mul, substitute_monomial,
)

PROPERTY = settings(max_examples=1000, deadline=None)

# q graded, z a free Laurent variable of weight 0, x graded and capped
CTX = TruncationContext.build(["q", "z", "x"], 6, weights={"z": 0}, caps={"x": 3})
WIDE = TruncationContext.build(["q", "z", "x"], 30, weights={"z": 0})

exps = st.tuples(st.integers(0, 6), st.integers(-3, 3), st.integers(0, 3))
wide_exps = st.tuples(st.integers(0, 10), st.integers(-3, 3), st.integers(0, 6))
coeffs = st.integers(-5, 5)


def polys(ctx=CTX, keys=exps):
    return st.dictionaries(keys, coeffs, max_size=30).map(lambda d: LaurentPoly(ctx, d))


def q_series(order, **kw):
    return TruncationContext.build(["q"], order, **kw)


def test_vartable_rejects_duplicates():
    with pytest.raises(ValueError):
        VarTable(("q", "q"))
    assert VarTable(("q", "z")).index("z") == 1


def test_context_invariants():
    with pytest.raises(ValueError):
        TruncationContext.build(["z"], 3, weights={"z": 0})
    with pytest.raises(ValueError):
        TruncationContext.build(["q", "l"], 3, weights={"l": 1}, lambdas=["l"])
    with pytest.raises(ValueError):
        q_series(-1)


def test_stored_terms_are_nonzero_and_admissible():
    p = LaurentPoly(CTX, {(0, 0, 0): 0, (7, 0, 0): 1, (1, 0, 4): 2, (1, -9, 1): 3})
    assert p.terms == {(1, -9, 1): 3}


def test_exponent_overflow_is_an_error():
    with pytest.raises(ExponentOverflow):
        Monomial((INT32_MAX,)) * Monomial((1,))
    with pytest.raises(ExponentOverflow):
        Monomial((2**31,))


def test_mixed_contexts_are_rejected():
    a = LaurentPoly.one(q_series(3))
    b = LaurentPoly.one(q_series(4))
    with pytest.raises(ContextMismatch):
        a + b
    with pytest.raises(ContextMismatch):
        a * b


class TestExamples:
    ctx = q_series(3)

    def q(self, *cs):
        return LaurentPoly(self.ctx, {(i,): c for i, c in enumerate(cs)})

    def test_add(self):
        p = self.q(0, 1, 1)
        assert poly_add(LaurentPoly.zero(self.ctx), p) == p
        assert poly_add(self.q(0, 1, 1), self.q(0, -1)) == self.q(0, 0, 1)
        assert poly_add(self.q(1, -1), self.q(1, 1)) == 2

    def test_mul(self):
        assert poly_mul(self.q(1, -1), self.q(1, 1, 1, 1)) == 1
        p = self.q(3, 0, -2)
        assert poly_mul(p, LaurentPoly.one(self.ctx)) == p
        zq = TruncationContext.build(["z", "q"], 3, weights={"z": 0})
        a = LaurentPoly(zq, {(0, 0): 1, (1, 1): 1})
        b = LaurentPoly(zq, {(0, 0): 1, (2, 2): 1})
        expect = LaurentPoly(zq, {(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): 1})
        assert poly_mul(a, b) == expect

    def test_coeff(self):
        assert poly_coeff(LaurentPoly.one(self.ctx), self.ctx.one()) == 1
        zq = TruncationContext.build(["z", "q"], 5, weights={"z": 0})
        p = LaurentPoly(zq, {(0, 0): 1, (1, 1): 1}) ** 2
        assert poly_coeff(p, zq.mono(z=2, q=2)) == 1
        assert p.coeff(z=1, q=1) == 2
        assert poly_coeff(p, zq.mono(q=4)) == 0

    def test_substitute(self):
        src = TruncationContext.build(["x1", "x2"], 10)
        p = LaurentPoly.monomial(src, src.mono(x1=4, x2=2))
        plain = q_series(10)
        assert substitute_monomial(p, {"x1": plain.var("q"), "x2": plain.var("q")}, plain).coeff(q=6) == 1
        zq = TruncationContext.build(["z", "q"], 10, weights={"z": 0})
        alt = substitute_monomial(p, {"x1": zq.mono(z=1, q=1), "x2": zq.mono(z=-1, q=1)}, zq)
        assert alt.terms == {(2, 6): 1}
        sch = substitute_monomial(p, {"x1": zq.mono(z=1, q=1), "x2": zq.mono(z=-1)}, zq)
        assert sch.terms == {(2, 4): 1}
        with pytest.raises(UnmappedVariable):
            substitute_monomial(p, {"x1": plain.var("q")}, plain)

    def test_geometric(self):
        assert expand_geometric(self.ctx.var("q"), self.ctx) == self.q(1, 1, 1, 1)
        xy = TruncationContext.build(["x", "y"], 3)
        assert expand_geometric(xy.mono(x=1, y=1), xy).terms == {(0, 0): 1, (1, 1): 1}
        zq = TruncationContext.build(["z", "q"], 4, weights={"z": 0})
        assert expand_geometric(zq.mono(z=2, q=2), zq).terms == {(0, 0): 1, (2, 2): 1, (4, 4): 1}
        with pytest.raises(NonContractingError):
            expand_geometric(zq.mono(z=1), zq)
        with pytest.raises(NonContractingError):
            expand_geometric(self.ctx.mono(q=-1), self.ctx)

    def test_pochhammer_finite(self):
        q = self.ctx.var("q")
        assert pochhammer_finite(q, q, 0, self.ctx) == 1
        assert pochhammer_finite(q, q, 2, self.ctx) == self.q(1, -1, -1, 1)
        ctx = TruncationContext.build(["q"], 3)
        p = pochhammer_finite(-ctx.mono(q=-1), ctx.mono(q=2), 2, ctx)
        assert p.terms == {(-1,): 1, (0,): 2, (1,): 1}

    def test_pochhammer_infinite(self):
        c3, c4, c5 = q_series(3), q_series(4), q_series(5)
        assert pochhammer_infinite(c3.var("q"), c3.mono(q=8), c3).terms == {(0,): 1, (1,): -1}
        assert pochhammer_infinite(c5.mono(q=2), c5.mono(q=4), c5).terms == {(0,): 1, (2,): -1}
        inv = pochhammer_infinite(c4.var("q"), c4.var("q"), c4, invert=True)
        assert [inv.coeff(q=i) for i in range(5)] == [1, 1, 2, 3, 5]
        with pytest.raises(NonContractingError):
            pochhammer_infinite(c4.one(), c4.var("q"), c4, invert=True)

    def test_pochhammer_infinite_with_negative_leading_base(self):
        # (-q^-3; q^2)_inf keeps (1+q^-3)(1+q^-1) which pull high terms down
        ctx = q_series(4)
        got = pochhammer_infinite(-ctx.mono(q=-3), ctx.mono(q=2), ctx)
        wide = q_series(40)
        full = pochhammer_finite(-wide.mono(q=-3), wide.mono(q=2), 25, wide)
        assert got == full.truncate(ctx)

    def test_repr(self):
        assert repr(self.q(1, 1, 2)) == "1 + q + 2*q^2"


@PROPERTY
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + LaurentPoly.zero(CTX) == a
    assert a * LaurentPoly.one(CTX) == a
    assert a - a == 0


@PROPERTY
@given(polys(WIDE, wide_exps), polys(WIDE, wide_exps))
def test_truncation_coherence(a, b):
    lhs = (a * b).truncate(CTX)
    rhs = a.truncate(CTX) * b.truncate(CTX)
    assert lhs == rhs


positive_monomials = st.tuples(st.integers(0, 4), st.integers(-3, 3), st.integers(0, 3)).filter(
    lambda e: e[0] + e[2] > 0
)


@PROPERTY
@given(positive_monomials, st.sampled_from([1, -1]))
def test_geometric_inverse_witness(e, sign):
    m = Monomial(e, sign)
    one_minus = LaurentPoly(CTX, {(0, 0, 0): 1}) - LaurentPoly.monomial(CTX, m)
    assert one_minus * expand_geometric(m, CTX) == 1


SRC = TruncationContext.build(["x1", "x2", "x3"], 40)
TGT = TruncationContext.build(["z", "q"], 12, weights={"z": 0})
src_monos = st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)).map(Monomial)
tgt_images = st.tuples(st.integers(-3, 3), st.integers(0, 3)).map(Monomial)


@PROPERTY
@given(src_monos, src_monos, st.tuples(tgt_images, tgt_images, tgt_images))
def test_substitution_is_a_monoid_homomorphism(m1, m2, images):
    mapping = dict(zip(["x1", "x2", "x3"], images))

    def sub(m):
        return substitute_monomial(LaurentPoly.monomial(SRC, m), mapping, TGT)

    assert sub(m1 * m2) == sub(m1) * sub(m2)


@PROPERTY
@given(
    st.tuples(st.integers(-3, 3), st.integers(-2, 2)),
    st.sampled_from([1, -1]),
    st.tuples(st.integers(1, 3), st.integers(-1, 1)),
    st.integers(0, 6),
)
def test_pochhammer_recurrence(base_e, sign, step_e, n):
    ctx = TruncationContext.build(["q", "z"], 8, weights={"z": 0})
    base, step = Monomial(base_e, sign), Monomial(step_e)
    factor = base * step**n
    # the new factor must itself be admissible, and if its degree is negative the
    # shorter product needs headroom above the order
    d = ctx.degree(factor.exps)
    wide = ctx.widened(max(0, -d, d - ctx.order))
    shorter = pochhammer_finite(base, step, n, wide)
    extended = shorter * (LaurentPoly.one(wide) - LaurentPoly.monomial(wide, factor))
    assert pochhammer_finite(base, step, n + 1, ctx) == extended.truncate(ctx)
