import pytest
from hypothesis import given, settings, strategies as st

from partan.omega import (
    ALL, ALL_RULES, G1, G1P, G2, G2P, P1, P1P, P2, P2P, Factor, ProductExpr, RuleId, SumExpr,
    UnsupportedCrudeForm, check_base_rule, check_rule, chi_block, crude_context, crude_form,
    expand_expr, omega_ge, rule_context, verify_crude,
)
from partan.partitions import brute_refined
from partan.report import compare_sides
from partan.series import LaurentPoly, TruncationContext

G, O = Factor.geom_inv, Factor.one_plus

CTX = TruncationContext.build(["x", "y", "l"], 5, lambdas=["l"])
terms = st.dictionaries(
    st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-4, 4)), st.integers(-4, 4), max_size=20
)
lambda_free = st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), st.integers(-4, 4), max_size=10)


def poly(d):
    return LaurentPoly(CTX, d)


def lift(d):
    return LaurentPoly(CTX, {(a, b, 0): c for (a, b), c in d.items()})


class TestExpand:
    def test_double_geometric(self):
        ctx = TruncationContext.build(["x", "y", "l"], 2, lambdas=["l"])
        x, y, l = ctx.var("x"), ctx.var("y"), ctx.var("l")
        got = expand_expr(SumExpr.of(l**-1, G(x * l), G(y / l)), ctx)
        expect = {(n, m, n - m - 1): 1 for n in range(3) for m in range(3) if n + m <= 2}
        assert got.terms == expect

    def test_one_plus(self):
        ctx = TruncationContext.build(["x", "l"], 3, lambdas=["l"])
        got = expand_expr(SumExpr.of(ctx.one(), O(ctx.mono(x=1, l=1))), ctx)
        assert got.terms == {(0, 0): 1, (1, 1): 1}

    def test_chi_block_examples(self):
        ctx = TruncationContext.build(["x", "l"], 3, lambdas=["l"])
        x, l = ctx.var("x"), ctx.var("l")
        assert expand_expr(chi_block(x, l, 2), ctx).terms == {(0, 0): 1, (1, -1): 1, (2, 2): 1, (3, 1): 1}
        assert expand_expr(chi_block(x, l, 0), ctx).terms == {(n, n): 1 for n in range(4)}
        assert expand_expr(chi_block(x, l, 1), ctx).terms == {(0, 0): 1, (1, 0): 1, (2, 2): 1, (3, 2): 1}
        with pytest.raises(ValueError):
            chi_block(x, l, -1)

    def test_sum_expr_distributes(self):
        ctx = TruncationContext.build(["x", "y"], 6)
        a = SumExpr.of(ctx.one(), G(ctx.var("x"))) + SumExpr.of(ctx.var("y"))
        b = SumExpr.of(ctx.one(), O(ctx.var("y")))
        assert expand_expr(a * b, ctx) == expand_expr(a, ctx) * expand_expr(b, ctx)

    def test_product_expr_mono_factor(self):
        ctx = TruncationContext.build(["x"], 4)
        e = ProductExpr(ctx.one(), (Factor.mono(ctx.mono(x=2)), G(ctx.var("x"))))
        assert e.expand(ctx).terms == {(2,): 1, (3,): 1, (4,): 1}


class TestOmega:
    def test_examples(self):
        ctx = TruncationContext.build(["x", "y", "l"], 3, lambdas=["l"])
        out = ctx.without_lambdas()
        assert omega_ge(LaurentPoly(ctx, {(2, 0, 0): 1})).terms == {(2, 0): 1}
        assert omega_ge(LaurentPoly(ctx, {(1, 0, -1): 1})) == 0
        s = LaurentPoly(ctx, {(n, m, n - m - 1): 1 for n in range(4) for m in range(4) if n + m <= 3})
        got = omega_ge(s)
        assert got.ctx == out
        assert got.terms == {(1, 0): 1, (2, 0): 1, (3, 0): 1, (2, 1): 1}

    @settings(max_examples=300, deadline=None)
    @given(terms, terms)
    def test_linear(self, a, b):
        assert omega_ge(poly(a) + poly(b)) == omega_ge(poly(a)) + omega_ge(poly(b))

    @settings(max_examples=300, deadline=None)
    @given(lambda_free)
    def test_idempotent_on_lambda_free_input(self, d):
        once = omega_ge(lift(d))
        lifted = LaurentPoly(CTX, {e + (0,): c for e, c in once.terms.items()})
        assert omega_ge(lifted) == once

    @settings(max_examples=300, deadline=None)
    @given(terms, lambda_free)
    def test_lambda_free_factors_pull_out(self, a, p):
        lhs = omega_ge(poly(a) * lift(p))
        rhs = omega_ge(poly(a)) * omega_ge(lift(p))
        assert lhs == rhs


class TestRules:
    @pytest.mark.parametrize("rule", ALL_RULES, ids=str)
    def test_rule_at_degree_12(self, rule):
        assert check_rule(rule, 12).passed

    @pytest.mark.parametrize("k", range(6))
    def test_chi(self, k):
        assert check_rule(RuleId("CHI", k), 12).passed

    def test_base_rule_collapsed(self):
        r = check_base_rule(12)
        assert r.passed and r.params["A"] == list(range(7))

    def test_base_rule_example(self):
        ctx = rule_context(6)
        x, y, l = ctx.var("x"), ctx.var("y"), ctx.var("l")
        lhs = omega_ge(expand_expr(SumExpr.of(l**-1, G(x * l), G(y / l)), ctx))
        rhs = omega_ge(expand_expr(SumExpr.of(x, G(x), G(x * y)), ctx))
        assert lhs == rhs

    def test_r0_with_y_and_z_zero(self):
        r = check_rule(RuleId("R0"), 8, zero=("y", "z"))
        assert r.passed and r.params["zero"] == ["y", "z"]
        ctx = rule_context(8)
        geometric_x = omega_ge(expand_expr(SumExpr.of(ctx.var("x"), G(ctx.var("x"))), ctx))
        assert geometric_x.coeff(x=5) == 1

    def test_rule_id_validation(self):
        with pytest.raises(ValueError):
            RuleId("CHI")
        with pytest.raises(ValueError):
            RuleId("R10")
        with pytest.raises(ValueError):
            check_rule(RuleId("R1"), 0)

    def test_perturbed_rule_is_caught(self):
        # R0 with lambda^-1 in place of lambda^-2 is false
        ctx = rule_context(8)
        x, y, z, l = (ctx.var(v) for v in "xyzl")
        arg = SumExpr.of(l**-1, O(z / l), G(x * l**2), G(y / l**2))
        closed = SumExpr.of(x, O(x * z), G(x), G(x * y))
        r = compare_sides("perturbed", {}, 8, {
            "omega": omega_ge(expand_expr(arg, ctx)),
            "closed_form": omega_ge(expand_expr(closed, ctx)),
        }, 0.0)
        assert r.status == "fail"
        assert r.first_mismatch is not None


SUPPORTED = (
    [(ALL, "bounded", n) for n in range(1, 5)]
    + [(f, "exact", n) for f in (G1, G2) for n in range(1, 5)]
    + [(f, "paired", n) for f in (G1P, G2P) for n in range(1, 3)]
    + [(f, m, n) for f in (P1, P2) for m in ("exact", "bounded") for n in range(1, 5)]
    + [(f, m, n) for f in (P1P, P2P) for m in ("exact", "bounded") for n in range(1, 5)]
)


def _case_id(case):
    f, mode, n = case
    return f"{f.name}-{mode}-{n}"


class TestCrudeForms:
    @pytest.mark.parametrize("case", SUPPORTED, ids=_case_id)
    def test_degree_8_cap_8(self, case):
        f, mode, n = case
        assert verify_crude(f, mode, n, 8, 8).passed

    @pytest.mark.parametrize("case", SUPPORTED, ids=_case_id)
    def test_degree_14(self, case):
        # at degree 8 some lengths have no members yet; 14 makes every case non-trivial
        f, mode, n = case
        r = verify_crude(f, mode, n, 14, 14)
        assert r.passed

    def test_unsupported(self):
        for f, mode in [(G1, "paired"), (G1P, "exact"), (ALL, "exact"), (G2, "bounded")]:
            with pytest.raises(UnsupportedCrudeForm):
                verify_crude(f, mode, 1, 8)

    def test_all_partitions_closed_form(self):
        r = verify_crude(ALL, "bounded", 3, 8, 8)
        assert r.passed
        assert r.params["closed_form"] == "prod_{i=1}^{3} 1/(1 - X_i)"
        assert "closed form" in r.params["sides"]

    def test_g2p_paired_1(self):
        assert verify_crude(G2P, "paired", 1, 8).passed

    def test_g1_exact_2_prefactor(self):
        ctx = crude_context(2, 2, 8, 8)
        e = crude_form(G1, "exact", 2, ctx)
        assert {t.prefactor for t in e.terms} == {ctx.mono(l1=-2, l2=-1)}

    def test_g1_matches_displayed_final_form(self):
        # hand transcription of the length-3 display:
        # (1+x1)/(1-x1^2 l1^2) (1+x2/l1) prod_{i=2,3} 1/(1-x_i^2 l_i^2/l_{i-1}^2)
        #   (1 + x3 l3/l2) / (l1^2 l2^2 l3)
        ctx = crude_context(3, 3, 12, 12)
        v = ctx.var
        x1, x2, x3 = v("x1"), v("x2"), v("x3")
        l1, l2, l3 = v("l1"), v("l2"), v("l3")
        display = SumExpr.of(
            (l1**2 * l2**2 * l3).inverse(),
            O(x1), G(x1**2 * l1**2), O(x2 / l1),
            G(x2**2 * l2**2 / l1**2), G(x3**2 * l3**2 / l2**2), O(x3 * l3 / l2),
        )
        ours = omega_ge(expand_expr(crude_form(G1, "exact", 3, ctx), ctx))
        theirs = omega_ge(expand_expr(display, ctx))
        assert ours == theirs
        assert ours == brute_refined(G1, ("exact", 3), ours.ctx)
        assert len(ours) > 0

    def test_all_bounded_matches_display(self):
        ctx = crude_context(3, 3, 8, 8)
        v = ctx.var
        display = SumExpr.of(
            ctx.one(),
            G(v("x1") * v("l1")), G(v("x2") * v("l2") / v("l1")), G(v("x3") * v("l3") / v("l2")),
        )
        ours = omega_ge(expand_expr(crude_form(ALL, "bounded", 3, ctx), ctx))
        assert ours == omega_ge(expand_expr(display, ctx))

    def test_wrong_family_is_caught(self):
        # the G1 crude form does not enumerate G2
        ctx = crude_context(2, 2, 10, 10)
        ours = omega_ge(expand_expr(crude_form(G1, "exact", 2, ctx), ctx))
        other = brute_refined(G2, ("exact", 2), ours.ctx)
        r = compare_sides("negative", {}, 10, {"omega": ours, "brute": other}, 0.0)
        assert r.status == "fail"
