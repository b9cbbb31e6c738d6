"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import time
from collections import Counter

import pytest

import conftest
import test_series
from partan.identities import (
    BASE_IDS, BASE_OF_FAMILY, BIV_IDS, REF_IDS, check_conjecture, check_identity,
    product_side, refined_bounded_product, sum_side, base_context,
)
from partan.omega import (
    ALL, ALL_RULES, G1, G1P, G2, G2P, P1, P1P, P2, P2P, RuleId, check_base_rule, check_rule,
    verify_crude,
)
from partan.partitions import PLAIN, alt_sum, brute_refined, brute_series, conjugate, gen_partitions, refined_context

BASE_ORDER = 50
BASE_SECONDS = 10.0
GOLDEN = {
    (G1, 5): 2, (G1, 6): 3, (G2, 7): 2, (G1P, 6): 3, (G2P, 6): 2,
    (P1, 4): 2, (P1, 5): 3, (P2, 6): 3, (P1P, 4): 2, (P2P, 4): 2,
}
RULE_DEGREE = 12
CRUDE_DEGREE, CRUDE_CAP = 8, 8
REFINED_DEGREE, REFINED_INDICES = 16, 4
BIV_ORDER = 30
CLASSICAL = {"QGAUSS": 10, "QGAUSS_LIM": 12, "QLEBESGUE": 20}
STAT_WEIGHT = 25
CONJ_CASES = [(2, {0}), (2, {1}), (2, {0, 1}), (3, {0}), (3, {1, 2}), (4, {0, 2})]
CONJ_ORDER, CONJ_LENGTH, CONJ_REFINED_ORDER = 30, 4, 12
PROPERTY_EXAMPLES = 1000
SUITE_SECONDS = 15 * 60


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_criterion_1_base_identities(verdict):
    problems = []
    for iid in BASE_IDS:
        t0 = time.perf_counter()
        r = check_identity(iid, BASE_ORDER)
        dt = time.perf_counter() - t0
        if not r.passed:
            problems.append(f"{iid}: {r.first_mismatch}")
        elif r.params["stages"]["identity"] != ["sum", "product", "brute"]:
            problems.append(f"{iid}: sides {r.params['stages']}")
        if dt >= BASE_SECONDS:
            problems.append(f"{iid}: {dt:.1f}s")
    verdict(1, not problems, problems or f"8 base identities, sum = product = brute to q^{BASE_ORDER}, each < {BASE_SECONDS:.0f}s")


def test_criterion_2_golden_coefficients(verdict):
    problems = []
    for (fam, n), want in GOLDEN.items():
        ctx = base_context(n)
        got = {
            "brute": brute_series(fam, PLAIN, ctx).coeff(q=n),
            "sum": sum_side(BASE_OF_FAMILY[fam.tag], ctx).coeff(q=n),
            "product": product_side(BASE_OF_FAMILY[fam.tag], ctx).coeff(q=n),
        }
        if set(got.values()) != {want}:
            problems.append(f"{fam.name}@q^{n}: {got} != {want}")
    verdict(2, not problems, problems or f"{len(GOLDEN)} golden coefficients")


def test_criterion_3_omega_rules(verdict):
    reports = [check_base_rule(RULE_DEGREE)]
    reports += [check_rule(r, RULE_DEGREE) for r in ALL_RULES]
    reports += [check_rule(RuleId("CHI", k), RULE_DEGREE) for k in range(6)]
    bad = [r.check for r in reports if not r.passed]
    ok = not bad and reports[0].params["A"] == list(range(7))
    verdict(3, ok, bad or f"BASE(A=0..6), {len(ALL_RULES)} elimination rules, CHI(0..5) at degree {RULE_DEGREE}")


def test_criterion_4_crude_forms(verdict):
    cases = [(ALL, "bounded", n) for n in range(1, 5)]
    cases += [(f, "exact", n) for f in (G1, G2) for n in range(1, 5)]
    cases += [(f, "paired", n) for f in (G1P, G2P) for n in range(1, 3)]
    cases += [(f, m, n) for f in (P1, P2, P1P, P2P) for m in ("exact", "bounded") for n in range(1, 5)]
    bad = [(f.name, m, n) for f, m, n in cases if not verify_crude(f, m, n, CRUDE_DEGREE, CRUDE_CAP).passed]
    verdict(4, not bad, bad or f"{len(cases)} crude forms at degree {CRUDE_DEGREE}, cap {CRUDE_CAP}")


def test_criterion_5_refined_formulas(verdict):
    problems = []
    for rid in REF_IDS:
        r = check_identity(rid, REFINED_DEGREE)
        if not r.passed:
            problems.append(f"{rid}: {r.params.get('failed_stage')} {r.first_mismatch}")
    ctx = refined_context(REFINED_INDICES, REFINED_DEGREE)
    for n in range(1, REFINED_INDICES + 1):
        if refined_bounded_product("ALL", n, ctx) != brute_refined(ALL, ("bounded", n), ctx):
            problems.append(f"ALL bounded {n}")
    minus = check_identity("REF_G2P", REFINED_DEGREE, variant="minus")
    if minus.passed or minus.params.get("failed_stage") != "index 1":
        problems.append(f"REF_G2P minus transcription: {minus.status} {minus.params.get('failed_stage')}")
    verdict(5, not problems, problems or f"8 refined families plus ALL, n <= {REFINED_INDICES}, degree "
                                         f"{REFINED_DEGREE}; the minus form of G2' fails at n=1")


def test_criterion_6_bivariate(verdict):
    problems = []
    for iid in BIV_IDS:
        r = check_identity(iid, BIV_ORDER)
        stages = r.params["stages"]
        if not r.passed:
            problems.append(f"{iid}: {r.params.get('failed_stage')} {r.first_mismatch}")
        if "brute" not in stages["identity"]:
            problems.append(f"{iid}: no oracle side")
        if iid.endswith("_ALT") and "z=1" not in stages:
            problems.append(f"{iid}: no z=1 stage")
        if not iid.startswith(("BIV_G1_", "BIV_G2_")) and "product" not in stages["identity"]:
            problems.append(f"{iid}: no product side")
    verdict(6, not problems, problems or f"16 bivariate identities to q^{BIV_ORDER}, products and z=1 included")


def test_criterion_7_classical(verdict):
    bad = [iid for iid, n in CLASSICAL.items() if not check_identity(iid, n).passed]
    verdict(7, not bad, bad or "q-Gauss (10), its limit (12), q-Lebesgue (20)")


def test_criterion_8_combinatorics(verdict):
    parts = [lam for n in range(STAT_WEIGHT + 1) for lam in gen_partitions(n)]
    conj_ok = all(alt_sum(lam) == sum(1 for p in conjugate(lam) if p % 2) for lam in parts)
    odd, strict = Counter(), Counter()
    for lam in parts:
        if all(p % 2 for p in lam):
            odd[sum(lam), len(lam)] += 1
        if len(set(lam)) == len(lam):
            strict[sum(lam), alt_sum(lam)] += 1
    verdict(8, conj_ok and odd == strict,
            f"{len(parts)} partitions of weight <= {STAT_WEIGHT}: conjugate odd parts {conj_ok}, Sylvester {odd == strict}")


def test_criterion_9_conjecture(verdict):
    problems = []
    for k, T in CONJ_CASES:
        r = check_conjecture(T, k, CONJ_ORDER, length=CONJ_LENGTH, refined_order=CONJ_REFINED_ORDER)
        if not r.passed or r.params.get("label") != "evidence":
            problems.append(f"(k={k}, T={sorted(T)}): {r.status} {r.params.get('label')}")
    verdict(9, not problems, problems or f"{len(CONJ_CASES)} residue sets at q^{CONJ_ORDER} and length <= "
                                         f"{CONJ_LENGTH} at degree {CONJ_REFINED_ORDER}, labelled evidence")


def test_criterion_10_property_suites(verdict):
    props = [
        test_series.test_ring_axioms,
        test_series.test_truncation_coherence,
        test_series.test_geometric_inverse_witness,
        test_series.test_substitution_is_a_monoid_homomorphism,
        test_series.test_pochhammer_recurrence,
    ]
    counts = []
    for prop in props:
        settings = prop._hypothesis_internal_use_settings
        counts.append(settings.max_examples)
        prop()
    elapsed = time.perf_counter() - conftest.SESSION_START
    ok = min(counts) >= PROPERTY_EXAMPLES and elapsed < SUITE_SECONDS
    verdict(10, ok, f"{len(props)} property suites x {min(counts)} cases; suite so far {elapsed:.0f}s < {SUITE_SECONDS}s")
