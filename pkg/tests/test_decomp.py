from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from mahlernorm.algclass import AlgClass
from mahlernorm.classify import class_delta, class_invariants, is_projection_irreducible, minimal_field
from mahlernorm.decomp import (
    classes_equal, degree_components, m_factorization, m_operator, mahler2_inner, mahler_norm,
    project_Pn, project_PK, project_TK, project_Tn, simplify_text,
)
from mahlernorm.galoisctx import build_cubic_closure, build_multiquadratic, shipped_context
from mahlernorm.intpoly import IntPoly
from mahlernorm.placefn import h_p, inner_product

P = IntPoly.parse
TOL = mpmath.mpf("1e-25")
LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"

QUAD = shipped_context("quad2.json")
BIQ = build_multiquadratic([2, 3])
S3 = build_cubic_closure(P("x^3-x-1"))
BIQ_ELEMENTS = ["1+sqrt(2)", "2+sqrt(3)", "sqrt(2)+sqrt(3)", "2", "3", "sqrt(6)", "1+sqrt(3)",
                "3+sqrt(2)", "5+2*sqrt(6)", "2+sqrt(2)"]

fractions = st.tuples(st.integers(-4, 4), st.integers(1, 3)).map(lambda t: Fraction(*t))


@st.composite
def biq_classes(draw):
    f = AlgClass((), BIQ)
    for _ in range(draw(st.integers(1, 3))):
        f = f + BIQ.element(draw(st.sampled_from(BIQ_ELEMENTS))) * draw(fractions)
    return BIQ.canonical(f)


@st.composite
def s3_classes(draw):
    f = AlgClass((), S3)
    for i in range(3):
        f = f + S3.root_class(i) * draw(fractions)
    return S3.canonical(f)


def _labels(ctx):
    return [s.label for s in ctx.subfields]


def _zero(f):
    return f.is_zero() or classes_equal(f, AlgClass((), f.ctx))


# -- worked example in Q(sqrt(2)) ---------------------------------------------------------

def test_field_components_of_two_plus_sqrt2():
    f = QUAD.element("2+sqrt(2)")
    assert classes_equal(project_TK(QUAD, "Q", f), QUAD.element("sqrt(2)"))
    assert classes_equal(project_TK(QUAD, "Q(sqrt(2))", f), QUAD.element("1+sqrt(2)"))


def test_degree_projections_of_two_plus_sqrt2():
    f = QUAD.element("2+sqrt(2)")
    assert classes_equal(project_Pn(QUAD, 1, f), QUAD.element("sqrt(2)"))
    assert classes_equal(project_Pn(QUAD, 2, f), f)
    assert classes_equal(project_Tn(QUAD, 1, f), QUAD.element("sqrt(2)"))
    assert classes_equal(project_Tn(QUAD, 2, f), QUAD.element("1+sqrt(2)"))
    for n in (3, 4, 7):
        assert _zero(project_Tn(QUAD, n, f))


def test_factorization_texts():
    res = m_factorization(QUAD, QUAD.element("2+sqrt(2)"))
    assert {k: simplify_text(v) for k, v in res.joint.items()} == {
        ("Q", 1): "f[sqrt(2)]", ("Q(sqrt(2))", 2): "f[1 + sqrt(2)]"}


def test_factorization_of_rational():
    res = m_factorization(None, AlgClass.of(P("x-2")))
    assert [k for k, _ in res.components()] == [("Q", 1)]
    res = m_factorization(QUAD, QUAD.element("2"))
    assert list(res.joint) == [("Q", 1)]


def test_factorization_is_multiplicative():
    # sqrt(2) * (1 + sqrt(2)) = 2 + sqrt(2); the class of a product is the sum
    product = QUAD.element("sqrt(2)") + QUAD.element("1+sqrt(2)")
    a = m_factorization(QUAD, product)
    b = m_factorization(QUAD, QUAD.element("2+sqrt(2)"))
    assert a.joint.keys() == b.joint.keys()
    for k in a.joint:
        assert classes_equal(a.joint[k], b.joint[k])


def test_mahler_norm_of_two_plus_sqrt2():
    f = QUAD.element("2+sqrt(2)")
    low, high = QUAD.element("sqrt(2)"), QUAD.element("1+sqrt(2)")
    with mp.workprec(128):
        want = h_p(low, 2) ** 2 + 4 * h_p(high, 2) ** 2
        assert abs(mahler_norm(f, 2, QUAD) ** 2 - want) < TOL
        assert abs(mahler2_inner(low, high, QUAD)) < TOL
        assert classes_equal(m_operator(QUAD, f), low + high * 2)


def test_verify_residuals():
    res = m_factorization(QUAD, QUAD.element("2+sqrt(2)"), verify=True)
    assert all(v < TOL for v in res.residuals.values())


# -- S3 closure of x^3 - x - 1 ---------------------------------------------------------

def test_unit_has_no_rational_part():
    assert S3.canonical(project_PK(S3, "Q", S3.root_class(0))).is_zero()


def test_cubic_projections_do_not_commute():
    fa, fb = S3.root_class(0), S3.root_class(1)
    Ka, Kb = "fix(1,2)", "fix(0,2)"
    assert project_PK(S3, Kb, fa) == S3.canonical(fb * Fraction(-1, 2))
    assert project_PK(S3, Ka, fb) == S3.canonical(fa * Fraction(-1, 2))
    ab = project_PK(S3, Ka, project_PK(S3, Kb, fa))
    ba = project_PK(S3, Kb, project_PK(S3, Ka, fa))
    assert ab != ba


def test_cubic_degree_projection():
    fa = S3.root_class(0)
    assert project_Pn(S3, 3, fa) == S3.canonical(fa)
    assert is_projection_irreducible(S3, fa)


def test_projection_fixes_subfield_classes():
    # a class of Q(alpha) is fixed by P_{Q(alpha)}
    fa = S3.root_class(0)
    assert project_PK(S3, "fix(1,2)", fa) == S3.canonical(fa)


def test_salem_standalone_component():
    f = AlgClass.of(P(LEHMER))
    assert project_Tn(None, 10, f) == f
    assert _zero(project_Tn(None, 9, f)) if project_Tn(None, 9, f).ctx else project_Tn(None, 9, f).is_zero()


def test_projection_irreducibility_examples():
    assert is_projection_irreducible(QUAD, QUAD.element("sqrt(2)"))
    assert not is_projection_irreducible(QUAD, QUAD.element("2+sqrt(2)"))


# -- projection algebra ------------------------------------------------------------

@given(biq_classes(), st.sampled_from(_labels(BIQ)))
def test_idempotent_abelian(f, K):
    once = project_PK(BIQ, K, f)
    assert classes_equal(project_PK(BIQ, K, once), once)


@given(s3_classes(), st.sampled_from(_labels(S3)))
def test_idempotent_s3(f, K):
    once = project_PK(S3, K, f)
    assert project_PK(S3, K, once) == once


@given(biq_classes(), st.sampled_from(_labels(BIQ)), st.sampled_from([1, 2, 3, "inf"]))
def test_contraction(f, K, p):
    with mp.workprec(128):
        assert h_p(project_PK(BIQ, K, f), p) - h_p(f, p) < TOL


@given(s3_classes(), st.sampled_from(_labels(S3)), st.sampled_from([1, 2, "inf"]))
def test_contraction_s3(f, K, p):
    with mp.workprec(128):
        assert h_p(project_PK(S3, K, f), p) - h_p(f, p) < TOL


@given(biq_classes(), st.sampled_from(_labels(BIQ)), st.sampled_from(_labels(BIQ)))
def test_projections_commute_to_meet(f, K, L):
    meet = BIQ.meet(K, L).label
    kl = project_PK(BIQ, K, project_PK(BIQ, L, f))
    lk = project_PK(BIQ, L, project_PK(BIQ, K, f))
    assert classes_equal(kl, project_PK(BIQ, meet, f))
    assert classes_equal(lk, kl)


@pytest.mark.parametrize("ctx, strategy", [(BIQ, biq_classes()), (S3, s3_classes())], ids=["biq", "s3"])
def test_mobius_inversion(ctx, strategy):
    @given(strategy)
    def check(f):
        galois = ctx.galois_subfields()
        for K in galois:
            total = AlgClass((), ctx)
            for F in galois:
                if ctx.contains(F.label, K.label):
                    total = total + project_TK(ctx, F, f)
            assert classes_equal(total, project_PK(ctx, K, f))
    check()


@pytest.mark.parametrize("ctx, strategy", [(BIQ, biq_classes()), (S3, s3_classes())], ids=["biq", "s3"])
def test_field_components_annihilate(ctx, strategy):
    @given(strategy)
    def check(f):
        galois = ctx.galois_subfields()
        for K in galois:
            tk = project_TK(ctx, K, f)
            assert classes_equal(project_TK(ctx, K, tk), tk)
            for L in galois:
                if L.label != K.label:
                    assert _zero(project_TK(ctx, L, tk))
    check()


@pytest.mark.parametrize("ctx, strategy", [(BIQ, biq_classes()), (S3, s3_classes())], ids=["biq", "s3"])
def test_degree_components_sum_to_f(ctx, strategy):
    @given(strategy)
    def check(f):
        comps = degree_components(ctx, f)
        total = AlgClass((), ctx)
        for c in comps.values():
            total = total + c
        assert classes_equal(total, f)
        field_total = AlgClass((), ctx)
        for K in ctx.galois_subfields():
            field_total = field_total + project_TK(ctx, K, f)
        assert classes_equal(field_total, f)
    check()


@given(biq_classes())
def test_components_orthogonal(f):
    comps = [project_TK(BIQ, K, f) for K in BIQ.galois_subfields()]
    for i in range(len(comps)):
        for j in range(i):
            assert abs(inner_product(comps[i], comps[j], BIQ)) < TOL


@given(biq_classes(), st.sampled_from(_labels(BIQ)))
def test_degree_monotone_under_projection(f, K):
    if _zero(f):
        return
    g = project_PK(BIQ, K, f)
    if _zero(g):
        return
    assert class_delta(BIQ, g) <= class_delta(BIQ, f)
    if BIQ.contains(K, minimal_field(BIQ, f).label):
        assert class_invariants(BIQ, g).d <= class_invariants(BIQ, f).d


@given(s3_classes(), st.sampled_from([s.label for s in S3.galois_subfields()]))
def test_orbit_size_monotone_s3(f, K):
    if f.is_zero():
        return
    g = project_PK(S3, K, f)
    if g.is_zero():
        return
    assert class_delta(S3, g) <= class_delta(S3, f)


@pytest.mark.parametrize("i", range(3))
def test_length_monotone_s3(i):
    f = S3.root_class(i)
    K_f = minimal_field(S3, f).label
    for K in _labels(S3):
        if S3.contains(K, K_f):
            g = project_PK(S3, K, f)
            if not g.is_zero():
                assert class_invariants(S3, g).d <= class_invariants(S3, f).d


@given(biq_classes())
def test_parseval(f):
    comps = degree_components(BIQ, f)
    with mp.workprec(128):
        lhs = mahler_norm(f, 2, BIQ) ** 2
        rhs = mpmath.fsum(n * n * h_p(c, 2) ** 2 for n, c in comps.items())
        assert abs(lhs - rhs) < mpmath.mpf("1e-20")
        assert abs(mahler2_inner(f, f, BIQ) - lhs) < mpmath.mpf("1e-20")


@given(biq_classes())
def test_shortcut_matches_gram(f):
    for n in (1, 2, 3):
        assert classes_equal(project_Pn(BIQ, n, f), project_Pn(BIQ, n, f, method="gram"))
