import copy
import json

import mpmath
import pytest
from mpmath import mp

from mahlernorm.errors import ContextError, NotASubfieldError
from mahlernorm.galoisctx import (
    apply_galois, build_cubic_closure, build_multiquadratic, context_from_dict, loads_context,
    mobius, shipped_context, validate,
)
from mahlernorm.intpoly import IntPoly
from mahlernorm.placefn import h_p

P = IntPoly.parse


def test_quadratic_context():
    ctx = build_multiquadratic([2])
    assert ctx.degree == 2
    assert [s.label for s in ctx.subfields] == ["Q", "Q(sqrt(2))"]
    assert mobius(ctx, "Q", "Q(sqrt(2))") == -1


def test_biquadratic_lattice():
    ctx = build_multiquadratic([2, 3])
    assert ctx.degree == 4 and ctx.abelian
    labels = [s.label for s in ctx.subfields]
    assert len(labels) == 5
    assert set(labels) == {"Q", "Q(sqrt(2))", "Q(sqrt(3))", "Q(sqrt(6))", "Q(sqrt(2),sqrt(3))"}
    assert mobius(ctx, "Q", "Q(sqrt(2),sqrt(3))") == 2
    for s in ctx.subfields:
        assert mobius(ctx, s.label, s.label) == 1
        # the subgroup index is the declared degree
        assert len(s.subgroup) * s.degree == ctx.degree


def test_mobius_interval_sums_vanish():
    for ctx in (build_multiquadratic([2, 3]), build_multiquadratic([2, 3, 5]),
                build_cubic_closure(P("x^3-x-1"))):
        subs = ctx.subfields
        for F in subs:
            for K in subs:
                if F.label == K.label or not ctx.contains(F.label, K.label):
                    continue
                total = sum(mobius(ctx, F.label, E.label) for E in subs
                            if ctx.contains(F.label, E.label) and ctx.contains(E.label, K.label))
                assert total == 0


def test_mobius_needs_containment():
    ctx = build_multiquadratic([2, 3])
    with pytest.raises(NotASubfieldError):
        mobius(ctx, "Q(sqrt(2))", "Q(sqrt(3))")


def test_dependent_generators_rejected():
    with pytest.raises(ContextError):
        build_multiquadratic([2, 8])


def test_cubic_closures():
    s3 = build_cubic_closure(P("x^3-x-1"))
    assert s3.degree == 6 and not s3.abelian and len(s3.subfields) == 6
    assert "Q(sqrt(-23))" in [s.label for s in s3.subfields]
    cyc = build_cubic_closure(P("x^3-3x-1"))
    assert cyc.degree == 3 and [s.label for s in cyc.subfields] == ["Q", "top"]
    # disc(x^3 - 2) = -108 = -3 * 6^2, so the resolvent is Q(sqrt(-3))
    pure = build_cubic_closure(P("x^3-2"))
    assert pure.degree == 6 and "Q(sqrt(-3))" in [s.label for s in pure.subfields]


def test_shipped_context_round_trip():
    shipped = shipped_context("multiquadratic-23.json")
    assert shipped.degree == 4
    assert shipped.to_dict() == build_multiquadratic([2, 3]).to_dict()
    again = loads_context(shipped.dumps())
    assert again.to_dict() == shipped.to_dict()


def test_non_closed_group_is_reported():
    data = build_multiquadratic([2, 3]).to_dict()
    data["group"][3] = [3, 2, 0, 1]
    problems = validate(data)
    assert problems and all("not closed" in m or "permutation" in m for m in problems)
    assert any("element 1 composed with element 2" in m for m in problems)
    with pytest.raises(ContextError):
        context_from_dict(data)


def test_wrong_mobius_cache_is_reported():
    data = build_multiquadratic([2, 3]).to_dict()
    data["subfields"][0]["mobius"]["Q(sqrt(2),sqrt(3))"] = 1
    with pytest.raises(ContextError) as info:
        context_from_dict(copy.deepcopy(data))
    assert any("Moebius" in m for m in info.value.violations)


def test_galois_action():
    ctx = build_multiquadratic([2])
    f = ctx.element("1+sqrt(2)")
    assert apply_galois(ctx, 0, f) == f
    g = apply_galois(ctx, 1, f)
    # 1 - sqrt(2) = -1/(1 + sqrt(2))
    assert g == ctx.canonical(f * -1)
    with mp.workprec(128):
        for p in (1, 2, "inf"):
            assert abs(h_p(g, p) - h_p(f, p)) < mpmath.mpf("1e-30")


@pytest.mark.parametrize("ctx", [build_multiquadratic([2, 3]), build_cubic_closure(P("x^3-x-1"))],
                         ids=["biquadratic", "s3"])
def test_action_composes(ctx):
    f = ctx.root_class(0) if not ctx.abelian else ctx.element("1+sqrt(2)+sqrt(3)")
    for s in range(ctx.degree):
        for t in range(ctx.degree):
            lhs = apply_galois(ctx, s, apply_galois(ctx, t, f))
            assert lhs == apply_galois(ctx, ctx.mul(s, t), f)
