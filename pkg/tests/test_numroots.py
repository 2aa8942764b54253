import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

import oracles
from mahlernorm.intpoly import IntPoly, is_irreducible
from mahlernorm.numroots import (
    classify_pisot_salem, isolate_roots, log_house, log_mahler_measure, symmetric_log_house,
)

P = IntPoly.parse
LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"


def test_sqrt2_disks():
    roots = isolate_roots(P("x^2-2"), target_radius=mpmath.mpf("1e-30"))
    with mp.workprec(256):
        vals = sorted(r.approx.real for r in roots)
        assert abs(vals[0] + mpmath.sqrt(2)) < mpmath.mpf("1e-30")
        assert abs(vals[1] - mpmath.sqrt(2)) < mpmath.mpf("1e-30")
    assert all(r.radius <= mpmath.mpf("1e-30") and r.is_real for r in roots)


def test_conjugate_pair():
    roots = isolate_roots(P("x^2+1"))
    assert not any(r.is_real for r in roots)
    assert {roots[0].pairing, roots[1].pairing} == {0, 1}
    assert sorted(float(r.approx.imag) for r in roots) == [-1.0, 1.0]


def test_lehmer_real_root_against_mpmath():
    roots = isolate_roots(P(LEHMER), prec=200)
    real = [r for r in roots if r.is_real]
    with mp.workprec(200):
        want = max(abs(z) for z in oracles.roots(P(LEHMER).coeffs, 60))
        big = max(r.approx.real for r in real)
        assert abs(big - want) < mpmath.mpf("1e-40")
        assert mpmath.nstr(big, 30).startswith("1.17628081825991")


def test_houses():
    with mp.workprec(128):
        assert abs(log_house(P("x^2-2")) - mpmath.log(2) / 2) < mpmath.mpf("1e-30")
        golden2 = (3 + mpmath.sqrt(5)) / 2
        assert abs(log_house(P("x^2-3x+1")) - mpmath.log(golden2)) < mpmath.mpf("1e-30")
        assert abs(symmetric_log_house(P("2x-3")) - mpmath.log(mpmath.mpf(3) / 2)) < mpmath.mpf("1e-30")


@pytest.mark.parametrize("F, kind", [
    ("x^2-3x+1", "pisot"),
    (LEHMER, "salem"),
    ("x^2-2", "neither"),
    ("x^3-x-1", "pisot"),
    ("x^4-x^3-x^2-x+1", "salem"),
    ("x^3-2", "neither"),
])
def test_pisot_salem(F, kind):
    assert classify_pisot_salem(P(F)) == kind


# -- properties -------------------------------------------------------------------

coeff = st.integers(min_value=-12, max_value=12)
nonzero = st.integers(min_value=1, max_value=5)


@st.composite
def irreducible_polys(draw):
    c = draw(st.lists(coeff, min_size=2, max_size=7))
    c.append(draw(nonzero))
    F = IntPoly(c).primitive()
    if F.coeffs[0] == 0 or not is_irreducible(F):
        c[0] = draw(st.sampled_from([1, -1, 2, -3]))
        F = IntPoly(c).primitive()
    return F


@given(irreducible_polys())
def test_roots_agree_with_mpmath(F):
    if F.coeffs[0] == 0 or not is_irreducible(F):
        return
    ours = isolate_roots(F, prec=128)
    theirs = oracles.roots(F.coeffs, 40)
    with mp.workprec(128):
        for z in theirs:
            dist = min(abs(z - r.approx) for r in ours)
            assert dist < mpmath.mpf("1e-25")
        # each true root lies in exactly one disk
        for r in ours:
            assert sum(1 for z in theirs if abs(z - r.approx) <= r.radius + mpmath.mpf("1e-35")) == 1


@given(irreducible_polys())
def test_log_mahler_against_oracle(F):
    if F.coeffs[0] == 0 or not is_irreducible(F):
        return
    with mp.workprec(128):
        assert abs(log_mahler_measure(F) - oracles.log_mahler(F.coeffs, 40)) < mpmath.mpf("1e-25")
