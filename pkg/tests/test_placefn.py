from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

import oracles
from mahlernorm.algclass import AlgClass
from mahlernorm.errors import PairingUnavailableError
from mahlernorm.galoisctx import apply_galois, build_multiquadratic
from mahlernorm.intpoly import IntPoly
from mahlernorm.placefn import (
    PlaceFunction, cauchy_schwarz_gap, h_p, inner_product, integral, place_function,
)

P = IntPoly.parse
TOL = mpmath.mpf("1e-30")


def _atoms(poly):
    pf = place_function(P(poly))
    out = {}
    for a in pf.atoms:
        out.setdefault(a.block, []).append((a.value, a.measure))
    return out


def test_atoms_of_two():
    with mp.workprec(128):
        atoms = _atoms("x-2")
        assert atoms[2] == [(Fraction(-1), Fraction(1))]
        [(v, m)] = atoms["inf"]
        assert m == 1 and abs(v - mpmath.log(2)) < TOL


def test_atoms_of_sqrt2():
    with mp.workprec(128):
        atoms = _atoms("x^2-2")
        assert atoms[2] == [(Fraction(-1, 2), Fraction(1))]
        [(v, m)] = atoms["inf"]
        assert m == 1 and abs(v - mpmath.log(2) / 2) < TOL


def test_atoms_of_three_halves():
    with mp.workprec(128):
        atoms = _atoms("2x-3")
        assert atoms[2] == [(Fraction(1), Fraction(1))]
        assert atoms[3] == [(Fraction(-1), Fraction(1))]
        [(v, _)] = atoms["inf"]
        assert abs(v - mpmath.log(mpmath.mpf(3) / 2)) < TOL


def test_height_values():
    with mp.workprec(128):
        assert abs(h_p(P("x-2"), 1) - 2 * mpmath.log(2)) < TOL
        assert abs(h_p(P("2x-3"), "inf") - mpmath.log(3)) < TOL
        assert abs(h_p(P("x^2-2"), 1) - mpmath.log(2)) < TOL


@pytest.mark.parametrize("poly", ["x-2", "x^2-2", "x^2-2x-1", "2x-3", "x^3-x-1", "3x^2-5"])
def test_product_formula(poly):
    assert abs(integral(P(poly))) < mpmath.mpf("1e-30")


def test_inner_products():
    ctx = build_multiquadratic([2])
    a, b = ctx.element("sqrt(2)"), ctx.element("1+sqrt(2)")
    assert abs(inner_product(a, b, ctx)) < TOL
    two = ctx.element("2")
    with mp.workprec(128):
        assert abs(inner_product(two, two, ctx) - 2 * mpmath.log(2) ** 2) < TOL
        assert abs(inner_product(b, b, ctx) - h_p(b, 2) ** 2) < TOL
        # standalone pairing of a class with itself
        f2 = AlgClass.of(P("x-2"))
        assert abs(inner_product(f2, f2) - 2 * mpmath.log(2) ** 2) < TOL


def test_unpaired_support_is_refused():
    with pytest.raises(PairingUnavailableError):
        inner_product(AlgClass.of(P("x-2")), AlgClass.of(P("x-3")))


def test_json_round_trip():
    pf = place_function(P("2x-3"))
    back = PlaceFunction.from_dict(pf.to_dict(), pf.prec)
    assert back.to_dict() == pf.to_dict()


# -- properties in Q(sqrt(2), sqrt(3)) ------------------------------------------------

CTX = build_multiquadratic([2, 3])
ELEMENTS = ["1+sqrt(2)", "2+sqrt(3)", "sqrt(2)+sqrt(3)", "2", "3", "sqrt(6)", "1+sqrt(3)",
            "3+sqrt(2)", "5+2*sqrt(6)"]

combos = st.lists(
    st.tuples(st.sampled_from(ELEMENTS), st.integers(-3, 3), st.integers(1, 3)),
    min_size=1, max_size=3,
)


def _combo(items):
    f = AlgClass((), CTX)
    for text, a, b in items:
        f = f + CTX.element(text) * Fraction(a, b)
    return CTX.canonical(f)


@given(combos)
def test_integral_vanishes(items):
    assert abs(integral(_combo(items))) < mpmath.mpf("1e-30")


@given(combos, st.sampled_from(range(4)), st.sampled_from([1, 2, 3, "inf"]))
def test_galois_action_is_isometry(items, sigma, p):
    f = _combo(items)
    with mp.workprec(128):
        assert abs(h_p(apply_galois(CTX, sigma, f), p) - h_p(f, p)) < mpmath.mpf("1e-30")


@given(combos, combos)
def test_cauchy_schwarz(a, b):
    f, g = _combo(a), _combo(b)
    assert cauchy_schwarz_gap(f, g, CTX) > -mpmath.mpf("1e-30")


@given(combos, combos, st.sampled_from(range(4)))
def test_galois_action_preserves_inner_product(a, b, sigma):
    f, g = _combo(a), _combo(b)
    lhs = inner_product(apply_galois(CTX, sigma, f), apply_galois(CTX, sigma, g), CTX)
    with mp.workprec(128):
        assert abs(lhs - inner_product(f, g, CTX)) < mpmath.mpf("1e-30")


@given(st.sampled_from(["x^2-2x-1", "x^3-x-1", "x^4-x^3-x^2-x+1", "x^2-3x+1", "x^3-2"]))
def test_l2_height_from_roots(poly):
    # for a unit standalone class f_alpha: h_2^2 = mean of (log|root|)^2
    F = P(poly)
    if abs(F.coeffs[0]) != 1:
        return
    with mp.workdps(50):
        rs = oracles.roots(F.coeffs, 50)
        want = mpmath.sqrt(mpmath.fsum(mpmath.log(abs(r)) ** 2 for r in rs) / len(rs))
    with mp.workprec(128):
        assert abs(h_p(F, 2) - want) < mpmath.mpf("1e-30")
