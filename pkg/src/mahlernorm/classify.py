"""Degree invariants and irreducibility classes of a class f_alpha.

delta is the size of the Galois orbit of f, ell the least positive
integer with ell*f Lehmer irreducible, and d = ell*delta the least degree
of a representative.  Orders of roots of unity among conjugate ratios are
proposed numerically and confirmed exactly by divisibility of the ratio
resultant R(x) = Res_y(F(y), F(xy)) by cyclotomic polynomials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Sequence

import mpmath
from mpmath import mp

from .algclass import AlgClass
from .errors import InternalConsistencyError, PairingUnavailableError, ReducibleError
from .intpoly import (IntPoly, _divrem_list, _interpolate, cyclotomic, euler_phi, is_cyclotomic,
                      is_irreducible, power_minpoly, resultant)
from .numroots import classify_pisot_salem, default_prec, isolate_roots

S_MAX = 12
N_MAX = 120
TORSION_ASSUMPTION = "ratio orders N searched over euler_phi(N) <= deg(F)^2"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _divisors(n: int) -> List[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _require_irreducible(F: IntPoly) -> IntPoly:
    F = F.primitive()
    if F.degree < 1:
        raise ValueError("need a polynomial of positive degree")
    if not is_irreducible(F):
        raise ReducibleError("%s is reducible" % F)
    return F


# -- torsion among conjugate ratios -----------------------------------------

@lru_cache(maxsize=512)
def _ratio_resultant(coeffs: tuple) -> tuple:
    F = IntPoly(coeffs)
    n = F.degree
    xs = list(range(n * n + 1))
    ys = []
    for x in xs:
        G = IntPoly([a * x ** k for k, a in enumerate(coeffs)])
        # lc^n * prod F(x alpha_i); the resultant drops lc^(n - deg G) when G loses degree
        if G.degree == 0:
            ys.append(F.lc ** n * G.coeffs[0] ** n)
        else:
            ys.append(resultant(F, G) * F.lc ** (n - G.degree))
    vals = _interpolate(xs, ys)
    return tuple(int(v) for v in vals)


def ratio_resultant(F: IntPoly) -> IntPoly:
    """R(x) = Res_y(F(y), F(xy)); its roots include every ratio of conjugates."""
    F = F.primitive()
    return IntPoly(list(_ratio_resultant(tuple(F.coeffs))))


def divisible_by_cyclotomic(R: IntPoly, N: int) -> bool:
    _, rem = _divrem_list(list(R.coeffs), list(cyclotomic(N).coeffs))
    return not any(rem)


def max_order(n: int) -> int:
    """Largest N with euler_phi(N) <= n*n (phi(N) >= sqrt(N/2))."""
    bound = n * n
    top = 2 * bound * bound + 2
    return max(N for N in range(1, top + 1) if euler_phi(N) <= bound)


def _candidate_orders(F: IntPoly, prec: int) -> List[int]:
    roots = [r.approx for r in isolate_roots(F, prec=prec)]
    n = len(roots)
    bound = max_order(n)
    found = set()
    with mp.workprec(prec):
        tol = mpmath.ldexp(1, -prec // 4)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                r = roots[j] / roots[i]
                if abs(abs(r) - 1) > tol:
                    continue
                t = mpmath.arg(r) / (2 * mpmath.pi)
                q = Fraction(mpmath.nstr(t, prec // 4, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)).limit_denominator(bound)
                if abs(t - mpmath.mpf(q.numerator) / q.denominator) < tol:
                    found.add(q.denominator)
    return sorted(found)


@lru_cache(maxsize=512)
def _torsion_exponent(coeffs: tuple, prec: int) -> int:
    F = IntPoly(coeffs)
    if F.degree == 1:
        return 1
    R = ratio_resultant(F)
    L = 1
    for N in _candidate_orders(F, prec):
        if N > 1 and divisible_by_cyclotomic(R, N):
            L = _lcm(L, N)
    return L


def torsion_exponent(F: IntPoly, prec: Optional[int] = None) -> int:
    """lcm of the orders of conjugate ratios alpha_j/alpha_i that are roots of unity."""
    F = _require_irreducible(F)
    return _torsion_exponent(tuple(F.coeffs), prec or default_prec())


def torsion_exponent_exhaustive(F: IntPoly) -> int:
    """Same value, testing every N with euler_phi(N) <= deg^2 (slow; for checks)."""
    F = _require_irreducible(F)
    if F.degree == 1:
        return 1
    R = ratio_resultant(F)
    L = 1
    for N in range(2, max_order(F.degree) + 1):
        if euler_phi(N) <= F.degree ** 2 and divisible_by_cyclotomic(R, N):
            L = _lcm(L, N)
    return L


# -- delta, ell, d ------------------------------------------------------------

def delta(F: IntPoly) -> int:
    """Size of the Galois orbit of f_alpha: the degree of alpha^L, L the torsion exponent."""
    F = _require_irreducible(F)
    return power_minpoly(F, torsion_exponent(F)).degree


def _mod_pow(base: list, e: int, mod: list) -> list:
    out = [Fraction(1)]
    while e:
        if e & 1:
            out = _divrem_list(_mul(out, base), mod)[1]
        base = _divrem_list(_mul(base, base), mod)[1]
        e >>= 1
    return out


def _mul(a: Sequence, b: Sequence) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _reduce(a: list) -> list:
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _identify_in(gamma, beta, dim: int, prec: int) -> Optional[List[Fraction]]:
    """Rationals c_i with gamma = sum c_i beta^i (i < dim), via an integer relation."""
    with mp.workprec(prec):
        # Re + pi*Im keeps a relation among algebraic numbers honest
        mix = lambda z: mpmath.re(z) + mpmath.pi * mpmath.im(z)
        vec = [mix(gamma)] + [mix(beta ** i) for i in range(dim)]
        rel = mpmath.pslq(vec, maxcoeff=10 ** 15, maxsteps=50000)
    if rel is None or rel[0] == 0:
        return None
    return [Fraction(-r, rel[0]) for r in rel[1:]]


def _power_check(G: IntPoly, P: List[Fraction], e: int, a: int, M: int) -> bool:
    """P(beta)^(e*M) == beta^(a*M) exactly in Q[x]/G, beta a root of G."""
    mod = [Fraction(c) for c in G.coeffs]
    lhs = _reduce(_mod_pow(_reduce(list(P)) or [Fraction(0)], e * M, mod))
    rhs = _reduce(_mod_pow([Fraction(0), Fraction(1)], a * M, mod))
    width = max(len(lhs), len(rhs))
    lhs += [Fraction(0)] * (width - len(lhs))
    rhs += [Fraction(0)] * (width - len(rhs))
    return lhs == rhs


def _may_have_factor(H: IntPoly, k: int, tries: int = 4) -> bool:
    """False only when some prime rules out an irreducible factor of degree k."""
    from .intpoly import _SMALL_PRIMES, _subset_sums, distinct_degree_degrees

    used = 0
    for p in _SMALL_PRIMES:
        degs = distinct_degree_degrees(H, p)
        if degs is None:
            continue
        if k not in _subset_sums(degs):
            return False
        used += 1
        if used >= tries:
            break
    return True


def _is_power(n: int, e: int) -> bool:
    from sympy import integer_nthroot

    return integer_nthroot(n, e)[1]


def _radical(G: IntPoly, e: int, sign: int = 1) -> IntPoly:
    out = [0] * (G.degree * e + 1)
    for i, c in enumerate(G.coeffs):
        out[i * e] = c * (sign ** i)
    return IntPoly(out)


def _represented_in_field(F: IntPoly, L: int, dlt: int, a: int, e: int, prec: int,
                          n_max: int = N_MAX) -> bool:
    """Is (a/e) f_beta, beta = alpha^L, the class of an element of Q(beta)?

    Such a gamma satisfies gamma^e = beta^a zeta with zeta a root of unity
    of Q(beta), so euler_phi(ord zeta) divides delta.  Candidates come from
    an integer relation gamma = P(beta) and are confirmed exactly.
    """
    g = gcd(a, e)
    a, e = a // g, e // g
    if e == 1:
        return True
    G = power_minpoly(F, L)
    # taking norms from Q(beta): |N(gamma)|^e = |N(beta)|^a must be an e-th power
    nb = abs(Fraction(G.coeffs[0], G.lc)) ** a
    if not (_is_power(nb.numerator, e) and _is_power(nb.denominator, e)):
        return False
    wp = max(2 * prec, 256)
    roots = isolate_roots(G, prec=wp)
    real = [r for r in roots if r.is_real]
    with mp.workprec(wp):
        if real:
            # Q(beta) sits inside R, so gamma is real: gamma^e = +-beta^a
            beta = real[0].approx.real
            Ga = power_minpoly(G, a)
            if not (_may_have_factor(_radical(Ga, e, 1), dlt) or _may_have_factor(_radical(Ga, e, -1), dlt)):
                return False
            mag = abs(beta) ** (mpmath.mpf(a) / e)
            cands = [(mag, 2), (-mag, 2)]
        else:
            beta = roots[0].approx
            g0 = (beta ** a) ** (mpmath.mpf(1) / e)
            cands = []
            for N in range(1, min(n_max, 2 * dlt * dlt + 2) + 1):
                if dlt % euler_phi(N):
                    continue
                for k in range(e * N):
                    if gcd(k, e * N) == 1 or e * N == 1:
                        cands.append((g0 * mpmath.expjpi(mpmath.mpf(2 * k) / (e * N)), N))
        for gamma, N in cands:
            P = _identify_in(gamma, beta, dlt, wp)
            if P is not None and _power_check(G, P, e, a, N):
                return True
    return False


@dataclass(frozen=True)
class DegreeInvariants:
    delta: int
    ell: int
    d: int
    torsion_exponent: int


@lru_cache(maxsize=512)
def _invariants(coeffs: tuple, prec: int) -> DegreeInvariants:
    F = IntPoly(coeffs)
    L = _torsion_exponent(coeffs, prec)
    dlt = power_minpoly(F, L).degree
    ell = L
    for m in _divisors(L):
        # m f = (m/L) f_beta is Lehmer irreducible iff some twist of alpha^m has degree delta
        if power_minpoly(F, m).degree == dlt or _represented_in_field(F, L, dlt, m, L, prec):
            ell = m
            break
    return DegreeInvariants(dlt, ell, ell * dlt, L)


def invariants(F: IntPoly, prec: Optional[int] = None) -> DegreeInvariants:
    F = _require_irreducible(F)
    return _invariants(tuple(F.coeffs), prec or default_prec())


def ell(F: IntPoly) -> int:
    """Least positive integer m with m*f Lehmer irreducible."""
    return invariants(F).ell


def d(F: IntPoly) -> int:
    """Least degree of an algebraic number representing the class of F's roots."""
    return invariants(F).d


def r_generator(F: IntPoly, s_max: int = S_MAX, n_max: int = N_MAX) -> dict:
    """Best-effort generator ell/n of R(f) = {r : r f Lehmer irreducible}.

    Searches s <= s_max for degree-delta representatives of (ell/s) f,
    twisting by roots of unity of the minimal field of order <= n_max;
    n is the lcm of the successes.
    """
    F = _require_irreducible(F)
    if is_cyclotomic(F) is not None:
        # f is the zero class, so every rational multiple is Lehmer irreducible
        return {"generator": None, "ell": 1, "n": None, "bounds": {"s_max": s_max, "n_max": n_max},
                "exact_within_bounds": True, "note": "torsion input: f = 0 and R(f) = Q"}
    inv = invariants(F)
    prec = default_prec()
    n = 1
    for s in range(2, s_max + 1):
        if n % s == 0:
            continue
        if _represented_in_field(F, inv.torsion_exponent, inv.delta, inv.ell, s * inv.torsion_exponent, prec, n_max):
            n = _lcm(n, s)
    return {"generator": str(Fraction(inv.ell, n)), "ell": inv.ell, "n": n,
            "bounds": {"s_max": s_max, "n_max": n_max}, "exact_within_bounds": True}


# -- fast paths ---------------------------------------------------------------

@lru_cache(maxsize=512)
def _kind(coeffs: tuple) -> str:
    return classify_pisot_salem(IntPoly(coeffs))


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % q for q in range(2, int(n ** 0.5) + 1))


def fast_path_delta(F: IntPoly) -> Optional[int]:
    """delta when f_alpha is known to be projection irreducible without a context.

    Surds qualify, as do Salem numbers.  A unit whose minimal field has
    prime degree does too: Q is its only proper subfield and P_Q kills
    units.  That covers Pisot units of prime degree, but not Pisot numbers
    in general (2 + sqrt(2) has a nonzero component over Q).
    """
    F = _require_irreducible(F)
    inv = invariants(F)
    if inv.delta == 1:
        return 1
    if _kind(tuple(F.coeffs)) == "salem":
        return inv.delta
    if is_unit(F) and _is_prime(inv.delta):
        return inv.delta
    return None


def is_unit(F: IntPoly) -> bool:
    F = F.primitive()
    return abs(F.lc) == 1 and abs(F.coeffs[0]) == 1


# -- classes inside a context ---------------------------------------------------

def stabilizer(ctx, f: AlgClass) -> List[int]:
    from .decomp import classes_equal

    return [s for s in range(ctx.degree) if classes_equal(ctx.act(s, f), f)]


def minimal_field(ctx, f: AlgClass):
    return ctx.subfield_of_group(stabilizer(ctx, f))


def class_delta(ctx, f: AlgClass) -> int:
    return ctx.degree // len(stabilizer(ctx, f))


def class_representative(f: AlgClass) -> IntPoly:
    """Minimal polynomial of some alpha with f_alpha = f (context classes)."""
    from .decomp import as_single
    from .intpoly import X

    ctx = f.ctx
    if f.is_zero():
        return X - 1
    single = as_single(f)
    if single is not None:
        coeff, theta = single
        G = ctx.model.minpoly(theta)
    elif f.single() is not None:
        g, coeff = f.single()
        G = g.minpoly
    elif hasattr(ctx.model, "values"):
        coeff, G = _numeric_representative(ctx, f)
    else:
        raise PairingUnavailableError("no single representative known for %s" % ctx.describe(f))
    a, b = coeff.numerator, coeff.denominator
    if a < 0:
        G, a = G.reversed().primitive(), -a
    G = power_minpoly(G, a)
    if b == 1:
        return G
    return _irreducible_factor_of_radical(G, b)


def _numeric_representative(ctx, f: AlgClass, prec: int = 256):
    """(1/D, minpoly of gamma) with f = (1/D) f_gamma, gamma = prod conj^(D c).

    gamma is evaluated at every embedding; its distinct values are the
    conjugates, and the expanded product has rational coefficients that are
    recovered and checked against a tolerance tied to the working precision.
    """
    D = 1
    for _, c in f.terms:
        D = _lcm(D, c.denominator)
    with mp.workprec(64):
        logs = ctx.arch_vector(f * D, 64)
        size = sum(abs(v) for v in logs) / mpmath.log(2) + ctx.degree
    wp = max(prec, 2 * int(size) + 128)
    with mp.workprec(wp + 32):
        vals = []
        for m in range(ctx.degree):
            z = mpmath.mpc(1)
            for g, c in f.terms:
                e = int(c * D)
                z *= ctx.model.values(g.base, wp + 32)[ctx.group[m][g.conj]] ** e
            vals.append(z)
        eps = mpmath.ldexp(1, -(wp // 2))
        distinct = []
        for z in vals:
            if all(abs(z - w) > eps * (1 + abs(z)) for w in distinct):
                distinct.append(z)
        poly = [mpmath.mpc(1)]
        for z in distinct:
            new = [mpmath.mpc(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                new[i] -= c * z
                new[i + 1] += c
            poly = new
        bound = 2 ** (wp // 4)
        coeffs = []
        for c in poly:
            if abs(c.imag) > eps * (1 + abs(c)):
                raise InternalConsistencyError("conjugate product of %s is not real" % ctx.describe(f))
            m, e = mpmath.frexp(c.real)
            q = (Fraction(int(mpmath.nint(m * mpmath.ldexp(1, wp))), 1) * Fraction(2) ** (e - wp)).limit_denominator(bound)
            if abs(c.real - mpmath.mpf(q.numerator) / q.denominator) > eps * (1 + abs(c)):
                raise InternalConsistencyError("no rational form for a coefficient of the class polynomial")
            coeffs.append(q)
    den = 1
    for q in coeffs:
        den = _lcm(den, q.denominator)
    G = IntPoly([int(q * den) for q in coeffs]).primitive()
    if not is_irreducible(G):
        raise InternalConsistencyError("class polynomial %s is reducible" % G)
    return Fraction(1, D), G


def _irreducible_factor_of_radical(G: IntPoly, b: int) -> IntPoly:
    import sympy

    x = sympy.Symbol("x")
    expr = sum(c * x ** (b * i) for i, c in enumerate(G.coeffs))
    _, factors = sympy.factor_list(expr, x)
    best = min((f for f, _ in factors), key=lambda f: sympy.degree(f, x))
    coeffs = [int(c) for c in reversed(sympy.Poly(best, x).all_coeffs())]
    return IntPoly(coeffs).primitive()


def class_invariants(ctx, f: AlgClass) -> DegreeInvariants:
    return invariants(class_representative(f))


def is_projection_irreducible(ctx, f: AlgClass) -> bool:
    """P_F f = 0 for every proper subfield F of the minimal field of f."""
    from .decomp import _lift, project_PK

    f = _lift(ctx, f)
    Kf = minimal_field(ctx, f)
    for F in ctx.subfields:
        if F.label != Kf.label and ctx.contains(F, Kf):
            if not project_PK(ctx, F, f).is_zero():
                return False
    return True


# -- report -----------------------------------------------------------------------

@dataclass
class ClassificationReport:
    poly: IntPoly
    delta: int
    d: int
    ell: int
    torsion_exponent: int
    flags: Dict[str, Optional[bool]]
    heights: Dict[str, object] = field(default_factory=dict)
    height_errors: Dict[str, object] = field(default_factory=dict)
    mahler: Dict[str, object] = field(default_factory=dict)
    mahler_norms: Dict[str, object] = field(default_factory=dict)
    r_generator: Optional[dict] = None
    assumptions: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        fmt = lambda v: mpmath.nstr(v, 30, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
        return {
            "poly": str(self.poly),
            "coeffs": list(self.poly.coeffs),
            "delta": self.delta,
            "d": self.d,
            "ell": self.ell,
            "torsion_exponent": self.torsion_exponent,
            "flags": dict(self.flags),
            "heights": {p: fmt(v) for p, v in self.heights.items()},
            "height_errors": {p: mpmath.nstr(v, 3) for p, v in self.height_errors.items()},
            "mahler": {p: fmt(v) for p, v in self.mahler.items()},
            "mahler_norms": {p: fmt(v) for p, v in self.mahler_norms.items()},
            "r_generator": self.r_generator,
            "assumptions": list(self.assumptions),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _p_key(p) -> str:
    if isinstance(p, str):
        return p
    if p == float("inf"):
        return "inf"
    return str(int(p)) if float(p).is_integer() else str(p)


def classify(F: IntPoly, ctx=None, ps: Sequence = (1, 2, "inf"), prec: Optional[int] = None,
             r_search: bool = False) -> ClassificationReport:
    from .decomp import mahler_norm
    from .placefn import lp_norm, place_function

    F = _require_irreducible(F)
    prec = prec or default_prec()
    torsion = is_cyclotomic(F) is not None
    inv = invariants(F, prec)
    kind = "neither" if torsion else _kind(tuple(F.coeffs))
    flags: Dict[str, Optional[bool]] = {
        "torsion": torsion,
        "unit": is_unit(F),
        "surd": inv.delta == 1,
        "pisot": kind == "pisot",
        "salem": kind == "salem",
        "lehmer_irreducible": inv.ell == 1,
        "projection_irreducible": None,
    }
    if not torsion and fast_path_delta(F) is not None:
        flags["projection_irreducible"] = True
    f = AlgClass.of(F)
    if ctx is not None and not torsion:
        from .decomp import _lift

        flags["projection_irreducible"] = is_projection_irreducible(ctx, _lift(ctx, f))
    report = ClassificationReport(F, inv.delta, inv.d, inv.ell, inv.torsion_exponent, flags,
                                  assumptions=[TORSION_ASSUMPTION])
    if torsion:
        return report
    pf = place_function(f, prec)
    for p in ps:
        key = _p_key(p)
        h = lp_norm(pf, p)
        report.heights[key] = h
        report.height_errors[key] = pf.error
        with mp.workprec(prec + 16):
            report.mahler[key] = inv.d * h
        try:
            report.mahler_norms[key] = mahler_norm(f, p, ctx, prec)
        except PairingUnavailableError:
            pass
    if r_search:
        report.r_generator = r_generator(F)
    return report
