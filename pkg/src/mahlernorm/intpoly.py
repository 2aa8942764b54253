"""Exact integer polynomials.

Coefficients are stored in ascending order as Python ints, so every
operation here is exact.  Rational work (division, gcd) goes through
``fractions.Fraction`` and is brought back to primitive integer form.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import List, Optional, Sequence, Tuple

from .errors import InternalConsistencyError, ReducibleError, UnsupportedDegreeError

IRREDUCIBLE_MAX_DEGREE = 24


def _strip(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    coeffs: Tuple[int, ...]

    def __init__(self, coeffs: Sequence[int] = ()):
        vals = []
        for a in coeffs:
            if isinstance(a, Fraction):
                if a.denominator != 1:
                    raise ValueError("non-integer coefficient %s" % a)
                a = a.numerator
            if not isinstance(a, int):
                if float(a) != int(a):
                    raise ValueError("non-integer coefficient %r" % (a,))
                a = int(a)
            vals.append(int(a))
        object.__setattr__(self, "coeffs", _strip(vals))

    # -- basic accessors -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def content(self) -> int:
        g = 0
        for a in self.coeffs:
            g = igcd(g, a)
        return g

    def primitive(self) -> "IntPoly":
        """Divide out the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return IntPoly([a // g for a in self.coeffs])

    def is_primitive(self) -> bool:
        return not self.is_zero() and self.lc > 0 and self.content() == 1

    def is_monic(self) -> bool:
        return self.lc == 1

    def derivative(self) -> "IntPoly":
        return IntPoly([i * a for i, a in enumerate(self.coeffs)][1:])

    def reversed(self) -> "IntPoly":
        """x^deg F(1/x)."""
        return IntPoly(self.coeffs[::-1])

    def __call__(self, x):
        acc = 0 * x
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __neg__(self):
        return IntPoly([-a for a in self.coeffs])

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return "IntPoly(%s)" % format_poly(self)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> "IntPoly":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("expected a JSON list of integers")
        return cls(data)

    @classmethod
    def parse(cls, text: str) -> "IntPoly":
        """Accept either a JSON coefficient list or a string like ``x^2 - 2``."""
        text = text.strip()
        if text.startswith("["):
            return cls.from_json(text)
        return parse_poly(text)

    def __str__(self):
        return format_poly(self)


def _coerce(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    return IntPoly([x])


X = IntPoly([0, 1])


# -- text format ----------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*(\*?\s*([a-zA-Z])\s*(?:(?:\^|\*\*)\s*(\d+))?)?")


def parse_poly(text: str) -> IntPoly:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial string")
    pos = 0
    coeffs = {}
    var = None
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError("cannot parse polynomial %r at %d" % (text, pos))
        sign, num, xpart, name, exp = m.groups()
        if not num and not xpart:
            raise ValueError("cannot parse polynomial %r at %d" % (text, pos))
        if pos > 0 and not sign:
            raise ValueError("missing operator in %r at %d" % (text, pos))
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        if xpart:
            if var is None:
                var = name
            elif name != var:
                raise ValueError("more than one variable in %r" % text)
            e = int(exp) if exp else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
    n = max(coeffs)
    return IntPoly([coeffs.get(i, 0) for i in range(n + 1)])


def format_poly(F: IntPoly, var: str = "x") -> str:
    if F.is_zero():
        return "0"
    parts = []
    for i in range(F.degree, -1, -1):
        a = F.coeffs[i]
        if a == 0:
            continue
        mag = abs(a)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else "%s^%d" % (var, i)
            body = mono if mag == 1 else "%d*%s" % (mag, mono)
        if not parts:
            parts.append(("-" if a < 0 else "") + body)
        else:
            parts.append(("- " if a < 0 else "+ ") + body)
    return " ".join(parts)


# -- arithmetic -----------------------------------------------------------

def add(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a.coeffs), len(b.coeffs))
    ca = a.coeffs + (0,) * (n - len(a.coeffs))
    cb = b.coeffs + (0,) * (n - len(b.coeffs))
    return IntPoly([x + y for x, y in zip(ca, cb)])


def sub(a: IntPoly, b: IntPoly) -> IntPoly:
    return add(a, -b)


def mul(a: IntPoly, b: IntPoly) -> IntPoly:
    return IntPoly(_mul_list(a.coeffs, b.coeffs))


def _mul_list(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _divrem_list(a: Sequence, b: Sequence) -> Tuple[list, list]:
    """Division of coefficient lists over Q (ascending order)."""
    b = list(_strip(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in _strip(a)]
    db = len(b) - 1
    lb = Fraction(b[-1])
    if len(r) - 1 < db:
        return [], list(_strip(r))
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] / lb
        q[k] = c
        if c:
            for j in range(db + 1):
                r[k + j] -= c * b[j]
    return list(_strip(q)), list(_strip(r[:db]))


def divrem(a: IntPoly, b: IntPoly) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Quotient and remainder over Q, as ascending tuples of Fractions."""
    q, r = _divrem_list(a.coeffs, b.coeffs)
    return tuple(q), tuple(r)


def exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """a / b when b divides a in Z[x]; raises otherwise."""
    q, r = _divrem_list(a.coeffs, b.coeffs)
    if r:
        raise ArithmeticError("%s does not divide %s" % (b, a))
    return IntPoly(q)


def _primitive_of_rational(coeffs: Sequence[Fraction]) -> IntPoly:
    coeffs = _strip(coeffs)
    if not coeffs:
        return IntPoly()
    den = 1
    for c in coeffs:
        den = den * Fraction(c).denominator // igcd(den, Fraction(c).denominator)
    return IntPoly([int(Fraction(c) * den) for c in coeffs]).primitive()


def gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd with positive leading coefficient."""
    x, y = list(a.coeffs), list(b.coeffs)
    if not x and not y:
        return IntPoly()
    while y:
        _, r = _divrem_list(x, y)
        x, y = y, list(_primitive_of_rational(r).coeffs) if r else []
    return _primitive_of_rational(x)


def arith(a: IntPoly, b: IntPoly, op: str):
    """Dispatch for the five basic operations by name."""
    ops = {
        "add": add,
        "sub": sub,
        "mul": mul,
        "divrem": divrem,
        "gcd": gcd,
    }
    if op not in ops:
        raise ValueError("unknown operation %r" % op)
    return ops[op](a, b)


def squarefree_part(F: IntPoly) -> IntPoly:
    g = gcd(F, F.derivative())
    if g.degree <= 0:
        return F.primitive()
    q, _ = _divrem_list(F.coeffs, g.coeffs)
    return _primitive_of_rational(q)


# -- resultants -----------------------------------------------------------

def _prem(a: list, b: list) -> list:
    """Pseudo-remainder: lc(b)^(da-db+1) a = q b + r."""
    da, db = len(a) - 1, len(b) - 1
    r = list(a)
    lb = b[-1]
    e = da - db + 1
    while len(r) - 1 >= db and r:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        r = list(_strip(r))
        e -= 1
    if e > 0:
        r = [x * lb ** e for x in r]
    return r


def resultant(a: IntPoly, b: IntPoly) -> int:
    """Res(a, b) = lc(a)^deg(b) * prod b(alpha) over the roots alpha of a.

    Computed with the subresultant remainder sequence so intermediate
    coefficients stay bounded.
    """
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant of a zero polynomial")
    A, B = list(a.coeffs), list(b.coeffs)
    if len(A) == 1:
        return A[0] ** (len(B) - 1)
    if len(B) == 1:
        return B[0] ** (len(A) - 1)
    ca, cb = IntPoly(A).content(), IntPoly(B).content()
    A = [x // ca for x in A]
    B = [x // cb for x in B]
    da, db = len(A) - 1, len(B) - 1
    t = ca ** db * cb ** da
    s = 1
    if da < db:
        A, B = B, A
        da, db = db, da
        if da % 2 == 1 and db % 2 == 1:
            s = -1
    g = h = 1
    while db > 0:
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        R = _prem(A, B)
        A = B
        if not R:
            return 0
        den = g * h ** delta
        B = [x // den for x in R]
        g = A[-1]
        if delta == 0:
            pass
        else:
            h = g ** delta // h ** (delta - 1)
        da, db = len(A) - 1, len(B) - 1
    if da == 1:
        hh = B[0]
    else:
        hh = B[0] ** da // h ** (da - 1)
    return s * t * hh


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> List[Fraction]:
    """Newton interpolation over Q, returns ascending coefficients."""
    n = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    poly = [dd[-1]]
    for i in range(n - 2, -1, -1):
        # poly = poly * (x - xs[i]) + dd[i]
        new = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            new[k + 1] += c
            new[k] -= c * xs[i]
        new[0] += dd[i]
        poly = new
    return poly


def power_resultant(F: IntPoly, k: int) -> IntPoly:
    """Res_y(F(y), x - y^k) as a polynomial in x (degree deg F)."""
    n = F.degree
    xs = list(range(n + 1))
    ys = []
    for c in xs:
        G = IntPoly([c] + [0] * (k - 1) + [-1])
        ys.append(resultant(F, G))
    coeffs = _interpolate(xs, ys)
    return IntPoly(coeffs)


def power_minpoly(F: IntPoly, k: int) -> IntPoly:
    """Minimal polynomial of alpha^k for a root alpha of irreducible F."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    F = F.primitive()
    if not is_irreducible(F):
        raise ReducibleError("%s is reducible" % F)
    if k == 1:
        return F
    H = power_resultant(F, k)
    G = squarefree_part(H)
    n, m = F.degree, G.degree
    if m == 0 or n % m:
        raise InternalConsistencyError("power transform of %s: degree %d does not divide %d" % (F, m, n))
    Gm = G ** (n // m)
    # H must be a constant multiple of G^(n/m)
    ratio = Fraction(H.lc, Gm.lc)
    if any(Fraction(h) != ratio * g for h, g in zip(H.coeffs, Gm.coeffs)) or len(H.coeffs) != len(Gm.coeffs):
        raise InternalConsistencyError("power transform of %s is not a pure power" % F)
    return G


# -- p-adic data ----------------------------------------------------------

def vp(a: int, p: int) -> int:
    if a == 0:
        raise ValueError("valuation of zero")
    a = abs(a)
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass(frozen=True)
class NewtonPolygon:
    prime: int
    segments: Tuple[Tuple[Fraction, int], ...]

    def root_valuations(self):
        """(valuation, multiplicity) for the roots, valuation = -slope."""
        return [(-s, l) for s, l in self.segments]


def newton_polygon(F: IntPoly, p: int) -> NewtonPolygon:
    if F.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    pts = [(i, vp(a, p)) for i, a in enumerate(F.coeffs) if a != 0]
    hull: List[Tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    # leading zero coefficients at the bottom (x | F) give roots at 0; F
    # here always has a nonzero constant term when used for algebraic numbers
    if pts[0][0] > 0:
        raise ValueError("polynomial vanishes at 0")
    return NewtonPolygon(p, tuple(segs))


# -- predicates -----------------------------------------------------------

def is_reciprocal(F: IntPoly) -> bool:
    R = F.reversed()
    return R == F or R == -F


def prime_factors(n: int) -> List[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p - 1)
    return r


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPoly:
    """Phi_n via x^n - 1 = prod_{d | n} Phi_d."""
    num = IntPoly([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            num = exact_div(num, cyclotomic(d))
    return num


def is_cyclotomic(F: IntPoly) -> Optional[int]:
    F = F.primitive()
    n = F.degree
    if n < 1 or F.lc != 1 or abs(F.coeffs[0]) != 1:
        return None
    # phi(m) >= sqrt(m/2), so m <= 2 n^2 covers every candidate
    for m in range(1, 2 * n * n + 3):
        if euler_phi(m) == n and cyclotomic(m) == F:
            return m
    return None


def _poly_mod_p(c: Sequence[int], p: int) -> list:
    return list(_strip([x % p for x in c]))


def _pmod_divrem(a: list, b: list, p: int) -> Tuple[list, list]:
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(r) - 1 < db:
        return [], r
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for j in range(db + 1):
                r[k + j] = (r[k + j] - c * b[j]) % p
    return q, list(_strip(r[:db]))


def _pmod_mulmod(a: list, b: list, m: list, p: int) -> list:
    prod = [x % p for x in _mul_list(a, b)]
    return _pmod_divrem(list(_strip(prod)), m, p)[1]


def _pmod_gcd(a: list, b: list, p: int) -> list:
    while b:
        a, b = b, _pmod_divrem(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _pmod_compose_frob(h: list, m: list, p: int) -> list:
    """h(x)^p mod m, i.e. one Frobenius step when h = x^(p^i)."""
    result = [1]
    base = list(h)
    e = p
    while e:
        if e & 1:
            result = _pmod_mulmod(result, base, m, p)
        base = _pmod_mulmod(base, base, m, p)
        e >>= 1
    return result


def distinct_degree_degrees(F: IntPoly, p: int) -> Optional[List[int]]:
    """Degrees of the irreducible factors of F mod p.

    Returns None when p divides the leading coefficient or F mod p is not
    squarefree (the prime is then useless for degree sets).
    """
    f = _poly_mod_p(F.coeffs, p)
    if len(f) - 1 != F.degree:
        return None
    inv = pow(f[-1], -1, p)
    f = [x * inv % p for x in f]
    df = _poly_mod_p([i * a for i, a in enumerate(f)][1:], p)
    if not df or len(_pmod_gcd(f, df, p)) > 1:
        return None
    degrees = []
    h = [0, 1]
    i = 0
    while len(f) - 1 >= 2 * (i + 1):
        i += 1
        h = _pmod_compose_frob(h, f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _pmod_gcd(f, list(_strip(diff)), p)
        k = len(g) - 1
        if k > 0:
            degrees.extend([i] * (k // i))
            f = _pmod_divrem(f, g, p)[0]
            h = _pmod_divrem(h, f, p)[1] if len(f) > 1 else [0]
    if len(f) - 1 > 0:
        degrees.append(len(f) - 1)
    return degrees


def _subset_sums(degs: Sequence[int]) -> set:
    sums = {0}
    for d in degs:
        sums |= {s + d for s in sums}
    return sums


_SMALL_PRIMES = [p for p in range(3, 400) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def is_irreducible(F: IntPoly) -> bool:
    """Exact irreducibility over Q for degree up to 24.

    A common modular degree-set obstruction over several primes settles the
    irreducible case quickly; anything left goes to Zassenhaus factorization
    with lifting and recombination (sympy).
    """
    F = F.primitive()
    n = F.degree
    if n < 1:
        raise ValueError("constant polynomial")
    if n > IRREDUCIBLE_MAX_DEGREE:
        raise UnsupportedDegreeError("irreducibility test supports degree <= %d, got %d" % (IRREDUCIBLE_MAX_DEGREE, n))
    if n == 1:
        return True
    if F.coeffs[0] == 0:
        return False
    if gcd(F, F.derivative()).degree > 0:
        return False
    possible = set(range(1, n))
    used = 0
    for p in _SMALL_PRIMES:
        degs = distinct_degree_degrees(F, p)
        if degs is None:
            continue
        possible &= _subset_sums(degs)
        used += 1
        if not possible:
            return True
        if used >= 12:
            break
    return _zassenhaus_irreducible(F)


def _zassenhaus_irreducible(F: IntPoly) -> bool:
    import sympy

    x = sympy.Symbol("x")
    expr = sum(sympy.Integer(a) * x ** i for i, a in enumerate(F.coeffs))
    _, factors = sympy.factor_list(expr, x)
    return len(factors) == 1 and factors[0][1] == 1
