"""Exact arithmetic in Q(sqrt(d_1), ..., sqrt(d_k)).

Elements are coordinate tuples over the product basis
b_S = prod_{i in S} sqrt(d_i), indexed by the bitmask S.  The Galois group
is (Z/2)^k; the element with bitmask m flips the sign of sqrt(d_i) for
every bit i set in m, so it multiplies b_S by (-1)^{|S & m|}.

p-adic data: W is the set of masks S whose d_S = prod_{i in S} d_i is a
square in Q_p.  The decomposition group is D = W^perp, the decomposition
field Z = Q(b_S : S in W) embeds in Q_p via Hensel square roots, and the
valuation of x at the base place is v_p(N_{K/Z} x) / |D|.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .errors import ContextError
from .intpoly import IntPoly, prime_factors

Elem = Tuple[Fraction, ...]


def popcount(m: int) -> int:
    return bin(m).count("1")


def chi(S: int, m: int) -> int:
    return -1 if popcount(S & m) & 1 else 1


def is_squarefree(d: int) -> bool:
    d = abs(d)
    if d == 0:
        return False
    return all((d // p) % p for p in prime_factors(d))


def _is_square_int(a: int) -> bool:
    if a < 0:
        return False
    r = isqrt(a)
    return r * r == a


# -- p-adic helpers -------------------------------------------------------

def _vp(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def is_square_in_Qp(a: int, p: int) -> bool:
    if a == 0:
        return True
    v = _vp(a, p)
    if v % 2:
        return False
    u = a // p ** v
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1


def _sqrt_mod_p(a: int, p: int) -> int:
    """Tonelli-Shanks for an odd prime and a quadratic residue a."""
    a %= p
    if a == 0:
        return 0
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def padic_sqrt(a: int, p: int, N: int) -> int:
    """x with x^2 = a mod p^N, for a a p-adic unit square."""
    if p == 2:
        if a % 8 != 1:
            raise ValueError("%d is not a 2-adic unit square" % a)
        x = 1
        for k in range(3, N + 1):
            if (x * x - a) % (1 << (k + 1)):
                x += 1 << (k - 1)
        return x % (1 << N)
    x = _sqrt_mod_p(a, p)
    pk = p
    while pk < p ** N:
        pk = min(pk * pk, p ** N)
        x = (x - (x * x - a) * pow(2 * x, -1, pk)) % pk
    return x % p ** N


class LocalData:
    """Splitting of one rational prime in a multiquadratic field."""

    def __init__(self, field: "MultiquadraticField", p: int):
        self.p = p
        n = field.n
        prods = [field.dprod(S) for S in range(n)]
        self.W = [S for S in range(n) if is_square_in_Qp(prods[S], p)]
        unram = []
        for S in range(n):
            a = prods[S]
            v = _vp(a, p)
            u = a // p ** v
            if v % 2 == 0 and (p != 2 or u % 4 == 1):
                unram.append(S)
        self.D = [m for m in range(n) if all(chi(S, m) == 1 for S in self.W)]
        self.inertia = [m for m in range(n) if all(chi(S, m) == 1 for S in unram)]
        self.e = len(self.inertia)
        self.f = len(self.D) // self.e
        self.local_degree = len(self.D)
        # places are cosets m ^ D; label each by its smallest member
        place_of = {}
        places = []
        for m in range(n):
            if m in place_of:
                continue
            coset = sorted(m ^ h for h in self.D)
            for x in coset:
                place_of[x] = len(places)
            places.append(coset)
        self.places = places
        self.place_of = place_of
        self.field = field
        self._basis = self._w_basis()
        self._iota_cache: Dict[int, Dict[int, int]] = {}

    def _w_basis(self) -> List[int]:
        basis: List[int] = []
        span = {0}
        for S in self.W:
            if S not in span:
                basis.append(S)
                span |= {x ^ S for x in span}
        return basis

    def _iota(self, N: int) -> Dict[int, int]:
        """Images of b_S (S in W) in Z/p^N under the base p-adic embedding."""
        if N in self._iota_cache:
            return self._iota_cache[N]
        p, mod = self.p, self.p ** N
        field = self.field
        img = {0: 1}
        for S in self._basis:
            t = padic_sqrt(field.dprod(S), p, N)
            new = dict(img)
            for T, val in img.items():
                over = field.dprod(T & S)
                new[T ^ S] = val * t * pow(over, -1, mod) % mod
            img = new
        self._iota_cache[N] = img
        return img

    def valuation_in_Z(self, x: Elem) -> Fraction:
        """v_p of an element of the decomposition field under iota_0."""
        p = self.p
        den = 1
        for c in x:
            den = den * c.denominator // igcd(den, c.denominator)
        ints = {S: int(c * den) for S, c in enumerate(x) if c}
        if any(S not in set(self.W) for S in ints):
            raise ValueError("element does not lie in the decomposition field")
        N = 48
        while True:
            img = self._iota(N)
            mod = p ** N
            val = sum(c * img[S] for S, c in ints.items()) % mod
            if val:
                return Fraction(_vp(val, p) - _vp(den, p))
            N *= 2
            if N > 4096:
                raise ArithmeticError("p-adic valuation did not stabilise")

    def valuations(self, x: Elem) -> List[Fraction]:
        """v_{w_0}(g_m x) for every group element m (v(p) = 1)."""
        field = self.field
        out = []
        for m in range(field.n):
            y = field.conj(x, m)
            z = field.one()
            for h in self.D:
                z = field.mul(z, field.conj(y, h))
            out.append(self.valuation_in_Z(z) / len(self.D))
        return out


class MultiquadraticField:
    def __init__(self, ds: Sequence[int]):
        ds = [int(d) for d in ds]
        problems = []
        if not 1 <= len(ds) <= 4:
            problems.append("need between 1 and 4 generators, got %d" % len(ds))
        for d in ds:
            if d in (0, 1) or not is_squarefree(d):
                problems.append("%d is not a squarefree integer other than 0, 1" % d)
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                if igcd(ds[i], ds[j]) != 1:
                    problems.append("%d and %d are not coprime" % (ds[i], ds[j]))
        if not problems:
            for S in range(1, 1 << len(ds)):
                prod = 1
                for i in range(len(ds)):
                    if S >> i & 1:
                        prod *= ds[i]
                if _is_square_int(prod):
                    problems.append("generators are dependent modulo squares (subset %s)" %
                                    [ds[i] for i in range(len(ds)) if S >> i & 1])
        if problems:
            raise ContextError("invalid multiquadratic data", problems)
        self.ds = tuple(ds)
        self.k = len(ds)
        self.n = 1 << self.k
        self._num_cache: Dict[int, list] = {}
        self._local: Dict[int, LocalData] = {}

    # -- element basics --------------------------------------------------
    def dprod(self, S: int) -> int:
        prod = 1
        for i in range(self.k):
            if S >> i & 1:
                prod *= self.ds[i]
        return prod

    def zero(self) -> Elem:
        return (Fraction(0),) * self.n

    def one(self) -> Elem:
        return self.rational(1)

    def rational(self, q) -> Elem:
        return (Fraction(q),) + (Fraction(0),) * (self.n - 1)

    def sqrt_gen(self, i: int) -> Elem:
        x = [Fraction(0)] * self.n
        x[1 << i] = Fraction(1)
        return tuple(x)

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Elem, b: Elem) -> Elem:
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, a: Elem, q) -> Elem:
        q = Fraction(q)
        return tuple(x * q for x in a)

    def mul(self, a: Elem, b: Elem) -> Elem:
        out = [Fraction(0)] * self.n
        for S, x in enumerate(a):
            if not x:
                continue
            for T, y in enumerate(b):
                if y:
                    out[S ^ T] += x * y * self.dprod(S & T)
        return tuple(out)

    def conj(self, a: Elem, m: int) -> Elem:
        return tuple(-x if popcount(S & m) & 1 else x for S, x in enumerate(a))

    def is_rational(self, a: Elem) -> bool:
        return not any(a[1:])

    def norm(self, a: Elem, subgroup: Optional[Sequence[int]] = None) -> Elem:
        z = self.one()
        for m in (range(self.n) if subgroup is None else subgroup):
            z = self.mul(z, self.conj(a, m))
        return z

    def inv(self, a: Elem) -> Elem:
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        rest = self.one()
        for m in range(1, self.n):
            rest = self.mul(rest, self.conj(a, m))
        nm = self.mul(rest, a)[0]
        return self.scale(rest, 1 / nm)

    def pow(self, a: Elem, e: int) -> Elem:
        if e < 0:
            a, e = self.inv(a), -e
        out = self.one()
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def is_torsion(self, a: Elem) -> bool:
        # every root of unity in a multiquadratic field has order dividing 24
        return any(a) and self.pow(a, 24) == self.one()

    def minpoly(self, a: Elem) -> IntPoly:
        conjs = sorted({self.conj(a, m) for m in range(self.n)})
        poly = [self.one()]
        for c in conjs:
            neg = self.scale(c, -1)
            new = [self.zero() for _ in range(len(poly) + 1)]
            for i, coef in enumerate(poly):
                new[i + 1] = self.add(new[i + 1], coef)
                new[i] = self.add(new[i], self.mul(coef, neg))
            poly = new
        rat = []
        for coef in poly:
            if not self.is_rational(coef):
                raise ArithmeticError("conjugate product is not rational")
            rat.append(coef[0])
        den = 1
        for c in rat:
            den = den * c.denominator // igcd(den, c.denominator)
        return IntPoly([int(c * den) for c in rat]).primitive()

    def stabilizer(self, a: Elem) -> List[int]:
        return [m for m in range(self.n) if self.conj(a, m) == a]

    # -- numerics --------------------------------------------------------
    def _basis_values(self, prec: int):
        if prec not in self._num_cache:
            with mp.workprec(prec):
                roots = [mpmath.sqrt(mpmath.mpf(d)) for d in self.ds]
                vals = []
                for S in range(self.n):
                    v = mpmath.mpc(1)
                    for i in range(self.k):
                        if S >> i & 1:
                            v *= roots[i]
                    vals.append(v)
            self._num_cache[prec] = vals
        return self._num_cache[prec]

    def numeric(self, a: Elem, m: int = 0, prec: int = 128):
        """Value of g_m(a) under the principal complex embedding."""
        vals = self._basis_values(prec)
        with mp.workprec(prec):
            z = mpmath.mpc(0)
            for S, x in enumerate(a):
                if x:
                    z += chi(S, m) * mpmath.mpf(x.numerator) / x.denominator * vals[S]
            return z

    def identify(self, z, prec: int = 128, subfield_masks: Optional[Sequence[int]] = None,
                 maxcoeff: int = 10 ** 8) -> Optional[Elem]:
        """Rational coordinates of a numeric value, found by integer relations.

        The caller must verify the result exactly; this only proposes it.
        """
        masks = list(range(self.n)) if subfield_masks is None else list(subfield_masks)
        vals = self._basis_values(prec)
        with mp.workprec(prec):
            z = mpmath.mpc(z)
            real_masks = [S for S in masks if self.dprod(S) > 0]
            imag_masks = [S for S in masks if self.dprod(S) < 0]
            coords = [Fraction(0)] * self.n
            for part, ms, get in ((z.real, real_masks, lambda v: v.real),
                                  (z.imag, imag_masks, lambda v: v.imag)):
                if abs(part) < mpmath.ldexp(1, -prec // 2):
                    continue
                if not ms:
                    return None
                vec = [part] + [get(vals[S]) for S in ms]
                rel = mpmath.pslq(vec, maxcoeff=maxcoeff, maxsteps=20000)
                if rel is None or rel[0] == 0:
                    return None
                for S, r in zip(ms, rel[1:]):
                    coords[S] = Fraction(-r, rel[0])
        return tuple(coords)

    def root_mod_torsion(self, a: Elem, k: int, prec: int = 256) -> Optional[Elem]:
        """Some theta in the field with theta^k / a a root of unity, else None."""
        if k == 1:
            return a
        prec = max(prec, 256)
        with mp.workprec(prec):
            z = self.numeric(a, 0, prec)
            if all(d > 0 for d in self.ds):
                r = abs(z) ** (mpmath.mpf(1) / k)
                cands = [r, -r]
            else:
                cands = []
                for t in range(24):
                    w = (z * mpmath.expjpi(mpmath.mpf(t) / 12)) ** (mpmath.mpf(1) / k)
                    for s in range(k):
                        cands.append(w * mpmath.expjpi(mpmath.mpf(2 * s) / k))
            for w in cands:
                theta = self.identify(w, prec)
                if theta is None or not any(theta):
                    continue
                if self.is_torsion(self.mul(self.pow(theta, k), self.inv(a))):
                    return theta
        return None

    # -- p-adic ----------------------------------------------------------
    def local(self, p: int) -> LocalData:
        if p not in self._local:
            self._local[p] = LocalData(self, p)
        return self._local[p]

    def support_primes(self, a: Elem) -> List[int]:
        """Primes at which a is not a unit (divisors of its norm's num/den)."""
        nm = self.norm(a)[0]
        return sorted(set(prime_factors(nm.numerator)) | set(prime_factors(nm.denominator)))

    # -- text ------------------------------------------------------------
    def basis_name(self, S: int) -> str:
        if S == 0:
            return "1"
        return "*".join("sqrt(%d)" % self.ds[i] for i in range(self.k) if S >> i & 1)

    def format(self, a: Elem) -> str:
        parts = []
        for S, x in enumerate(a):
            if not x:
                continue
            name = self.basis_name(S)
            mag = abs(x)
            if S == 0:
                body = str(mag)
            elif mag == 1:
                body = name
            else:
                body = "%s*%s" % (mag, name)
            sign = "-" if x < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += " %s %s" % (sign, body)
        return out

    def parse(self, text: str) -> Elem:
        """Parse sums of rational multiples of products of sqrt(d) terms.

        Accepts e.g. ``2 + sqrt(2)``, ``1/2*sqrt(2)*sqrt(3) - 3``; each
        sqrt argument must be a generator d_i or a product of generators.
        """
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty element")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"([+-])([^+-]+)", s)
        if "".join(a + b for a, b in terms) != s:
            raise ValueError("cannot parse element %r" % text)
        out = self.zero()
        for sign, body in terms:
            coef = Fraction(1)
            elem = self.one()
            for factor in body.split("*"):
                m = re.fullmatch(r"sqrt\((-?\d+)\)", factor)
                if m:
                    elem = self.mul(elem, self._sqrt_of(int(m.group(1))))
                elif re.fullmatch(r"\d+(/\d+)?", factor):
                    coef *= Fraction(factor)
                else:
                    raise ValueError("cannot parse factor %r" % factor)
            if sign == "-":
                coef = -coef
            out = self.add(out, self.scale(elem, coef))
        return out

    def _sqrt_of(self, d: int) -> Elem:
        for S in range(self.n):
            prod = self.dprod(S)
            if prod == d:
                return tuple(Fraction(1) if T == S else Fraction(0) for T in range(self.n))
            # sqrt(d) = sqrt(prod) * c when d = prod * c^2
            if d % prod == 0 and (d // prod) > 0 and _is_square_int(d // prod):
                c = isqrt(d // prod)
                return tuple(Fraction(c) if T == S else Fraction(0) for T in range(self.n))
        raise ValueError("sqrt(%d) does not lie in this field" % d)
