"""Element models behind Galois contexts.

A model knows the exact elements of one ambient Galois field and supplies,
for a base element beta and every group index m, the archimedean value
log|tau_0(g_m beta)| and the finite valuations v_{w_0}(g_m beta).
Group elements are stored so that index m is the permutation sending
root 0 of the generator to root m; then g_i g_j has index perm_i[j].
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .errors import PairingUnavailableError
from .intpoly import IntPoly, newton_polygon, prime_factors
from .mqfield import Elem, MultiquadraticField
from .numroots import isolate_roots


class MultiquadraticModel:
    kind = "multiquadratic"

    def __init__(self, ds: Sequence[int]):
        self.field = MultiquadraticField(ds)
        self.n = self.field.n
        self.group = [tuple(m ^ j for j in range(self.n)) for m in range(self.n)]
        self._logs: Dict[Tuple[Elem, int], list] = {}
        self._vals: Dict[Tuple[Elem, int], list] = {}

    def to_json(self):
        return {"kind": self.kind, "d": list(self.field.ds)}

    def generator(self) -> Elem:
        x = self.field.zero()
        for i in range(self.field.k):
            x = self.field.add(x, self.field.sqrt_gen(i))
        return x

    def generator_values(self, prec: int):
        g = self.generator()
        return [self.field.numeric(g, m, prec) for m in range(self.n)]

    # -- base elements ---------------------------------------------------
    def canonical_base(self, beta: Elem) -> Tuple[Elem, int]:
        """Pick the largest conjugate up to sign; return (base, j) with beta = +-g_j base."""
        F = self.field
        best = None
        for m in range(self.n):
            c = F.conj(beta, m)
            lead = next(x for x in c if x)
            cand = F.scale(c, -1) if lead < 0 else c
            if best is None or cand > best[0]:
                best = (cand, m)
        return best[0], best[1]

    def minpoly(self, beta: Elem) -> IntPoly:
        return self.field.minpoly(beta)

    def format_conj(self, beta: Elem, j: int) -> str:
        return self.field.format(self.field.conj(beta, j))

    def format(self, beta: Elem) -> str:
        return self.field.format(beta)

    def is_unit(self, beta: Elem) -> bool:
        nm = self.field.norm(beta)[0]
        return abs(nm) == 1

    def primes(self, beta: Elem) -> List[int]:
        return self.field.support_primes(beta)

    def fstab(self, beta: Elem) -> List[int]:
        """Group indices m with g_m(beta)/beta a root of unity."""
        F = self.field
        inv = F.inv(beta)
        return [m for m in range(self.n) if F.is_torsion(F.mul(F.conj(beta, m), inv))]

    def arch_logs(self, beta: Elem, prec: int):
        key = (beta, prec)
        if key not in self._logs:
            with mp.workprec(prec + 16):
                self._logs[key] = [mpmath.log(abs(self.field.numeric(beta, m, prec + 16))) for m in range(self.n)]
        return self._logs[key]

    def valuations(self, beta: Elem, p: int) -> List[Fraction]:
        key = (beta, p)
        if key not in self._vals:
            self._vals[key] = self.field.local(p).valuations(beta)
        return self._vals[key]

    def splitting(self, p: int):
        L = self.field.local(p)
        return [{"place": i, "local_degree": L.local_degree, "e": L.e, "f": L.f, "embeddings": list(c)}
                for i, c in enumerate(L.places)]

    # -- resolution ------------------------------------------------------
    def resolve(self, F: IntPoly, root_index: int, prec: int) -> Optional[Tuple[Elem, int]]:
        F = F.primitive()
        if F.degree == 1:
            return self.canonical_base(self.field.rational(Fraction(-F.coeffs[0], F.coeffs[1])))
        if self.n % F.degree:
            return None
        roots = isolate_roots(F, prec=prec)
        z = roots[root_index].approx
        cand = self.field.identify(z, prec=prec)
        if cand is None:
            return None
        if self.field.minpoly(cand) != F:
            return None
        with mp.workprec(prec):
            if abs(self.field.numeric(cand, 0, prec) - z) > roots[root_index].radius + mpmath.ldexp(1, -prec // 2):
                return None
        return self.canonical_base(cand)

    def element_relation(self, parts: Sequence[Tuple[Elem, int, int]]) -> Elem:
        """prod (g_j base)^e over (base, j, e), computed exactly."""
        F = self.field
        out = F.one()
        for base, j, e in parts:
            out = F.mul(out, F.pow(F.conj(base, j), e))
        return out

    def is_torsion(self, x: Elem) -> bool:
        return self.field.is_torsion(x)


# -- cubic closures -------------------------------------------------------

_S3 = list(itertools.permutations(range(3)))  # identity first


def _compose3(a, b):
    return tuple(a[b[i]] for i in range(3))


class CubicModel:
    """Splitting field of an irreducible cubic: cyclic (degree 3) or S3 (degree 6).

    Base elements are ("root", 0), the first certified root of the cubic,
    and ("rat", q) for rationals; the other roots are reached through the
    group index.
    """

    kind = "cubic"

    def __init__(self, F: IntPoly, square_disc: bool, prec: int = 128):
        self.F = F.primitive()
        self.cyclic = square_disc
        if square_disc:
            self.perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        else:
            self.perms = list(_S3)
        self.n = len(self.perms)
        idx = {p: i for i, p in enumerate(self.perms)}
        # regular action: sigma sends index k to index(sigma o pi_k)
        self.group = [tuple(idx[_compose3(s, p)] for p in self.perms) for s in self.perms]
        self.prec = prec
        self._tstab = None
        self._theta_coeff = None

    def to_json(self):
        return {"kind": self.kind, "poly": list(self.F.coeffs)}

    def roots(self, prec: int):
        return [r.approx for r in isolate_roots(self.F, prec=prec)]

    def theta_coeff(self, prec: int) -> int:
        """Smallest c >= 1 making r_0 + c r_1 a primitive element (S3 case)."""
        if self._theta_coeff is None:
            r = self.roots(prec)
            c = 1
            while True:
                vals = [r[p[0]] + c * r[p[1]] for p in self.perms]
                if all(abs(vals[i] - vals[j]) > 1e-6 for i in range(6) for j in range(i)):
                    break
                c += 1
            self._theta_coeff = c
        return self._theta_coeff

    def generator_values(self, prec: int):
        r = self.roots(prec)
        if self.cyclic:
            return [r[p[0]] for p in self.perms]
        c = self.theta_coeff(prec)
        a = self.F.lc
        return [a * (r[p[0]] + c * r[p[1]]) for p in self.perms]

    def generator_minpoly(self, prec: int) -> IntPoly:
        if self.cyclic:
            return self.F
        vals = self.generator_values(prec)
        # a * (r_0 + c r_1) is an algebraic integer (a the leading
        # coefficient), so the expanded product has integer coefficients
        with mp.workprec(prec):
            poly = [mpmath.mpc(1)]
            for v in vals:
                new = [mpmath.mpc(0)] * (len(poly) + 1)
                for i, c in enumerate(poly):
                    new[i] += c * (-v)
                    new[i + 1] += c
                poly = new
            coeffs = []
            for c in poly:
                k = int(mpmath.nint(c.real))
                if abs(c - k) > mpmath.mpf("1e-6"):
                    raise ArithmeticError("generator polynomial has non-integral coefficients")
                coeffs.append(k)
        return IntPoly(coeffs).primitive()

    # -- base elements ---------------------------------------------------
    def canonical_base(self, beta):
        return beta, 0

    def root_class(self, i: int) -> Tuple[tuple, int]:
        """(base, j) for the i-th root of the cubic."""
        for j, p in enumerate(self.perms):
            if p[0] == i:
                return ("root", 0), j
        raise ValueError("root index out of range")

    def minpoly(self, beta) -> IntPoly:
        if beta[0] == "rat":
            q = Fraction(beta[1])
            return IntPoly([-q.numerator, q.denominator])
        return self.F

    def format(self, beta) -> str:
        if beta[0] == "rat":
            return str(beta[1])
        return "root0(%s)" % self.F

    def format_conj(self, beta, j: int) -> str:
        if beta[0] == "rat":
            return str(beta[1])
        return "r%d" % self.perms[j][0]

    def is_unit(self, beta) -> bool:
        if beta[0] == "rat":
            return abs(Fraction(beta[1])) == 1
        return self.F.lc == 1 and abs(self.F.coeffs[0]) == 1

    def primes(self, beta) -> List[int]:
        if beta[0] == "rat":
            q = Fraction(beta[1])
            return sorted(set(prime_factors(q.numerator)) | set(prime_factors(q.denominator)))
        return sorted(set(prime_factors(self.F.lc)) | set(prime_factors(self.F.coeffs[0])))

    def fstab(self, beta) -> List[int]:
        if beta[0] == "rat":
            return list(range(self.n))
        if self._tstab is None:
            from .classify import delta

            if delta(self.F) == 1:
                self._tstab = list(range(self.n))
            else:
                self._tstab = [j for j, p in enumerate(self.perms) if p[0] == 0]
        return self._tstab

    def values(self, beta, prec: int):
        """Complex value of beta under each group index."""
        with mp.workprec(prec + 16):
            if beta[0] == "rat":
                q = Fraction(beta[1])
                return [mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)] * self.n
            r = self.roots(prec + 16)
            return [r[p[0]] for p in self.perms]

    def arch_logs(self, beta, prec: int):
        with mp.workprec(prec + 16):
            if beta[0] == "rat":
                v = mpmath.log(abs(mpmath.mpf(Fraction(beta[1]).numerator) / Fraction(beta[1]).denominator))
                return [v] * self.n
            r = self.roots(prec + 16)
            return [mpmath.log(abs(r[p[0]])) for p in self.perms]

    def valuations(self, beta, p: int) -> List[Fraction]:
        if beta[0] == "rat":
            q = Fraction(beta[1])
            v = _vp_signed(q, p)
            return [Fraction(v)] * self.n
        NP = newton_polygon(self.F, p)
        if len(NP.segments) != 1:
            raise PairingUnavailableError(
                "roots of %s have distinct %d-adic valuations; no splitting data in this context" % (self.F, p))
        return [-NP.segments[0][0]] * self.n

    def splitting(self, p: int):
        return None

    def resolve(self, F: IntPoly, root_index: int, prec: int):
        F = F.primitive()
        if F.degree == 1:
            return ("rat", str(Fraction(-F.coeffs[0], F.coeffs[1]))), 0
        if F == self.F:
            return self.root_class(root_index)
        return None

    def element_relation(self, parts):
        return None

    def is_torsion(self, x) -> bool:
        return False


def _vp_signed(q: Fraction, p: int) -> int:
    v = 0
    a, b = q.numerator, q.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v
