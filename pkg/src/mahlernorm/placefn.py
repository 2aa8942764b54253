"""Step functions on the place space and the norms built from them.

A class f_alpha takes the value log||alpha||_v on the places v of a field
containing alpha, each block of places weighted by [K_v:Q_v]/[K:Q].  For a
single generator the archimedean atoms come from certified roots and the
finite atoms from Newton polygons; classes resolved in a Galois context
read both off the context's embeddings instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import mpmath
from mpmath import mp

from .algclass import AlgClass
from .errors import PairingUnavailableError, ReducibleError
from .intpoly import IntPoly, is_irreducible, newton_polygon, prime_factors
from .numroots import default_prec, isolate_roots, tolerance, working_prec

INF = "inf"


@dataclass(frozen=True)
class PlaceAtom:
    block: Union[str, int]
    # archimedean: an mpf; finite: Fraction q meaning q*log(p)
    value: object
    measure: Fraction
    error: object = 0

    @property
    def archimedean(self) -> bool:
        return self.block == INF

    def numeric(self):
        if self.archimedean:
            return self.value
        return mpmath.mpf(self.value.numerator) / self.value.denominator * mpmath.log(self.block)


@dataclass(frozen=True)
class PlaceFunction:
    atoms: tuple
    provenance: Optional[AlgClass] = None
    prec: int = 128

    def blocks(self) -> Dict[Union[str, int], List[PlaceAtom]]:
        out: Dict[Union[str, int], List[PlaceAtom]] = {}
        for a in self.atoms:
            out.setdefault(a.block, []).append(a)
        return out

    @property
    def error(self):
        return max([a.error for a in self.atoms] + [0])

    def finite_atoms(self) -> List[PlaceAtom]:
        return [a for a in self.atoms if not a.archimedean and a.value != 0]

    def is_unit(self) -> bool:
        return not self.finite_atoms()

    def to_dict(self) -> dict:
        out: Dict[str, list] = {}
        with mp.workprec(self.prec):
            for a in self.atoms:
                if a.archimedean:
                    val = mpmath.nstr(a.value, int(self.prec * 0.30103) + 2, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
                else:
                    val = "%s*log(%d)" % (a.value, a.block)
                out.setdefault(str(a.block), []).append([val, str(a.measure)])
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, prec: int = 128) -> "PlaceFunction":
        atoms = []
        with mp.workprec(prec):
            for block, items in data.items():
                for val, meas in items:
                    if block == INF:
                        atoms.append(PlaceAtom(INF, mpmath.mpf(val), Fraction(meas)))
                    else:
                        q = val.split("*log(")[0]
                        atoms.append(PlaceAtom(int(block), Fraction(q), Fraction(meas)))
        return cls(tuple(atoms), None, prec)


def _merge(atoms: List[PlaceAtom], tol) -> List[PlaceAtom]:
    """Combine atoms of one block whose values agree (within tol if numeric)."""
    out: List[PlaceAtom] = []
    for a in sorted(atoms, key=lambda t: (str(t.block), float(t.value) if t.archimedean else t.value)):
        if out and out[-1].block == a.block:
            b = out[-1]
            same = abs(b.value - a.value) <= tol if a.archimedean else b.value == a.value
            if same:
                out[-1] = PlaceAtom(b.block, b.value, b.measure + a.measure, max(b.error, a.error))
                continue
        out.append(a)
    return out


def _standalone_atoms(F: IntPoly, coeff: Fraction, prec: int) -> List[PlaceAtom]:
    F = F.primitive()
    n = F.degree
    if not is_irreducible(F):
        raise ReducibleError("%s is reducible" % F)
    roots = isolate_roots(F, prec=prec)
    wp = working_prec(F, prec)
    atoms = []
    with mp.workprec(wp + 16):
        c = mpmath.mpf(coeff.numerator) / coeff.denominator
        for r in roots:
            if r.is_real:
                meas = Fraction(1, n)
            elif isinstance(r.pairing, int) and r.pairing > roots.index(r):
                meas = Fraction(2, n)
            else:
                continue
            a = abs(r.approx)
            err = abs(c) * r.radius / max(a - r.radius, mpmath.mpf(r.radius) / 2) if r.radius else mpmath.mpf(0)
            atoms.append(PlaceAtom(INF, c * mpmath.log(a), meas, err))
        for p in sorted(set(prime_factors(F.lc)) | set(prime_factors(F.coeffs[0]))):
            for slope, length in newton_polygon(F, p).segments:
                atoms.append(PlaceAtom(p, coeff * slope, Fraction(length, n)))
    return atoms


def _context_atoms(f: AlgClass, prec: int) -> List[PlaceAtom]:
    ctx = f.ctx
    n = ctx.degree
    atoms = []
    for v in ctx.arch_vector(f, prec):
        atoms.append(PlaceAtom(INF, v, Fraction(1, n)))
    for p in ctx.support_primes(f):
        for q in ctx.finite_vector(f, p):
            atoms.append(PlaceAtom(p, q, Fraction(1, n)))
    return atoms


def place_function(f: Union[AlgClass, IntPoly], prec: Optional[int] = None) -> PlaceFunction:
    """The step function of a class (an IntPoly means f of one of its roots)."""
    if isinstance(f, IntPoly):
        f = AlgClass.of(f)
    prec = prec or default_prec()
    if f.is_zero():
        return PlaceFunction((), f, prec)
    if f.ctx is not None:
        atoms = _context_atoms(f, prec)
    else:
        gens = {(g.minpoly, g.root_index) for g, _ in f.terms}
        if len(gens) != 1:
            raise PairingUnavailableError("a combination of distinct generators needs a Galois context")
        g, c = f.terms[0]
        atoms = _standalone_atoms(g.minpoly, c, prec)
    with mp.workprec(prec):
        tol = tolerance(prec)
    return PlaceFunction(tuple(_merge(atoms, tol)), f, prec)


def _as_pf(f, prec) -> PlaceFunction:
    if isinstance(f, PlaceFunction):
        return f
    return place_function(f, prec)


def _parse_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity", "oo"):
            return math.inf
        p = float(p)
    if p != math.inf and p < 1:
        raise ValueError("h_p needs p >= 1, got %s" % p)
    return p


def lp_norm(pf: PlaceFunction, p) -> mpmath.mpf:
    """||f||_p over the place space; p = inf takes the maximum."""
    p = _parse_p(p)
    with mp.workprec(pf.prec + 16):
        if p == math.inf:
            return max([abs(a.numeric()) for a in pf.atoms if a.measure > 0] + [mpmath.mpf(0)])
        if isinstance(p, float) and p.is_integer():
            p = int(p)
        pp = mpmath.mpf(p) if not isinstance(p, int) else p
        total = mpmath.mpf(0)
        for a in pf.atoms:
            v = abs(a.numeric())
            if v:
                total += v ** pp * (mpmath.mpf(a.measure.numerator) / a.measure.denominator)
        if total == 0:
            return mpmath.mpf(0)
        return total ** (1 / mpmath.mpf(pp))


def h_p(f, p, prec: Optional[int] = None):
    prec = prec or default_prec()
    return lp_norm(_as_pf(f, prec), p)


def integral(f, prec: Optional[int] = None):
    """Sum of value times measure; zero by the product formula."""
    prec = prec or default_prec()
    pf = _as_pf(f, prec)
    with mp.workprec(pf.prec + 16):
        total = mpmath.mpf(0)
        finite: Dict[int, Fraction] = {}
        for a in pf.atoms:
            if a.archimedean:
                total += a.value * (mpmath.mpf(a.measure.numerator) / a.measure.denominator)
            else:
                finite[a.block] = finite.get(a.block, Fraction(0)) + a.value * a.measure
        for p, q in finite.items():
            total += mpmath.mpf(q.numerator) / q.denominator * mpmath.log(p)
        return total


def inner_product(f: AlgClass, g: AlgClass, ctx=None, prec: Optional[int] = None):
    """<f, g> = integral of f*g over the place space."""
    prec = prec or (ctx.prec if ctx is not None else default_prec())
    if ctx is not None:
        if f.ctx is None:
            f = _resolve_into(ctx, f)
        if g.ctx is None:
            g = _resolve_into(ctx, g)
    if f.is_zero() or g.is_zero():
        return mpmath.mpf(0)
    if f.ctx is not None or g.ctx is not None:
        if f.ctx is not g.ctx:
            raise PairingUnavailableError("classes are not resolved in a common context")
        return context_inner(f.ctx, f, g, prec)
    sf, sg = f.single(), g.single()
    if sf and sg and (sf[0].minpoly, sf[0].root_index) == (sg[0].minpoly, sg[0].root_index):
        base = AlgClass([(sf[0], 1)])
        h2 = h_p(base, 2, prec)
        with mp.workprec(prec + 16):
            return h2 * h2 * (mpmath.mpf(sf[1].numerator) / sf[1].denominator) * (
                mpmath.mpf(sg[1].numerator) / sg[1].denominator)
    raise PairingUnavailableError("distinct generators can only be paired inside a Galois context")


def _resolve_into(ctx, f: AlgClass) -> AlgClass:
    out = None
    for g, c in f.terms:
        part = ctx.resolve(g.minpoly, g.root_index or 0) * c
        out = part if out is None else out + part
    return ctx.canonical(out) if out is not None else AlgClass((), ctx)


def context_inner(ctx, f: AlgClass, g: AlgClass, prec: Optional[int] = None):
    prec = prec or ctx.prec
    n = ctx.degree
    with mp.workprec(prec + 16):
        af, ag = ctx.arch_vector(f, prec), ctx.arch_vector(g, prec)
        total = mpmath.fsum(x * y for x, y in zip(af, ag))
        fin = Fraction(0)
        for p in sorted(set(ctx.support_primes(f)) & set(ctx.support_primes(g))):
            qf, qg = ctx.finite_vector(f, p), ctx.finite_vector(g, p)
            s = sum((x * y for x, y in zip(qf, qg)), Fraction(0))
            if s:
                total += mpmath.mpf(s.numerator) / s.denominator * mpmath.log(p) ** 2
        return total / n


def cauchy_schwarz_gap(f, g, ctx=None, prec=None):
    """h_2(f) h_2(g) - |<f, g>|, nonnegative up to rounding."""
    return h_p(f, 2, prec) * h_p(g, 2, prec) - abs(inner_product(f, g, ctx, prec))
