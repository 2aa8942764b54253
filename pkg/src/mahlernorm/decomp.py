"""Projections P_K, T_K, P^(n), T^(n), the operator M and Mahler norms.

All projections act on classes with exact rational coefficients.  P_K is
the average of the Galois translates over H_K; T_K is the Moebius
combination of the P_F below K on the lattice of Galois subfields.  The
degree projections P^(n) use the T_K shortcut in abelian contexts and an
orthogonal projection onto a finite spanning family otherwise, with the
coefficients recovered as rationals and checked afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mp

from .algclass import AlgClass, Generator
from .ctxmodels import MultiquadraticModel
from .errors import NotASubfieldError, PairingUnavailableError, ReconstructionError
from .galoisctx import GaloisContext, mobius
from .intpoly import prime_factors
from .numroots import default_prec, tolerance
from .placefn import h_p, inner_product

__all__ = [
    "AlgClass", "DecompositionResult", "project_PK", "project_TK", "project_Pn", "project_Tn",
    "gram_projection", "m_operator", "mahler_norm", "mahler2_inner", "m_factorization",
    "classes_equal", "as_single", "place_vector", "simplify_text", "degree_family",
    "degree_components", "decomposition_residuals",
]


def _ctx_of(ctx, f: AlgClass) -> GaloisContext:
    ctx = ctx if ctx is not None else f.ctx
    if ctx is None:
        raise PairingUnavailableError("this operation needs a Galois context")
    if f.ctx is not None and f.ctx is not ctx:
        raise PairingUnavailableError("class belongs to another context")
    return ctx


def _lift(ctx: GaloisContext, f: AlgClass) -> AlgClass:
    """f resolved in ctx (standalone generators are resolved through the model)."""
    if f.ctx is ctx:
        return f
    if f.ctx is not None:
        raise PairingUnavailableError("class belongs to another context")
    out = AlgClass((), ctx)
    for g, c in f.terms:
        out = out + ctx.resolve(g.minpoly, g.root_index or 0) * c
    return ctx.canonical(out)


# -- field projections -------------------------------------------------------

def project_PK(ctx: GaloisContext, K, f: AlgClass) -> AlgClass:
    """Average of L_h f over h in H_K."""
    ctx = _ctx_of(ctx, f)
    f = _lift(ctx, f)
    H = sorted(ctx.subfield(K).subgroup)
    terms = []
    w = Fraction(1, len(H))
    for h in H:
        for g, c in f.terms:
            terms.append((Generator(g.minpoly, None, g.base, ctx.group[h][g.conj]), c * w))
    return ctx.canonical(AlgClass(terms, ctx))


def project_TK(ctx: GaloisContext, K, f: AlgClass) -> AlgClass:
    """Sum over Galois F inside K of mu(F, K) P_F f."""
    ctx = _ctx_of(ctx, f)
    f = _lift(ctx, f)
    K = ctx.subfield(K)
    if not ctx.is_galois(K):
        raise NotASubfieldError("%s is not Galois over Q" % K.label)
    out = AlgClass((), ctx)
    for F in ctx.galois_subfields():
        if ctx.contains(F, K):
            mu = mobius(ctx, F, K, galois_only=True)
            if mu:
                out = out + project_PK(ctx, F, f) * mu
    return ctx.canonical(out)


# -- numeric place vectors and the Gram projection ---------------------------

def place_vector(ctx: GaloisContext, f: AlgClass, primes, prec: int):
    """Archimedean entries followed by q*log(p) entries for each prime."""
    vec = list(ctx.arch_vector(f, prec))
    with mp.workprec(prec + 16):
        for p in primes:
            lp = mpmath.log(p)
            vec.extend(mpmath.mpf(q.numerator) / q.denominator * lp for q in ctx.finite_vector(f, p))
    return vec


def _dot(u, v, n):
    return mpmath.fsum(a * b for a, b in zip(u, v)) / n


def _to_fraction(x, bound: int, prec: int) -> Fraction:
    with mp.workprec(prec + 16):
        m, e = mpmath.frexp(x)
        exact = Fraction(int(mpmath.nint(m * mpmath.mpf(2) ** (prec + 8)))) * Fraction(2) ** (e - prec - 8)
    return exact.limit_denominator(bound)


def gram_projection(ctx: GaloisContext, family: List[AlgClass], f: AlgClass,
                    prec: Optional[int] = None) -> Tuple[AlgClass, object]:
    """Orthogonal projection of f onto span(family), with rational coefficients.

    Returns the projected class and the largest residual inner product
    |<f - Pf, e>| over the family.  Raises ReconstructionError when the
    recovered rationals do not reproduce an orthogonal residual.
    """
    prec = prec or ctx.prec
    n = ctx.degree
    primes = sorted(set(ctx.support_primes(f)).union(*[ctx.support_primes(e) for e in family]))
    wp = prec + 32
    with mp.workprec(wp):
        tol = tolerance(prec)
        vecs = [place_vector(ctx, e, primes, wp) for e in family]
        target = place_vector(ctx, f, primes, wp)
        # pick an independent subfamily by Gram-Schmidt with a relative threshold
        thresh = mpmath.ldexp(1, -prec // 3)
        chosen, ortho = [], []
        for i, v in enumerate(vecs):
            w = list(v)
            for u in ortho:
                c = _dot(w, u, n) / _dot(u, u, n)
                w = [a - c * b for a, b in zip(w, u)]
            nv = _dot(v, v, n)
            if nv > 0 and _dot(w, w, n) > thresh * nv:
                chosen.append(i)
                ortho.append(w)
        if not chosen:
            return AlgClass((), ctx), mpmath.mpf(0)
        G = mpmath.matrix(len(chosen), len(chosen))
        b = mpmath.matrix(len(chosen), 1)
        for a, i in enumerate(chosen):
            b[a] = _dot(vecs[i], target, n)
            for c, j in enumerate(chosen):
                G[a, c] = _dot(vecs[i], vecs[j], n)
        coeffs = mpmath.lu_solve(G, b)
        bound = n * 2 ** 16
        out = AlgClass((), ctx)
        for a, i in enumerate(chosen):
            q = _to_fraction(coeffs[a], bound, prec)
            if abs(coeffs[a] - mpmath.mpf(q.numerator) / q.denominator) > tol * (1 + abs(coeffs[a])):
                raise ReconstructionError("coefficient %s has no rational form with denominator <= %d"
                                          % (mpmath.nstr(coeffs[a], 20), bound))
            out = out + family[i] * q
        out = ctx.canonical(out)
        resid_vec = [a - c for a, c in zip(target, place_vector(ctx, out, primes, wp))]
        scale = 1 + mpmath.sqrt(_dot(target, target, n))
        worst = mpmath.mpf(0)
        for v in vecs:
            r = abs(_dot(resid_vec, v, n))
            worst = max(worst, r)
            if r > tol * scale * (1 + mpmath.sqrt(_dot(v, v, n))):
                raise ReconstructionError("projection residual %s is not orthogonal to the family"
                                          % mpmath.nstr(r, 5))
    return out, worst


def degree_family(ctx: GaloisContext, n: int, f: AlgClass) -> List[AlgClass]:
    """P_F L_sigma f_beta for [F:Q] <= n, beta over the bases of f."""
    seen = set()
    fam = []
    bases = []
    for g, _ in f.terms:
        if g.base not in bases:
            bases.append(g.base)
    for F in sorted(ctx.subfields, key=lambda s: (s.degree, s.label)):
        if F.degree > n:
            continue
        for beta in bases:
            for sigma in range(ctx.degree):
                e = project_PK(ctx, F, AlgClass([(ctx._gen(beta, sigma), 1)], ctx))
                if e.is_zero() or e in seen:
                    continue
                seen.add(e)
                fam.append(e)
    return fam


# -- degree projections -------------------------------------------------------

def _in_subfield(ctx: GaloisContext, f: AlgClass, F) -> bool:
    return classes_equal(project_PK(ctx, F, f), f)


def _standalone_degree(f: AlgClass) -> int:
    """delta for a standalone class known to be projection irreducible."""
    from .classify import fast_path_delta

    sf = f.single()
    if sf is None:
        raise PairingUnavailableError("degree projections of a combination need a Galois context")
    d = fast_path_delta(sf[0].minpoly)
    if d is None:
        raise PairingUnavailableError(
            "%s is not a surd, Salem number or unit of prime degree; supply a Galois context" % sf[0].minpoly)
    return d


def project_Pn(ctx: Optional[GaloisContext], n: int, f: AlgClass, method: str = "auto") -> AlgClass:
    if n < 1:
        raise ValueError("degree must be positive")
    if ctx is None and f.ctx is None:
        return f if _standalone_degree(f) <= n else AlgClass(())
    ctx = _ctx_of(ctx, f)
    f = _lift(ctx, f)
    subs = [s for s in ctx.subfields if s.degree <= n]
    if n >= ctx.degree:
        return f
    if method == "gram":
        return gram_projection(ctx, degree_family(ctx, n, f), f)[0]
    if ctx.abelian:
        out = AlgClass((), ctx)
        for K in subs:
            out = out + project_TK(ctx, K, f)
        return ctx.canonical(out)
    # one subfield containing all others: P^(n) is P of that field
    for K in subs:
        if all(ctx.contains(F, K) for F in subs):
            return project_PK(ctx, K, f)
    for K in subs:
        if _in_subfield(ctx, f, K):
            return f
    return gram_projection(ctx, degree_family(ctx, n, f), f)[0]


def project_Tn(ctx: Optional[GaloisContext], n: int, f: AlgClass) -> AlgClass:
    if n < 1:
        raise ValueError("degree must be positive")
    if ctx is None and f.ctx is None:
        return f if _standalone_degree(f) == n else AlgClass(())
    ctx = _ctx_of(ctx, f)
    hi = project_Pn(ctx, n, f)
    if n == 1:
        return hi
    return ctx.canonical(hi - project_Pn(ctx, n - 1, f))


def _degrees(ctx: Optional[GaloisContext], f: AlgClass) -> List[int]:
    if ctx is None and f.ctx is None:
        return [_standalone_degree(f)]
    ctx = _ctx_of(ctx, f)
    return sorted({s.degree for s in ctx.subfields})


def degree_components(ctx: Optional[GaloisContext], f: AlgClass) -> Dict[int, AlgClass]:
    """n -> T^(n) f for the nonzero components."""
    if ctx is None and f.ctx is None:
        return {_standalone_degree(f): f} if not f.is_zero() else {}
    ctx = _ctx_of(ctx, f)
    f = _lift(ctx, f)
    out = {}
    prev = AlgClass((), ctx)
    for n in _degrees(ctx, f):
        cur = project_Pn(ctx, n, f)
        comp = ctx.canonical(cur - prev)
        if not comp.is_zero():
            out[n] = comp
        prev = cur
    return out


def m_operator(ctx: Optional[GaloisContext], f: AlgClass) -> AlgClass:
    """M f = sum of n T^(n) f."""
    comps = degree_components(ctx, f)
    out = None
    for n, c in comps.items():
        out = c * n if out is None else out + c * n
    if out is None:
        return AlgClass((), ctx if ctx is not None else f.ctx)
    return out.ctx.canonical(out) if out.ctx is not None else out


def mahler_norm(f: AlgClass, p, ctx: Optional[GaloisContext] = None, prec: Optional[int] = None):
    """||f||_{m,p} = h_p(M f)."""
    prec = prec or (ctx.prec if ctx is not None else default_prec())
    return h_p(m_operator(ctx, f), p, prec)


def mahler2_inner(f: AlgClass, g: AlgClass, ctx: Optional[GaloisContext] = None,
                  prec: Optional[int] = None):
    """Sum over n of n^2 <T^(n) f, T^(n) g>."""
    cf, cg = degree_components(ctx, f), degree_components(ctx, g)
    c = ctx if ctx is not None else (f.ctx or g.ctx)
    prec = prec or (c.prec if c is not None else default_prec())
    with mp.workprec(prec + 16):
        total = mpmath.mpf(0)
        for n in set(cf) & set(cg):
            total += n * n * inner_product(cf[n], cg[n], c, prec)
    return total


# -- equality and simplification ----------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def as_single(f: AlgClass) -> Optional[Tuple[Fraction, object]]:
    """(c, theta) with f = c f_theta when the model can compute theta exactly.

    theta is an exact field element (multiquadratic contexts); the k-th
    roots of theta modulo torsion are extracted for primes k dividing the
    denominator so that c is as large as possible.
    """
    ctx = f.ctx
    if ctx is None or not isinstance(ctx.model, MultiquadraticModel) or f.is_zero():
        return None
    F = ctx.model.field
    D = 1
    for _, c in f.terms:
        D = _lcm(D, c.denominator)
    gamma = ctx.model.element_relation([(g.base, g.conj, int(c * D)) for g, c in f.terms])
    coeff = Fraction(1, D)
    for p in prime_factors(D):
        while coeff.denominator % p == 0:
            root = F.root_mod_torsion(gamma, p, ctx.prec * 2)
            if root is None:
                break
            gamma = root
            coeff *= p
    lead = next(x for x in gamma if x)
    if lead < 0:
        gamma = F.scale(gamma, -1)
    return coeff, gamma


def simplify_text(f: AlgClass) -> str:
    """Short text form, e.g. 'f[1 + sqrt(2)]' or '1/2*f[3]'."""
    single = as_single(f)
    if single is None:
        if f.ctx is None:
            return " + ".join(_scaled(c, _standalone_name(g)) for g, c in f.terms).replace("+ -", "- ") or "0"
        return f.ctx.describe(f)
    c, theta = single
    return _scaled(c, "f[%s]" % f.ctx.model.field.format(theta))


def _scaled(c: Fraction, name: str) -> str:
    if c == 1:
        return name
    if c == -1:
        return "-" + name
    return "%s*%s" % (c, name)


def _standalone_name(g) -> str:
    F = g.minpoly
    if F.degree == 1:
        return "f[%s]" % Fraction(-F.coeffs[0], F.coeffs[1])
    which = "" if g.root_index is None else " #%d" % g.root_index
    return "f[root%s of %s]" % (which, F)


def classes_equal(f: AlgClass, g: AlgClass, prec: Optional[int] = None) -> bool:
    """Exact equality of classes (numeric place vectors for cubic contexts)."""
    if f.ctx is None and g.ctx is None:
        if f == g:
            return True
        if len(f.terms) == 1 and len(g.terms) == 1:
            return False if f.terms[0][0] == g.terms[0][0] else _numeric_zero_standalone(f, g, prec)
        raise PairingUnavailableError("comparing combinations needs a Galois context")
    ctx = f.ctx if f.ctx is not None else g.ctx
    diff = ctx.canonical(_lift(ctx, f) - _lift(ctx, g))
    if diff.is_zero():
        return True
    if isinstance(ctx.model, MultiquadraticModel):
        D = 1
        for _, c in diff.terms:
            D = _lcm(D, c.denominator)
        gamma = ctx.model.element_relation([(t.base, t.conj, int(c * D)) for t, c in diff.terms])
        return ctx.model.is_torsion(gamma)
    prec = prec or ctx.prec
    primes = ctx.support_primes(diff)
    with mp.workprec(prec):
        tol = tolerance(prec)
    return all(abs(x) <= tol for x in place_vector(ctx, diff, primes, prec))


def _numeric_zero_standalone(f, g, prec):
    from .placefn import place_function

    prec = prec or default_prec()
    a, b = place_function(f, prec), place_function(g, prec)
    with mp.workprec(prec):
        tol = tolerance(prec)
        if {x.block for x in a.atoms} != {x.block for x in b.atoms}:
            return False
        for x, y in zip(sorted(a.atoms, key=lambda t: (str(t.block), float(t.numeric()))),
                        sorted(b.atoms, key=lambda t: (str(t.block), float(t.numeric())))):
            if x.measure != y.measure or abs(x.numeric() - y.numeric()) > tol:
                return False
    return True


# -- M-factorization ----------------------------------------------------------

@dataclass
class DecompositionResult:
    input: AlgClass
    by_field: Dict[str, AlgClass]
    by_degree: Dict[int, AlgClass]
    joint: Dict[Tuple[str, int], AlgClass]
    ctx: Optional[GaloisContext] = None
    relative_to_family: bool = False
    residuals: Dict[str, object] = field(default_factory=dict)

    def _class_json(self, f: AlgClass):
        if f.ctx is not None:
            return {"terms": f.ctx.class_to_json(f), "text": simplify_text(f)}
        return {"terms": [{"coeff": str(c), "minpoly": list(g.minpoly.coeffs), "root_index": g.root_index}
                          for g, c in f.terms], "text": simplify_text(f)}

    def to_dict(self) -> dict:
        out = {
            "input": self._class_json(self.input),
            "by_field": {k: self._class_json(v) for k, v in sorted(self.by_field.items())},
            "by_degree": {str(n): self._class_json(v) for n, v in sorted(self.by_degree.items())},
            "joint": [{"field": k, "degree": n, "class": self._class_json(v)}
                      for (k, n), v in sorted(self.joint.items(), key=lambda t: (t[0][1], t[0][0]))],
            "relative_to_family": self.relative_to_family,
        }
        if self.residuals:
            out["residuals"] = {k: mpmath.nstr(v, 10) for k, v in sorted(self.residuals.items())}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def components(self):
        return list(self.joint.items())


def _standalone_factorization(f: AlgClass) -> DecompositionResult:
    n = _standalone_degree(f)
    label = "Q" if n == 1 else "Q(f)"
    return DecompositionResult(f, {label: f}, {n: f}, {(label, n): f})


def m_factorization(ctx: Optional[GaloisContext], f: AlgClass, verify: bool = False) -> DecompositionResult:
    """Joint components T_K T^(n) f keyed by (field label, degree)."""
    if ctx is None and f.ctx is None:
        return _standalone_factorization(f)
    ctx = _ctx_of(ctx, f)
    f = _lift(ctx, f)
    by_field = {}
    for K in ctx.galois_subfields():
        c = project_TK(ctx, K, f)
        if not c.is_zero():
            by_field[K.label] = c
    by_degree = degree_components(ctx, f)
    joint = {}
    if ctx.abelian:
        for K in ctx.subfields:
            if K.label in by_field:
                joint[(K.label, K.degree)] = by_field[K.label]
    else:
        for n, comp in by_degree.items():
            for K in ctx.galois_subfields():
                c = project_TK(ctx, K, comp)
                if not c.is_zero():
                    joint[(K.label, n)] = c
    res = DecompositionResult(f, by_field, by_degree, joint, ctx,
                              relative_to_family=not ctx.abelian and any(
                                  s.degree not in (1, ctx.degree) for s in ctx.subfields))
    if verify:
        res.residuals = decomposition_residuals(res)
    return res


def decomposition_residuals(res: DecompositionResult) -> Dict[str, object]:
    """Largest |<a, b>| over distinct components, per grouping."""
    out = {}
    ctx = res.ctx
    for name, comps in (("by_field", list(res.by_field.values())),
                        ("by_degree", list(res.by_degree.values())),
                        ("joint", list(res.joint.values()))):
        worst = mpmath.mpf(0)
        for i in range(len(comps)):
            for j in range(i):
                worst = max(worst, abs(inner_product(comps[i], comps[j], ctx)))
        out[name] = worst
    return out
