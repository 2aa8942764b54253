"""Galois contexts: a finite Galois field described by permutation data.

The group acts simply transitively on the roots of a generator, and group
element m is stored as the permutation that sends root 0 to root m.
Subfields are recorded by their fixing subgroups, so F is contained in K
exactly when H_K is contained in H_F.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .algclass import AlgClass, Generator
from .ctxmodels import CubicModel, MultiquadraticModel
from .errors import ContextError, NotASubfieldError, PairingUnavailableError
from .intpoly import IntPoly, is_irreducible, prime_factors, resultant
from .numroots import CertifiedRoot, default_prec, isolate_roots

SCHEMA_KEYS = ("degree", "minpoly", "group", "subfields", "prime_splitting")


@dataclass
class SubfieldEntry:
    label: str
    subgroup: FrozenSet[int]
    degree: int
    mobius_to: Dict[str, int] = field(default_factory=dict)


def _closure(gens: Sequence[int], group) -> FrozenSet[int]:
    """Subgroup generated by a set of group indices."""
    elems = {0}
    frontier = list(gens)
    while frontier:
        g = frontier.pop()
        if g in elems:
            continue
        elems.add(g)
        new = set()
        for h in list(elems):
            new.add(group[g][h])
            new.add(group[h][g])
        frontier.extend(x for x in new if x not in elems)
    return frozenset(elems)


def all_subgroups(group) -> List[FrozenSet[int]]:
    n = len(group)
    found = {frozenset([0])}
    layer = [frozenset([0])]
    while layer:
        nxt = []
        for H in layer:
            for g in range(n):
                if g not in H:
                    K = _closure(list(H) + [g], group)
                    if K not in found:
                        found.add(K)
                        nxt.append(K)
        layer = nxt
    return sorted(found, key=lambda H: (-len(H), sorted(H)))


class GaloisContext:
    def __init__(self, minpoly: IntPoly, group: Sequence[Sequence[int]], subfields: Sequence[SubfieldEntry],
                 model=None, prime_splitting: Optional[dict] = None, prec: Optional[int] = None,
                 embeddings: Optional[List[CertifiedRoot]] = None):
        self.minpoly = minpoly
        self.group = [tuple(g) for g in group]
        self.degree = len(self.group)
        self.subfields = list(subfields)
        self.model = model
        self.prec = prec or default_prec()
        self.prime_splitting = dict(prime_splitting or {})
        self._by_label = {s.label: s for s in self.subfields}
        self._by_group = {s.subgroup: s for s in self.subfields}
        self.abelian = all(self.group[a][b] == self.group[b][a]
                           for a in range(self.degree) for b in range(self.degree))
        self._embeddings = embeddings
        self._inverse = [next(b for b in range(self.degree) if self.group[a][b] == 0) for a in range(self.degree)]

    # -- group -----------------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        """Index of g_a g_b."""
        return self.group[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    @property
    def embeddings(self) -> List[CertifiedRoot]:
        if self._embeddings is None:
            self._embeddings = _match_embeddings(self)
        return self._embeddings

    # -- lattice ---------------------------------------------------------
    def subfield(self, label) -> SubfieldEntry:
        if isinstance(label, SubfieldEntry):
            return label
        if label not in self._by_label:
            raise NotASubfieldError("no subfield %r in this context" % (label,))
        return self._by_label[label]

    @property
    def bottom(self) -> SubfieldEntry:
        return self._by_group[frozenset(range(self.degree))]

    @property
    def top(self) -> SubfieldEntry:
        return self._by_group[frozenset([0])]

    def contains(self, F, K) -> bool:
        """F is a subfield of K."""
        return self.subfield(K).subgroup <= self.subfield(F).subgroup

    def is_galois(self, K) -> bool:
        H = self.subfield(K).subgroup
        for g in range(self.degree):
            gi = self.inv(g)
            for h in H:
                if self.mul(self.mul(g, h), gi) not in H:
                    return False
        return True

    def meet(self, F, K) -> SubfieldEntry:
        H = _closure(list(self.subfield(F).subgroup | self.subfield(K).subgroup), self.group)
        return self._by_group[H]

    def join(self, F, K) -> SubfieldEntry:
        return self._by_group[self.subfield(F).subgroup & self.subfield(K).subgroup]

    def galois_subfields(self) -> List[SubfieldEntry]:
        return [s for s in self.subfields if self.is_galois(s)]

    def subfield_of_group(self, H) -> SubfieldEntry:
        return self._by_group[frozenset(H)]

    # -- classes ---------------------------------------------------------
    def element(self, text: str) -> AlgClass:
        """Class f_beta for an element written in the model's syntax."""
        if not isinstance(self.model, MultiquadraticModel):
            raise PairingUnavailableError("this context has no element parser")
        beta = self.model.field.parse(text)
        if not any(beta):
            raise ValueError("zero is not an algebraic number class")
        return self.base_class(beta)

    def base_class(self, beta, coeff=1) -> AlgClass:
        base, j = self.model.canonical_base(beta)
        return self.canonical(AlgClass([(self._gen(base, j), coeff)], self))

    def root_class(self, i: int) -> AlgClass:
        """f of the i-th root of a cubic context's defining polynomial."""
        base, j = self.model.root_class(i)
        return self.canonical(AlgClass([(self._gen(base, j), 1)], self))

    def resolve(self, F: IntPoly, root_index: int = 0) -> AlgClass:
        if self.model is None:
            raise PairingUnavailableError("context has no element model; cannot resolve %s" % F)
        got = self.model.resolve(F, root_index, self.prec)
        if got is None:
            raise PairingUnavailableError("%s has no root of index %d in this context" % (F.primitive(), root_index))
        base, j = got
        return self.canonical(AlgClass([(self._gen(base, j), 1)], self))

    def _gen(self, base, j) -> Generator:
        return Generator(self.model.minpoly(base), None, base, j)

    def canonical(self, f: AlgClass) -> AlgClass:
        """Collapse conjugates equal modulo torsion and apply unit norm relations."""
        by_base: Dict[object, Dict[int, Fraction]] = {}
        for g, c in f.terms:
            if not g.resolved:
                raise PairingUnavailableError("generator %s is not resolved in this context" % g.minpoly)
            vec = by_base.setdefault(g.base, {})
            vec[g.conj] = vec.get(g.conj, Fraction(0)) + c
        terms = []
        for base, vec in by_base.items():
            H = self.model.fstab(base)
            rep = {}
            for j in range(self.degree):
                rep[j] = min(self.group[j][h] for h in H)
            coll: Dict[int, Fraction] = {}
            for j, c in vec.items():
                coll[rep[j]] = coll.get(rep[j], Fraction(0)) + c
            reps = sorted(set(rep.values()))
            if self.model.is_unit(base):
                # the conjugates over the coset representatives sum to the
                # class of a norm, which is zero; use it to clear the last one
                last = coll.get(reps[-1], Fraction(0))
                coll = {j: coll.get(j, Fraction(0)) - last for j in reps}
            gen_mp = self.model.minpoly(base)
            for j, c in coll.items():
                if c:
                    terms.append((Generator(gen_mp, None, base, j), c))
        return AlgClass(terms, self)

    def act(self, sigma: int, f: AlgClass) -> AlgClass:
        """L_sigma on a resolved class: f_{g_j beta} -> f_{sigma g_j beta}."""
        return self.canonical(AlgClass([(Generator(g.minpoly, None, g.base, self.group[sigma][g.conj]), c)
                                        for g, c in f.terms], self))

    # -- place vectors ---------------------------------------------------
    def support_primes(self, f: AlgClass) -> List[int]:
        ps = set()
        for g, _ in f.terms:
            ps.update(self.model.primes(g.base))
        return sorted(ps)

    def arch_vector(self, f: AlgClass, prec: Optional[int] = None):
        """log|tau_0(g_m .)| of the class, one entry per group index m."""
        prec = prec or self.prec
        with mp.workprec(prec + 16):
            out = [mpmath.mpf(0)] * self.degree
            for g, c in f.terms:
                logs = self.model.arch_logs(g.base, prec)
                cc = mpmath.mpf(c.numerator) / c.denominator
                row = self.group
                for m in range(self.degree):
                    out[m] += cc * logs[row[m][g.conj]]
        return out

    def finite_vector(self, f: AlgClass, p: int) -> List[Fraction]:
        """Coefficient q_m with f = q_m log p at the p-adic embedding m."""
        out = [Fraction(0)] * self.degree
        for g, c in f.terms:
            if p not in self.model.primes(g.base):
                continue
            vals = self.model.valuations(g.base, p)
            for m in range(self.degree):
                out[m] -= c * vals[self.group[m][g.conj]]
        return out

    # -- class text -------------------------------------------------------
    def base_to_json(self, base) -> str:
        if isinstance(self.model, MultiquadraticModel):
            return self.model.field.format(base)
        return "root0" if base[0] == "root" else str(base[1])

    def base_from_json(self, text: str):
        if isinstance(self.model, MultiquadraticModel):
            return self.model.field.parse(text)
        return ("root", 0) if text == "root0" else ("rat", str(Fraction(text)))

    def class_to_json(self, f: AlgClass) -> list:
        return [{"coeff": str(c), "base": self.base_to_json(g.base), "conj": g.conj} for g, c in f.terms]

    def class_from_json(self, data) -> AlgClass:
        terms = []
        for t in data:
            base = self.base_from_json(t["base"])
            terms.append((self._gen(base, int(t["conj"])), Fraction(t["coeff"])))
        return self.canonical(AlgClass(terms, self))

    def describe(self, f: AlgClass) -> str:
        """Readable form such as '1/2*f[2 + sqrt(2)] - f[sqrt(2)]'."""
        if f.is_zero():
            return "0"
        out = ""
        for g, c in f.terms:
            name = "f[%s]" % self.model.format_conj(g.base, g.conj)
            mag = abs(c)
            piece = name if mag == 1 else "%s*%s" % (mag, name)
            if not out:
                out = piece if c > 0 else "-" + piece
            else:
                out += (" + " if c > 0 else " - ") + piece
        return out

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "minpoly": list(self.minpoly.coeffs),
            "group": [list(g) for g in self.group],
            "subfields": [{"label": s.label, "subgroup": sorted(s.subgroup),
                           "mobius": {k: s.mobius_to[k] for k in sorted(s.mobius_to)}} for s in self.subfields],
            "prime_splitting": {str(p): self.prime_splitting[p] for p in sorted(self.prime_splitting)},
            "abelian": self.abelian,
            "model": self.model.to_json() if self.model is not None else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())


def _match_embeddings(ctx: GaloisContext) -> List[CertifiedRoot]:
    """Certified roots of the generator polynomial, ordered by group index."""
    roots = isolate_roots(ctx.minpoly, prec=ctx.prec)
    if ctx.model is None:
        return roots
    vals = ctx.model.generator_values(ctx.prec)
    out = []
    with mp.workprec(ctx.prec):
        for v in vals:
            best = min(roots, key=lambda r: abs(r.approx - v))
            if abs(best.approx - v) > best.radius + mpmath.ldexp(1, -ctx.prec // 3):
                raise ContextError("embedding values do not match certified roots")
            out.append(best)
    return out


# -- Moebius function ------------------------------------------------------

def _mobius_table(ctx: GaloisContext, entries: Sequence[SubfieldEntry]) -> Dict[Tuple[str, str], int]:
    """mu(F, K) over the given sublattice by the defining recursion."""
    table: Dict[Tuple[str, str], int] = {}
    order = sorted(entries, key=lambda s: s.degree)
    for F in order:
        above = [K for K in order if K.subgroup <= F.subgroup]
        for K in sorted(above, key=lambda s: s.degree):
            if K.label == F.label:
                table[(F.label, K.label)] = 1
                continue
            total = 0
            for L in above:
                if L.label != K.label and K.subgroup <= L.subgroup and L.subgroup <= F.subgroup:
                    total += table[(F.label, L.label)]
            table[(F.label, K.label)] = -total
    return table


def mobius(ctx: GaloisContext, F, K, galois_only: bool = False) -> int:
    """Moebius value mu(F, K) on the subfield lattice (or its Galois part)."""
    F, K = ctx.subfield(F), ctx.subfield(K)
    if not ctx.contains(F, K):
        raise NotASubfieldError("%s is not contained in %s" % (F.label, K.label))
    if not galois_only:
        return F.mobius_to[K.label]
    if not (ctx.is_galois(F) and ctx.is_galois(K)):
        raise NotASubfieldError("Galois-sublattice Moebius value needs Galois fields")
    key = "_galois_mobius"
    table = getattr(ctx, key, None)
    if table is None:
        table = _mobius_table(ctx, ctx.galois_subfields())
        setattr(ctx, key, table)
    return table[(F.label, K.label)]


def _fill_mobius(ctx: GaloisContext) -> None:
    table = _mobius_table(ctx, ctx.subfields)
    for (F, K), v in table.items():
        ctx.subfield(F).mobius_to[K] = v


def apply_galois(ctx: GaloisContext, sigma: int, f: AlgClass) -> AlgClass:
    if not 0 <= sigma < ctx.degree:
        raise ValueError("group index %d out of range" % sigma)
    return ctx.act(sigma, f)


# -- builders --------------------------------------------------------------

def _mq_label(field, H: FrozenSet[int], n: int) -> str:
    perp = [S for S in range(n) if all(bin(S & m).count("1") % 2 == 0 for m in H)]
    basis: List[int] = []
    span = {0}
    for S in sorted(perp, key=lambda S: (bin(S).count("1"), S)):
        if S not in span:
            basis.append(S)
            span |= {x ^ S for x in span}
    if not basis:
        return "Q"
    return "Q(" + ",".join("sqrt(%d)" % field.dprod(S) for S in basis) + ")"


def default_primes(ds: Sequence[int]) -> List[int]:
    prod = 2
    for d in ds:
        prod *= d
    return sorted(set(prime_factors(prod)))


def build_multiquadratic(ds: Sequence[int], primes: Optional[Sequence[int]] = None,
                         prec: Optional[int] = None) -> GaloisContext:
    model = MultiquadraticModel(ds)
    n = model.n
    subs = []
    for H in all_subgroups(model.group):
        subs.append(SubfieldEntry(_mq_label(model.field, H, n), H, n // len(H)))
    theta = model.generator()
    minpoly = model.field.minpoly(theta)
    primes = default_primes(ds) if primes is None else list(primes)
    splitting = {p: model.splitting(p) for p in primes}
    ctx = GaloisContext(minpoly, model.group, subs, model, splitting, prec)
    _fill_mobius(ctx)
    return ctx


def discriminant(F: IntPoly) -> int:
    """disc(F) = (-1)^(n(n-1)/2) Res(F, F') / lc(F)."""
    n = F.degree
    r = resultant(F, F.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r // F.lc


def _is_square(a: int) -> bool:
    from math import isqrt

    return a >= 0 and isqrt(a) ** 2 == a


def build_cubic_closure(F: IntPoly, prec: Optional[int] = None) -> GaloisContext:
    F = F.primitive()
    if F.degree != 3:
        raise ValueError("cubic closure needs a degree 3 polynomial, got degree %d" % F.degree)
    if not is_irreducible(F):
        from .errors import ReducibleError

        raise ReducibleError("%s is reducible" % F)
    disc = discriminant(F)
    prec = prec or default_prec()
    model = CubicModel(F, _is_square(disc), prec)
    n = model.n
    subs = []
    for H in all_subgroups(model.group):
        deg = n // len(H)
        if deg == 1:
            label = "Q"
        elif deg == n:
            label = "top"
        elif model.cyclic:
            label = "top"
        elif deg == 2:
            label = "Q(sqrt(%d))" % _squarefree_part(disc)
        else:
            # a cubic subfield is fixed by one transposition of the roots
            t = next(model.perms[h] for h in H if h != 0)
            moved = [i for i in range(3) if t[i] != i]
            label = "fix(%d,%d)" % tuple(moved)
        subs.append(SubfieldEntry(label, H, deg))
    ctx = GaloisContext(model.generator_minpoly(prec), model.group, subs, model, {}, prec)
    ctx.discriminant = disc
    _fill_mobius(ctx)
    return ctx


def _squarefree_part(a: int) -> int:
    sign = -1 if a < 0 else 1
    a = abs(a)
    out = 1
    for p in prime_factors(a):
        e = 0
        while a % p == 0:
            a //= p
            e += 1
        if e % 2:
            out *= p
    return sign * out


# -- loading and validation -------------------------------------------------

def validate(data: dict) -> List[str]:
    """Every violated invariant of a context dictionary."""
    errs: List[str] = []
    for k in SCHEMA_KEYS:
        if k not in data:
            errs.append("missing key %r" % k)
    if errs:
        return errs
    n = data["degree"]
    group = data["group"]
    if not isinstance(n, int) or n < 1 or n > 24:
        errs.append("degree must be an integer in 1..24")
        return errs
    if len(group) != n:
        errs.append("group has %d elements, degree is %d" % (len(group), n))
    perms = []
    for i, g in enumerate(group):
        if sorted(g) != list(range(n)):
            errs.append("group element %d is not a permutation of 0..%d" % (i, n - 1))
        else:
            perms.append(tuple(g))
    if len(perms) != len(group):
        return errs
    if len(set(perms)) != len(perms):
        errs.append("group contains repeated permutations")
    if tuple(range(n)) not in perms:
        errs.append("group lacks the identity")
    if sorted(p[0] for p in perms) != list(range(n)):
        errs.append("group action on roots is not simply transitive")
    elif any(p[0] != i for i, p in enumerate(perms)):
        errs.append("group element %d does not send root 0 to root %d" %
                    next((i, i) for i, p in enumerate(perms) if p[0] != i))
    pset = set(perms)
    for a in range(len(perms)):
        for b in range(len(perms)):
            comp = tuple(perms[a][perms[b][i]] for i in range(n))
            if comp not in pset:
                errs.append("group not closed: element %d composed with element %d is missing" % (a, b))
    mp_ = data["minpoly"]
    if not isinstance(mp_, list) or len(mp_) - 1 != n:
        errs.append("minpoly must have degree %d" % n)
    subs = data["subfields"]
    groups = {}
    for s in subs:
        lab = s.get("label")
        H = s.get("subgroup", [])
        if not H or 0 not in H or any(not (0 <= h < n) for h in H):
            errs.append("subfield %s: subgroup must contain the identity and valid indices" % lab)
            continue
        Hs = set(H)
        ok = all(perms[a][b] in Hs for a in H for b in H) if len(perms) == n and not errs else True
        if not ok:
            errs.append("subfield %s: subgroup is not closed under composition" % lab)
        if n % len(Hs):
            errs.append("subfield %s: subgroup order %d does not divide %d" % (lab, len(Hs), n))
        if "degree" in s and s["degree"] != n // len(Hs):
            errs.append("subfield %s: declared degree %s differs from index %d" % (lab, s["degree"], n // len(Hs)))
        groups[lab] = frozenset(Hs)
    if len(groups) != len(subs):
        errs.append("subfield labels are not unique or some entries are invalid")
    if errs:
        return errs
    gset = set(groups.values())
    labels = sorted(groups)
    for a, b in combinations(labels, 2):
        meet = _closure(list(groups[a] | groups[b]), perms)
        if meet not in gset:
            errs.append("lattice not closed under intersection: %s and %s" % (a, b))
    if frozenset(range(n)) not in gset:
        errs.append("lattice lacks the rational field (full group)")
    if frozenset([0]) not in gset:
        errs.append("lattice lacks the top field (trivial group)")
    if errs:
        return errs
    entries = [SubfieldEntry(lab, groups[lab], n // len(groups[lab])) for lab in labels]
    fake = type("L", (), {})()
    table = _mobius_table(fake, entries)
    for s in subs:
        for K, v in (s.get("mobius") or {}).items():
            want = table.get((s["label"], K))
            if want is None:
                errs.append("subfield %s: Moebius entry for %s but it is not contained in %s" % (s["label"], s["label"], K))
            elif want != v:
                errs.append("subfield %s: Moebius value mu(%s,%s)=%s, recursion gives %d" % (s["label"], s["label"], K, v, want))
    for p, places in (data.get("prime_splitting") or {}).items():
        total = Fraction(0)
        seen = []
        for pl in places:
            total += Fraction(pl["local_degree"], n)
            emb = pl.get("embeddings", [])
            if emb and len(emb) != pl["local_degree"]:
                errs.append("prime %s place %s: %d embeddings but local degree %d" %
                            (p, pl.get("place"), len(emb), pl["local_degree"]))
            seen.extend(emb)
        if total != 1:
            errs.append("prime %s: place measures sum to %s, not 1" % (p, total))
        if seen and sorted(seen) != list(range(n)):
            errs.append("prime %s: embeddings do not partition the group" % p)
    return errs


def context_from_dict(data: dict, prec: Optional[int] = None) -> GaloisContext:
    errs = validate(data)
    if errs:
        raise ContextError("invalid context: " + "; ".join(errs), errs)
    model_data = data.get("model")
    model = None
    if model_data:
        kind = model_data.get("kind")
        if kind == "multiquadratic":
            model = MultiquadraticModel(model_data["d"])
        elif kind == "cubic":
            F = IntPoly(model_data["poly"])
            model = CubicModel(F, _is_square(discriminant(F)), prec or default_prec())
        else:
            raise ContextError("unknown model kind %r" % kind, ["unknown model kind %r" % kind])
        if [list(g) for g in model.group] != data["group"]:
            raise ContextError("group does not match the declared model", ["group does not match the declared model"])
    subs = []
    for s in data["subfields"]:
        H = frozenset(s["subgroup"])
        subs.append(SubfieldEntry(s["label"], H, data["degree"] // len(H)))
    splitting = {int(p): v for p, v in (data.get("prime_splitting") or {}).items()}
    ctx = GaloisContext(IntPoly(data["minpoly"]), data["group"], subs, model, splitting, prec)
    _fill_mobius(ctx)
    if model is not None and model.kind == "cubic":
        ctx.discriminant = discriminant(model.F)
    return ctx


def loads_context(text: str, prec: Optional[int] = None) -> GaloisContext:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContextError("malformed context file: %s" % exc, [str(exc)])
    if not isinstance(data, dict):
        raise ContextError("context file must hold a JSON object", ["top level is not an object"])
    return context_from_dict(data, prec)


def load_context(path, prec: Optional[int] = None) -> GaloisContext:
    with open(path) as fh:
        return loads_context(fh.read(), prec)


def shipped_context(name: str, prec: Optional[int] = None) -> GaloisContext:
    """Load one of the context files bundled with the package."""
    from importlib import resources

    text = resources.files("mahlernorm").joinpath("data", name).read_text()
    return loads_context(text, prec)
