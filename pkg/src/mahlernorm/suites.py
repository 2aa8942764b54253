"""Reproduction and property suites run by ``mahlernorm verify``.

Every check records a name, a pass flag, the residual it was judged on and
a short detail string; a suite passes when all of its checks do.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .algclass import AlgClass
from .classify import fast_path_delta, invariants, is_unit, minimal_field
from .corpus import CorpusEntry, builtin_corpus
from .decomp import (classes_equal, degree_components, m_operator, mahler_norm, project_PK, project_TK,
                     simplify_text)
from .errors import MahlerError
from .galoisctx import GaloisContext, build_cubic_closure, shipped_context
from .intpoly import IntPoly, is_cyclotomic
from .numroots import default_prec, isolate_roots, log_mahler_measure, symmetric_log_house, tolerance
from .placefn import h_p, inner_product, integral, lp_norm, place_function

MQ_CONTEXTS = ("quad2.json", "multiquadratic-23.json", "multiquadratic-25.json")
LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"


@dataclass
class Check:
    name: str
    passed: bool
    residual: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        res = None
        if self.residual is not None:
            res = mpmath.nstr(self.residual, 6) if not isinstance(self.residual, (int, str)) else self.residual
        return {"name": self.name, "passed": bool(self.passed), "residual": res, "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "n_checks": len(self.checks),
                "checks": [c.to_dict() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- shared helpers -------------------------------------------------------------

@lru_cache(maxsize=None)
def _shipped(name: str, prec: int) -> GaloisContext:
    return shipped_context(name, prec)


def multiquadratic_contexts(prec: Optional[int] = None) -> List[GaloisContext]:
    prec = prec or default_prec()
    return [_shipped(name, prec) for name in MQ_CONTEXTS]


def context_for(F: IntPoly, prec: Optional[int] = None) -> Optional[Tuple[GaloisContext, AlgClass]]:
    """The first shipped multiquadratic context resolving a root of F."""
    for ctx in multiquadratic_contexts(prec):
        if ctx.degree % F.degree:
            continue
        try:
            return ctx, ctx.resolve(F, 0)
        except MahlerError:
            continue
    return None


def _entries(corpus: Optional[Sequence[CorpusEntry]]) -> List[CorpusEntry]:
    entries = builtin_corpus() if corpus is None else list(corpus)
    return [e for e in entries if e.ok and is_cyclotomic(e.poly) is None]


def _mahler_norm_or_none(F: IntPoly, p, prec: int):
    """||f_alpha||_{m,p} when it is computable: fast path or a shipped context."""
    f = AlgClass.of(F)
    if fast_path_delta(F) is not None:
        return mahler_norm(f, p, None, prec)
    found = context_for(F, prec)
    if found is None:
        return None
    ctx, g = found
    return mahler_norm(g, p, ctx, prec)


# -- worked examples --------------------------------------------------------------

def example_field_decomposition(prec: Optional[int] = None) -> List[Check]:
    """M-factorization of 2 + sqrt(2) in Q(sqrt(2))."""
    prec = prec or 128
    ctx = _shipped("quad2.json", prec)
    f = ctx.element("2+sqrt(2)")
    low = project_TK(ctx, "Q", f)
    high = project_TK(ctx, "Q(sqrt(2))", f)
    want_low, want_high = ctx.element("sqrt(2)"), ctx.element("1+sqrt(2)")
    checks = [
        Check("T_Q f_{2+sqrt2} = f_sqrt2", classes_equal(low, want_low), 0,
              simplify_text(low)),
        Check("T_Q(sqrt2) f_{2+sqrt2} = f_{1+sqrt2}", classes_equal(high, want_high), 0,
              simplify_text(high)),
    ]
    ip = abs(inner_product(want_low, want_high, ctx, prec))
    checks.append(Check("<f_sqrt2, f_{1+sqrt2}> = 0", ip < mpmath.mpf("1e-30"), ip))
    resolved = ctx.resolve(IntPoly.parse("x^2-4x+2"), 0)
    checks.append(Check("resolved root agrees with the parsed element",
                        classes_equal(resolved, f) or classes_equal(ctx.act(1, resolved), f), 0))
    return checks


def example_noncommuting(prec: Optional[int] = None) -> List[Check]:
    """Field projections in the S3 closure of x^3 - x - 1 do not commute."""
    prec = prec or 128
    ctx = build_cubic_closure(IntPoly.parse("x^3-x-1"), prec)
    fa, fb = ctx.root_class(0), ctx.root_class(1)
    Ka, Kb = minimal_field(ctx, fa), minimal_field(ctx, fb)
    half = Fraction(-1, 2)
    pa = project_PK(ctx, Kb, fa)
    pb = project_PK(ctx, Ka, fb)
    ab = project_PK(ctx, Ka, pa)
    ba = project_PK(ctx, Kb, project_PK(ctx, Ka, fa))
    return [
        Check("P_Q(beta) f_alpha = -1/2 f_beta", pa == ctx.canonical(fb * half), 0, ctx.describe(pa)),
        Check("P_Q(alpha) f_beta = -1/2 f_alpha", pb == ctx.canonical(fa * half), 0, ctx.describe(pb)),
        Check("P_Q(alpha) P_Q(beta) != P_Q(beta) P_Q(alpha) on f_alpha", ab != ba and not classes_equal(ab, ba),
              0, "%s vs %s" % (ctx.describe(ab), ctx.describe(ba))),
    ]


def salem_closed_form(poly: str = LEHMER, prec: Optional[int] = None) -> List[Check]:
    prec = prec or 128
    F = IntPoly.parse(poly)
    f = AlgClass.of(F)
    dlt = invariants(F, prec).delta
    checks = []
    with mp.workprec(prec):
        tau = max(abs(r.approx) for r in isolate_roots(F, prec=prec))
        for p in (1, 2, "inf"):
            got = mahler_norm(f, p, None, prec)
            if p == "inf":
                want = dlt * mpmath.log(tau)
            else:
                want = mpmath.mpf(dlt) ** (1 - mpmath.mpf(1) / p) * mpmath.mpf(2) ** (mpmath.mpf(1) / p) * mpmath.log(tau)
            err = abs(got - want)
            checks.append(Check("||f_tau||_{m,%s} closed form" % p, err < mpmath.mpf("1e-25"), err))
        got1 = mahler_norm(f, 1, None, prec)
        err = abs(got1 - 2 * log_mahler_measure(F, prec))
        checks.append(Check("||f_tau||_{m,1} = 2 m(tau)", err < mpmath.mpf("1e-25"), err))
    return checks


def height_footnote(prec: Optional[int] = None) -> List[Check]:
    """h_inf(3/2) is log 3, while the symmetric log house is log(3/2)."""
    prec = prec or 128
    F = IntPoly.parse("2x-3")
    with mp.workprec(prec):
        e1 = abs(h_p(F, "inf", prec) - mpmath.log(3))
        e2 = abs(symmetric_log_house(F, prec) - mpmath.log(mpmath.mpf(3) / 2))
    return [Check("h_inf(3/2) = log 3", e1 < mpmath.mpf("1e-30"), e1),
            Check("symmetric log house of 3/2 = log(3/2)", e2 < mpmath.mpf("1e-30"), e2)]


def worked_examples(prec: Optional[int] = None) -> SuiteResult:
    res = SuiteResult("paper-examples")
    for part in (example_field_decomposition, example_noncommuting, salem_closed_form, height_footnote):
        res.checks.extend(part(prec=prec))
    return res


# -- corpus suites ----------------------------------------------------------------

def product_formula(corpus: Optional[Sequence[CorpusEntry]] = None, prec: Optional[int] = None) -> SuiteResult:
    prec = prec or default_prec()
    res = SuiteResult("product-formula")
    for e in _entries(corpus):
        try:
            val = abs(integral(place_function(e.poly, prec)))
        except MahlerError as exc:
            res.checks.append(Check(e.name, False, None, str(exc)))
            continue
        res.checks.append(Check(e.name, val < mpmath.mpf("1e-25"), val))
    return res


def non_unit_bound(corpus=None, prec: Optional[int] = None) -> List[Check]:
    """d(f) h_q(f) >= log 2 for non-units, judged on certified lower bounds."""
    prec = prec or default_prec()
    out = []
    for e in _entries(corpus):
        F = e.poly
        if is_unit(F):
            continue
        dd = invariants(F, prec).d
        pf = place_function(F, prec)
        with mp.workprec(prec + 16):
            log2 = mpmath.log(2)
            slack = tolerance(prec)
            worst = None
            for q in (1, 2, "inf"):
                lower = dd * (lp_norm(pf, q) - pf.error)
                gap = lower - log2
                worst = gap if worst is None else min(worst, gap)
            out.append(Check("%s: d*h_q >= log 2" % e.name, worst >= -slack, worst))
    return out


P_LADDER = (1, 1.5, 2, 3, "inf")


def unit_monotonicity(corpus=None, prec: Optional[int] = None) -> List[Check]:
    prec = prec or default_prec()
    out = []
    eps = mpmath.mpf("1e-25")
    for e in _entries(corpus):
        F = e.poly
        if not is_unit(F):
            continue
        pf = place_function(F, prec)
        hs = [lp_norm(pf, p) for p in P_LADDER]
        ok = all(hs[i] - hs[j] <= eps for i in range(len(hs)) for j in range(i, len(hs)))
        out.append(Check("%s: h_p increasing in p" % e.name, ok, min(hs[j] - hs[i] for i in range(len(hs))
                                                                         for j in range(i, len(hs)))))
        ms = [_mahler_norm_or_none(F, p, prec) for p in P_LADDER]
        if ms[0] is not None:
            ok = all(ms[i] - ms[j] <= eps for i in range(len(ms)) for j in range(i, len(ms)))
            out.append(Check("%s: ||f||_{m,p} increasing in p" % e.name, ok,
                             min(ms[j] - ms[i] for i in range(len(ms)) for j in range(i, len(ms)))))
    return out


def parseval(corpus=None, prec: Optional[int] = None) -> List[Check]:
    """||f||_{m,2}^2 = sum n^2 ||T^(n) f||_2^2 for entries resolved in a multiquadratic context."""
    prec = prec or default_prec()
    out = []
    for e in _entries(corpus):
        found = context_for(e.poly, prec)
        if found is None:
            continue
        ctx, f = found
        with mp.workprec(prec + 16):
            lhs = h_p(m_operator(ctx, f), 2, prec) ** 2
            rhs = mpmath.fsum(n * n * h_p(c, 2, prec) ** 2 for n, c in degree_components(ctx, f).items())
            err = abs(lhs - rhs)
        out.append(Check("%s: Parseval" % e.name, err < mpmath.mpf("1e-20"), err))
    return out


def inequality_chain(corpus=None, prec: Optional[int] = None) -> List[Check]:
    """||f||_{m,2} <= delta h_2 <= m_2 wherever the Mahler norm is computable."""
    prec = prec or default_prec()
    out = []
    eps = mpmath.mpf("1e-25")
    for e in _entries(corpus):
        F = e.poly
        inv = invariants(F, prec)
        h2 = h_p(F, 2, prec)
        norm = _mahler_norm_or_none(F, 2, prec)
        with mp.workprec(prec + 16):
            m2 = inv.d * h2
            mid = inv.delta * h2
            ok = mid - m2 <= eps
            if norm is not None:
                ok = ok and norm - mid <= eps
            slack = (mid - norm) if norm is not None else m2 - mid
        out.append(Check("%s: ||f||_{m,2} <= delta h_2 <= m_2" % e.name, ok, slack,
                         "" if norm is not None else "Mahler norm not computable; checked delta h_2 <= m_2"))
    return out


def norm_inequalities(corpus=None, prec: Optional[int] = None) -> SuiteResult:
    res = SuiteResult("norm-inequalities")
    for part in (non_unit_bound, unit_monotonicity, parseval, inequality_chain):
        res.checks.extend(part(corpus, prec))
    return res


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "paper-examples": lambda corpus=None, prec=None: worked_examples(prec),
    "norm-inequalities": norm_inequalities,
    "product-formula": product_formula,
}


def run_suite(name: str, corpus=None, prec: Optional[int] = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](corpus=corpus, prec=prec)
