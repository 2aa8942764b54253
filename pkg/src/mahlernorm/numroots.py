"""Certified complex roots and the archimedean classifiers.

Roots are refined by Aberth iteration in mpmath and then certified with
the Weierstrass-correction inclusion: the disks D(z_i, n |W_i|) with
W_i = F(z_i) / (a_n prod_{j != i} (z_i - z_j)) contain all roots, and a
connected component made of k disks holds exactly k roots.  Pairwise
disjoint disks therefore isolate one root each.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Union

import mpmath
from mpmath import mp

from . import _kernels
from .errors import CertificationError
from .intpoly import IntPoly, is_reciprocal

DEFAULT_PREC = 128
MAX_PREC = 4096


def default_prec() -> int:
    env = os.environ.get("MAHLER_PREC")
    return int(env) if env else DEFAULT_PREC


def tolerance(prec: int):
    """The downstream tolerance 2^(-prec/2) attached to a working precision."""
    return mpmath.ldexp(mpmath.mpf(1), -(prec // 2))


@dataclass(frozen=True)
class CertifiedRoot:
    approx: mpmath.mpc
    radius: mpmath.mpf
    # "real" or the index of the complex-conjugate partner
    pairing: Union[str, int]

    @property
    def is_real(self) -> bool:
        return self.pairing == "real"


def _horner_with_bound(coeffs, z):
    """F(z), F'(z) and a bound on the rounding error of F(z)."""
    p = mpmath.mpc(0)
    dp = mpmath.mpc(0)
    absz = abs(z)
    mag = mpmath.mpf(0)
    for a in reversed(coeffs):
        dp = dp * z + p
        p = p * z + a
        mag = mag * absz + abs(a)
    n = len(coeffs)
    err = mag * (4 * n + 4) * mpmath.eps
    return p, dp, err


def _refine(coeffs, zs, prec):
    """Aberth iteration at the current mp precision."""
    n = len(zs)
    target = mpmath.ldexp(mpmath.mpf(1), -int(prec * 0.9))
    for _ in range(200):
        maxstep = mpmath.mpf(0)
        for i in range(n):
            p, dp, _e = _horner_with_bound(coeffs, zs[i])
            if p == 0:
                continue
            s = mpmath.mpc(0)
            for j in range(n):
                if j != i:
                    s += 1 / (zs[i] - zs[j])
            ratio = p / dp
            w = ratio / (1 - ratio * s)
            zs[i] -= w
            aw = abs(w)
            if aw > maxstep:
                maxstep = aw
        if maxstep < target * (1 + max(abs(z) for z in zs)):
            break
    return zs


def _radii(coeffs, zs):
    n = len(zs)
    lead = coeffs[-1]
    out = []
    for i in range(n):
        p, _dp, err = _horner_with_bound(coeffs, zs[i])
        den = mpmath.mpf(abs(lead))
        for j in range(n):
            if j != i:
                den *= abs(zs[i] - zs[j])
        if den == 0:
            return None
        r = n * (abs(p) + err) / den
        out.append(r * (1 + 16 * mpmath.eps))
    return out


def _disjoint(zs, rs) -> bool:
    n = len(zs)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(zs[i] - zs[j]) <= rs[i] + rs[j]:
                return False
    return True


def _pairing(zs, rs):
    """Match each disk with the disk holding its complex conjugate."""
    n = len(zs)
    tags: list = [None] * n
    for i in range(n):
        cz = mpmath.conj(zs[i])
        hits = [j for j in range(n) if abs(cz - zs[j]) <= rs[i] + rs[j]]
        if len(hits) != 1:
            return None
        j = hits[0]
        tags[i] = "real" if j == i else j
    for i, t in enumerate(tags):
        if t != "real" and tags[t] != i:
            return None
    return tags


def _isolate_at(F: IntPoly, prec: int, start=None):
    coeffs = F.coeffs
    n = F.degree
    with mp.workprec(prec):
        mcoeffs = [mpmath.mpf(a) for a in coeffs]
        if start is None:
            desc = [float(a) for a in reversed(coeffs)]
            guesses = _kernels.aberth(desc)
            zs = [mpmath.mpc(complex(g)) for g in guesses]
        else:
            zs = [mpmath.mpc(z) for z in start]
        # break exact coincidences left by the float stage
        for i in range(n):
            for j in range(i):
                if zs[i] == zs[j]:
                    zs[i] += mpmath.mpc(0, 1e-3 * (i + 1))
        zs = _refine(mcoeffs, zs, prec)
        rs = _radii(mcoeffs, zs)
    return zs, rs


@lru_cache(maxsize=4096)
def _isolate_cached(coeffs: tuple, target_radius_exp: int, prec: int, max_prec: int):
    F = IntPoly(coeffs)
    n = F.degree
    if n == 1:
        with mp.workprec(max(prec, 64)):
            z = mpmath.mpf(-coeffs[0]) / coeffs[1]
            return (CertifiedRoot(mpmath.mpc(z), mpmath.mpf(0), "real"),), prec
    target = mpmath.ldexp(mpmath.mpf(1), target_radius_exp)
    start = None
    while prec <= max_prec:
        zs, rs = _isolate_at(F, prec, start)
        if rs is not None and max(rs) <= target and _disjoint(zs, rs):
            with mp.workprec(prec):
                tags = _pairing(zs, rs)
                if tags is not None:
                    roots = []
                    for z, r, t in zip(zs, rs, tags):
                        if t == "real":
                            z = mpmath.mpc(z.real, 0)
                        roots.append(CertifiedRoot(z, r, t))
                    return tuple(roots), prec
        start = zs
        prec *= 2
    raise CertificationError("root isolation of %s failed below %d bits" % (F, max_prec))


def isolate_roots(F: IntPoly, target_radius=None, prec: Optional[int] = None,
                  max_prec: int = MAX_PREC) -> List[CertifiedRoot]:
    """Isolating disks for all roots of a squarefree integer polynomial."""
    if F.degree < 1:
        raise ValueError("need a polynomial of degree >= 1")
    prec = prec or default_prec()
    if target_radius is None:
        exp = -(prec // 2)
    else:
        exp = int(mpmath.floor(mpmath.log(mpmath.mpf(target_radius), 2)))
    roots, _ = _isolate_cached(tuple(F.coeffs), exp, prec, max_prec)
    return list(roots)


def working_prec(F: IntPoly, prec: Optional[int] = None) -> int:
    """Precision at which isolate_roots certified F (may exceed the request)."""
    prec = prec or default_prec()
    if F.degree == 1:
        return prec
    _, used = _isolate_cached(tuple(F.coeffs), -(prec // 2), prec, MAX_PREC)
    return used


def log_house(F: IntPoly, prec: Optional[int] = None):
    roots = isolate_roots(F, prec=prec)
    with mp.workprec(working_prec(F, prec)):
        return max(mpmath.log(abs(r.approx)) for r in roots)


def symmetric_log_house(F: IntPoly, prec: Optional[int] = None):
    """log max(house(alpha), house(1/alpha))."""
    roots = isolate_roots(F, prec=prec)
    with mp.workprec(working_prec(F, prec)):
        return max(abs(mpmath.log(abs(r.approx))) for r in roots)


def log_mahler_measure(F: IntPoly, prec: Optional[int] = None):
    """log|a_n| + sum of log+|root|, straight from the roots."""
    roots = isolate_roots(F, prec=prec)
    with mp.workprec(working_prec(F, prec)):
        acc = mpmath.log(abs(F.lc))
        for r in roots:
            a = abs(r.approx)
            if a > 1:
                acc += mpmath.log(a)
        return acc


def _circle_position(root: CertifiedRoot) -> int:
    """+1 outside, -1 inside, 0 when the disk meets the unit circle."""
    a = abs(root.approx)
    if a - root.radius > 1:
        return 1
    if a + root.radius < 1:
        return -1
    return 0


def classify_pisot_salem(F: IntPoly, prec: Optional[int] = None) -> str:
    """'pisot', 'salem' or 'neither' for an irreducible F."""
    F = F.primitive()
    if F.lc != 1:
        return "neither"
    prec = prec or default_prec()
    reciprocal = is_reciprocal(F)
    while True:
        roots = isolate_roots(F, prec=prec)
        pos = [_circle_position(r) for r in roots]
        outside = [r for r, s in zip(roots, pos) if s == 1]
        inside = sum(1 for s in pos if s == -1)
        unresolved = sum(1 for s in pos if s == 0)
        if len(outside) != 1 or not outside[0].is_real or outside[0].approx.real <= 1:
            if len(outside) > 1 or (len(outside) == 1 and not outside[0].is_real):
                return "neither"
            if len(outside) == 1 and outside[0].approx.real < -1:
                return "neither"
            if unresolved and not reciprocal:
                # no root of a non-reciprocal irreducible lies on |z| = 1
                prec *= 2
                if prec > MAX_PREC:
                    raise CertificationError("cannot place roots of %s relative to the unit circle" % F)
                continue
            return "neither"
        if unresolved == 0:
            return "pisot"
        if reciprocal:
            # unresolved roots of a reciprocal F with exactly one root outside
            # and its inverse inside sit on the circle: Salem if deg >= 4
            if abs(F.coeffs[0]) == 1 and inside == 1 and F.degree >= 4:
                return "salem"
            return "neither"
        prec *= 2
        if prec > MAX_PREC:
            raise CertificationError("cannot place roots of %s relative to the unit circle" % F)
