"""Rational combinations of generator classes f_alpha.

A generator is either standalone (a minimal polynomial plus an optional
index into its certified roots) or resolved in a Galois context (an exact
base element plus a group index j, standing for f of g_j(base)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, Optional, Tuple

from .intpoly import IntPoly


@dataclass(frozen=True)
class Generator:
    minpoly: IntPoly
    root_index: Optional[int] = None
    base: Hashable = None
    conj: int = 0

    @property
    def resolved(self) -> bool:
        return self.base is not None

    def sort_key(self):
        return (repr(self.base), self.conj, self.minpoly.coeffs, -1 if self.root_index is None else self.root_index)


class AlgClass:
    """An element of the Q-span of the f_alpha, with exact coefficients."""

    __slots__ = ("terms", "ctx")

    def __init__(self, terms: Iterable[Tuple[Generator, Any]] = (), ctx=None):
        acc: Dict[Generator, Fraction] = {}
        for gen, c in terms:
            c = Fraction(c)
            if c:
                acc[gen] = acc.get(gen, Fraction(0)) + c
        items = [(g, c) for g, c in acc.items() if c]
        items.sort(key=lambda t: t[0].sort_key())
        self.terms: Tuple[Tuple[Generator, Fraction], ...] = tuple(items)
        self.ctx = ctx

    @classmethod
    def of(cls, minpoly: IntPoly, root_index: Optional[int] = None, coeff=1) -> "AlgClass":
        """Standalone class coeff * f_alpha, alpha a root of minpoly."""
        return cls([(Generator(minpoly.primitive(), root_index), coeff)])

    # -- vector space structure -----------------------------------------
    def _check(self, other: "AlgClass"):
        if self.ctx is not None and other.ctx is not None and self.ctx is not other.ctx:
            raise ValueError("classes live in different contexts")
        return self.ctx if self.ctx is not None else other.ctx

    def __add__(self, other: "AlgClass") -> "AlgClass":
        ctx = self._check(other)
        return AlgClass(self.terms + other.terms, ctx)

    def __neg__(self) -> "AlgClass":
        return AlgClass([(g, -c) for g, c in self.terms], self.ctx)

    def __sub__(self, other: "AlgClass") -> "AlgClass":
        return self + (-other)

    def __mul__(self, q) -> "AlgClass":
        q = Fraction(q)
        return AlgClass([(g, c * q) for g, c in self.terms], self.ctx)

    __rmul__ = __mul__

    def __truediv__(self, q) -> "AlgClass":
        return self * (1 / Fraction(q))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgClass):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    @property
    def generators(self):
        return [g for g, _ in self.terms]

    def single(self) -> Optional[Tuple[Generator, Fraction]]:
        """The (generator, coefficient) pair when there is exactly one term."""
        if len(self.terms) == 1:
            return self.terms[0]
        return None

    def __repr__(self):
        if not self.terms:
            return "AlgClass(0)"
        parts = []
        for g, c in self.terms:
            name = g.base if g.base is not None else g.minpoly
            parts.append("%s*f[%s#%s]" % (c, name, g.conj if g.resolved else g.root_index))
        return "AlgClass(" + " + ".join(parts) + ")"
