"""Polynomial corpora: CSV or JSON files of named integer polynomials.

CSV rows read ``name,coeff0,coeff1,...`` with coefficients in ascending
degree; blank lines and lines starting with ``#`` are skipped.  The JSON
form is a list of objects ``{"name", "coeffs", "tags"}``.  Entries that do
not give an irreducible primitive polynomial are kept but quarantined with
a reason, so a batch run can report them without stopping.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional

from .intpoly import IntPoly, is_cyclotomic, is_irreducible


@dataclass
class CorpusEntry:
    name: str
    coeffs: List[int]
    tags: List[str] = field(default_factory=list)
    quarantine: Optional[str] = None

    @property
    def poly(self) -> IntPoly:
        return IntPoly(self.coeffs)

    @property
    def ok(self) -> bool:
        return self.quarantine is None


def _check(entry: CorpusEntry) -> CorpusEntry:
    if len(entry.coeffs) < 2 or entry.coeffs[-1] == 0:
        entry.quarantine = "not a polynomial of positive degree"
        return entry
    F = IntPoly(entry.coeffs)
    if F.primitive() != F and F.primitive() != -F:
        entry.quarantine = "coefficients are not primitive"
    elif not is_irreducible(F):
        entry.quarantine = "reducible over Q"
    elif is_cyclotomic(F) is not None:
        entry.tags = sorted(set(entry.tags) | {"torsion"})
    return entry


def parse_csv(text: str) -> List[CorpusEntry]:
    out = []
    for row in csv.reader(io.StringIO(text)):
        if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
            continue
        name = row[0].strip()
        try:
            coeffs = [int(c) for c in row[1:] if c.strip()]
        except ValueError:
            out.append(CorpusEntry(name, [], quarantine="non-integer coefficient"))
            continue
        out.append(_check(CorpusEntry(name, coeffs)))
    return out


def parse_json(text: str) -> List[CorpusEntry]:
    data = json.loads(text)
    out = []
    for i, item in enumerate(data):
        name = str(item.get("name", "entry%d" % i))
        try:
            coeffs = [int(c) for c in item["coeffs"]]
        except (KeyError, TypeError, ValueError):
            out.append(CorpusEntry(name, [], quarantine="missing or non-integer coeffs"))
            continue
        out.append(_check(CorpusEntry(name, coeffs, list(item.get("tags", [])))))
    return out


def load_corpus(path) -> List[CorpusEntry]:
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json") or text.lstrip().startswith("["):
        return parse_json(text)
    return parse_csv(text)


def builtin_corpus() -> List[CorpusEntry]:
    """The corpus shipped with the package (60 polynomials, degree <= 12)."""
    text = resources.files("mahlernorm").joinpath("data", "corpus.csv").read_text()
    return parse_csv(text)


def dumps_corpus(entries: List[CorpusEntry]) -> str:
    return json.dumps([{"name": e.name, "coeffs": e.coeffs, "tags": e.tags} for e in entries], sort_keys=True)
