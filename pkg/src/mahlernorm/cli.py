"""Command-line front end.

    mahlernorm classify "x^2-2"
    mahlernorm classify --corpus builtin --p 1,2,inf --json
    mahlernorm decompose "x^2-4x+2" --context quad2.json --verify
    mahlernorm mfactor "x^4-10x^2+1" --context multiquadratic-23.json
    mahlernorm heights "2x-3"
    mahlernorm verify paper-examples
    mahlernorm scan --degree 6 --bound 1 --top 5

Exit status is 0 on success, 1 when a computation fails (or a verify suite
does not pass) and 2 for usage errors, including unparseable polynomials.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import List, Optional, Sequence

import mpmath

from . import __version__
from .algclass import AlgClass
from .cache import ResultCache, cache_key
from .corpus import CorpusEntry, builtin_corpus, load_corpus
from .errors import MahlerError
from .intpoly import IntPoly, is_cyclotomic, is_irreducible

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITE_NAMES = ("paper-examples", "norm-inequalities", "product-formula")


class UsageError(Exception):
    pass


def _num(v, digits: int = 20) -> str:
    return mpmath.nstr(v, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def parse_p_list(text: str) -> List[object]:
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part in ("inf", "infinity", "oo"):
            out.append("inf")
            continue
        try:
            v = float(part)
        except ValueError:
            raise UsageError("bad exponent %r in --p" % part)
        if v < 1:
            raise UsageError("exponents must be >= 1, got %s" % part)
        out.append(int(v) if v.is_integer() else v)
    if not out:
        raise UsageError("--p needs at least one exponent")
    return out


def parse_input_poly(text: str) -> IntPoly:
    try:
        F = IntPoly.parse(text)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError("cannot parse polynomial %r: %s" % (text, exc))
    if F.degree < 1:
        raise UsageError("%r is not a polynomial of positive degree" % text)
    return F


@lru_cache(maxsize=None)
def load_context_arg(spec: str, prec: int):
    """A context from a file path, or the name of a context shipped with the package."""
    from .galoisctx import load_context, shipped_context

    if os.path.exists(spec):
        return load_context(spec, prec)
    name = spec if spec.endswith(".json") else spec + ".json"
    try:
        return shipped_context(name, prec)
    except FileNotFoundError:
        raise UsageError("no context file %r (and no shipped context of that name)" % spec)


def _context_digest(ctx) -> Optional[str]:
    if ctx is None:
        return None
    return hashlib.sha256(ctx.dumps().encode()).hexdigest()


def _entries_from_args(args) -> List[CorpusEntry]:
    entries: List[CorpusEntry] = []
    if getattr(args, "corpus", None):
        if args.corpus == "builtin":
            entries.extend(builtin_corpus())
        else:
            if not os.path.exists(args.corpus):
                raise UsageError("corpus file %r not found" % args.corpus)
            entries.extend(load_corpus(args.corpus))
    for i, text in enumerate(getattr(args, "poly", None) or []):
        F = parse_input_poly(text)
        entries.append(CorpusEntry(text, list(F.coeffs)))
    if not entries:
        raise UsageError("give a polynomial or --corpus")
    return entries


def _resolve(ctx, F: IntPoly, root: int) -> AlgClass:
    if ctx is None:
        return AlgClass.of(F)
    return ctx.resolve(F, root)


# -- classify ---------------------------------------------------------------------

def _classify_job(job) -> tuple:
    """Run one classification; returns (ok, serialized report or error text)."""
    coeffs, ps, prec, ctx_spec, r_search = job
    from .classify import classify

    try:
        ctx = load_context_arg(ctx_spec, prec) if ctx_spec else None
        rep = classify(IntPoly(coeffs), ctx=ctx, ps=ps, prec=prec, r_search=r_search)
        return True, rep.dumps()
    except MahlerError as exc:
        return False, "%s: %s" % (type(exc).__name__, exc)


def _run_jobs(func, jobs: Sequence, workers: int) -> List[tuple]:
    if workers <= 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps input order, so output is the same as a serial run
        return list(pool.map(func, jobs))


def _classify_row(name: str, rep: dict, ps) -> str:
    flags = rep["flags"]
    marks = [k for k in ("unit", "surd", "pisot", "salem", "lehmer_irreducible", "projection_irreducible")
             if flags.get(k)]
    cells = ["%-16s" % name[:16], "%3d %3d %3d" % (rep["delta"], rep["ell"], rep["d"])]
    for p in ps:
        key = str(p)
        m = rep["mahler"].get(key)
        mn = rep["mahler_norms"].get(key)
        cells.append("m_%s=%s" % (key, m[:14] if m else "-"))
        cells.append("||.||_m,%s=%s" % (key, mn[:14] if mn else "-"))
    cells.append(",".join(marks) or "-")
    return "  ".join(cells)


def cmd_classify(args, out) -> int:
    entries = _entries_from_args(args)
    ps = parse_p_list(args.p)
    prec = args.prec
    ctx = load_context_arg(args.context, prec) if args.context else None
    cache = ResultCache(args.cache_dir) if args.cache_dir else None
    digest = _context_digest(ctx)

    results: List[Optional[tuple]] = [None] * len(entries)
    pending, keys = [], {}
    for i, e in enumerate(entries):
        if not e.ok:
            results[i] = (False, "quarantined: %s" % e.quarantine)
            continue
        key = cache_key("classify", {"coeffs": e.coeffs, "ps": [str(p) for p in ps], "context": digest,
                                     "r_search": bool(args.r_search)}, prec)
        keys[i] = key
        hit = cache.get(key) if cache else None
        if hit is not None:
            results[i] = (True, hit)
        else:
            pending.append(i)
    jobs = [(entries[i].coeffs, tuple(ps), prec, args.context, bool(args.r_search)) for i in pending]
    for i, res in zip(pending, _run_jobs(_classify_job, jobs, args.jobs)):
        results[i] = res
        if res[0] and cache is not None:
            cache.put(keys[i], "classify", res[1])

    status = EXIT_OK
    if not args.json:
        out.write("%-16s  %3s %3s %3s\n" % ("name", "dlt", "ell", "d"))
    for e, (ok, payload) in zip(entries, results):
        if not ok:
            status = EXIT_FAIL
            if args.json:
                out.write(json.dumps({"name": e.name, "error": payload}, sort_keys=True) + "\n")
            else:
                out.write("%-16s  error: %s\n" % (e.name[:16], payload))
            continue
        if args.json:
            # the cached string is emitted verbatim, wrapped with the entry name
            out.write('{"name": %s, "report": %s}\n' % (json.dumps(e.name), payload))
        else:
            out.write(_classify_row(e.name, json.loads(payload), ps) + "\n")
    return status


# -- decompose / mfactor -----------------------------------------------------------

def _decompose_text(res) -> str:
    from .decomp import simplify_text

    lines = ["M-factorization of %s" % simplify_text(res.input)]
    for (label, n), comp in sorted(res.joint.items(), key=lambda t: (t[0][1], t[0][0])):
        lines.append("  (%s, %d): %s" % (label, n, simplify_text(comp)))
    if res.relative_to_family:
        lines.append("  note: non-abelian context; degree components are taken relative to the subfield family")
    for name, val in sorted(res.residuals.items()):
        lines.append("  max |<a, b>| over %s components: %s" % (name, mpmath.nstr(val, 6)))
    return "\n".join(lines)


def cmd_decompose(args, out) -> int:
    from .decomp import m_factorization

    F = parse_input_poly(args.poly[0])
    prec = args.prec
    ctx = load_context_arg(args.context, prec) if args.context else None
    cache = ResultCache(args.cache_dir) if args.cache_dir else None
    key = cache_key("decompose", {"coeffs": list(F.coeffs), "root": args.root, "context": _context_digest(ctx),
                                  "verify": bool(args.verify)}, prec)
    payload = cache.get(key) if cache else None
    if payload is None:
        res = m_factorization(ctx, _resolve(ctx, F, args.root), verify=args.verify)
        payload = json.dumps({"json": res.to_dict(), "text": _decompose_text(res)}, sort_keys=True)
        if cache is not None:
            cache.put(key, "decompose", payload)
    data = json.loads(payload)
    if args.json:
        out.write(json.dumps(data["json"], sort_keys=True) + "\n")
    else:
        out.write(data["text"] + "\n")
    return EXIT_OK


def cmd_mfactor(args, out) -> int:
    from .decomp import degree_components, m_operator, mahler_norm, simplify_text
    from .placefn import h_p

    F = parse_input_poly(args.poly[0])
    ps = parse_p_list(args.p)
    prec = args.prec
    ctx = load_context_arg(args.context, prec) if args.context else None
    f = _resolve(ctx, F, args.root)
    Mf = m_operator(ctx, f)
    comps = degree_components(ctx, f)
    data = {
        "input": simplify_text(f),
        "components": {str(n): simplify_text(c) for n, c in sorted(comps.items())},
        "M_f": simplify_text(Mf),
        "heights": {str(p): _num(h_p(f, p, prec)) for p in ps},
        "mahler_norms": {str(p): _num(mahler_norm(f, p, ctx, prec)) for p in ps},
    }
    if args.json:
        out.write(json.dumps(data, sort_keys=True) + "\n")
        return EXIT_OK
    out.write("f = %s\n" % data["input"])
    for n, c in data["components"].items():
        out.write("  T^(%s) f = %s\n" % (n, c))
    out.write("M f = %s\n" % data["M_f"])
    for p in ps:
        out.write("  h_%s = %s   ||f||_m,%s = %s\n" % (p, data["heights"][str(p)], p, data["mahler_norms"][str(p)]))
    return EXIT_OK


# -- heights ------------------------------------------------------------------------

def heights_record(F: IntPoly, ps, prec: int) -> dict:
    from .numroots import log_house, log_mahler_measure, symmetric_log_house
    from .placefn import integral, lp_norm, place_function

    pf = place_function(F, prec)
    return {
        "poly": str(F),
        "coeffs": list(F.coeffs),
        "heights": {str(p): _num(lp_norm(pf, p)) for p in ps},
        "error": mpmath.nstr(pf.error, 3),
        "integral": mpmath.nstr(integral(pf), 3),
        "log_house": _num(log_house(F, prec)),
        "symmetric_log_house": _num(symmetric_log_house(F, prec)),
        "log_mahler_measure": _num(log_mahler_measure(F, prec)),
        "place_function": pf.to_dict(),
    }


def cmd_heights(args, out) -> int:
    entries = _entries_from_args(args)
    ps = parse_p_list(args.p)
    status = EXIT_OK
    for e in entries:
        try:
            if not e.ok:
                raise MahlerError("quarantined: %s" % e.quarantine)
            rec = heights_record(e.poly, ps, args.prec)
        except MahlerError as exc:
            status = EXIT_FAIL
            out.write((json.dumps({"name": e.name, "error": str(exc)}) if args.json
                       else "%s: error: %s" % (e.name, exc)) + "\n")
            continue
        if args.json:
            rec["name"] = e.name
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            hs = "  ".join("h_%s=%s" % (p, rec["heights"][str(p)][:16]) for p in ps)
            out.write("%s: %s  log house=%s  sym log house=%s  m=%s\n" % (
                e.name, hs, rec["log_house"][:16], rec["symmetric_log_house"][:16], rec["log_mahler_measure"][:16]))
    return status


# -- verify ---------------------------------------------------------------------------

def cmd_verify(args, out) -> int:
    from .suites import run_suite

    corpus = None
    if args.corpus and args.corpus != "builtin":
        if not os.path.exists(args.corpus):
            raise UsageError("corpus file %r not found" % args.corpus)
        corpus = load_corpus(args.corpus)
    res = run_suite(args.suite, corpus=corpus, prec=args.prec)
    if args.json:
        out.write(res.dumps() + "\n")
    else:
        for c in res.checks:
            out.write("%s  %s%s\n" % ("PASS" if c.passed else "FAIL", c.name,
                                     "  (residual %s)" % c.to_dict()["residual"] if c.residual is not None else ""))
        out.write("%s: %d/%d checks passed\n" % (res.suite, len(res.checks) - len(res.failures()), len(res.checks)))
    return EXIT_OK if res.passed else EXIT_FAIL


# -- scan -------------------------------------------------------------------------------

def _scan_job(job) -> Optional[dict]:
    coeffs, p, prec = job
    from .classify import invariants
    from .placefn import h_p

    F = IntPoly(coeffs)
    if not is_irreducible(F) or is_cyclotomic(F) is not None:
        return None
    try:
        inv = invariants(F, prec)
        h = h_p(F, p, prec)
    except MahlerError:
        return None
    with mpmath.mp.workprec(prec):
        m = inv.d * h
    return {"poly": str(F), "coeffs": list(coeffs), "d": inv.d, "delta": inv.delta,
            "m": _num(m), "_key": float(m)}


def _monic_candidates(degree: int, bound: int):
    """Monic polynomials with |coeffs| <= bound and nonzero constant, one per pair F(x), +-F(-x)."""
    seen = set()
    for middle in itertools.product(range(-bound, bound + 1), repeat=degree - 1):
        for c0 in range(1, bound + 1):
            for s in (1, -1):
                coeffs = (s * c0,) + middle + (1,)
                mirror = tuple(c * (-1) ** i for i, c in enumerate(coeffs))
                if degree % 2:
                    mirror = tuple(-c for c in mirror)
                key = min(coeffs, mirror)
                if key in seen:
                    continue
                seen.add(key)
                yield list(coeffs)


def cmd_scan(args, out) -> int:
    ps = parse_p_list(args.p)
    if len(ps) != 1:
        raise UsageError("scan ranks by a single exponent; got --p %s" % args.p)
    p = ps[0]
    if args.corpus:
        coeff_lists = [e.coeffs for e in _entries_from_args(args) if e.ok]
    else:
        if args.degree is None or args.degree < 1 or args.bound < 1:
            raise UsageError("scan needs --corpus or --degree N (>= 1) with --bound B (>= 1)")
        coeff_lists = list(_monic_candidates(args.degree, args.bound))
    rows = [r for r in _run_jobs(_scan_job, [(c, p, args.prec) for c in coeff_lists], args.jobs) if r]
    rows.sort(key=lambda r: (r["_key"], r["coeffs"]))
    rows = rows[:args.top]
    for r in rows:
        r.pop("_key")
        if args.json:
            out.write(json.dumps(r, sort_keys=True) + "\n")
        else:
            out.write("m_%s=%s  d=%d  delta=%d  %s\n" % (p, r["m"][:18], r["d"], r["delta"], r["poly"]))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------

def _prec_default() -> int:
    env = os.environ.get("MAHLER_PREC")
    return int(env) if env else 128


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=_prec_default(), help="working precision in bits (default 128)")
    common.add_argument("--json", action="store_true", help="emit one JSON object per line")
    common.add_argument("--cache-dir", help="directory for the JSON-lines result cache")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for corpus runs")

    parser = argparse.ArgumentParser(prog="mahlernorm", description="Place-space heights and Mahler p-norms.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="degree invariants, flags, heights and Mahler norms")
    p.add_argument("poly", nargs="*", help='polynomial such as "x^2-2" or [-2,0,1]')
    p.add_argument("--corpus", help="CSV/JSON corpus file, or 'builtin'")
    p.add_argument("--p", default="1,2,inf", help="comma-separated exponents (default 1,2,inf)")
    p.add_argument("--context", help="context JSON file or shipped context name")
    p.add_argument("--r-search", action="store_true", help="also search for a generator of R(f)")
    p.set_defaults(func=cmd_classify)

    for name, func, help_text in (("decompose", cmd_decompose, "M-factorization by Galois field and degree"),
                                  ("mfactor", cmd_mfactor, "M f and the Mahler p-norms")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("poly", nargs=1, help="polynomial")
        p.add_argument("--context", help="context JSON file or shipped context name")
        p.add_argument("--root", type=int, default=0, help="root index of the polynomial (default 0)")
        if name == "decompose":
            p.add_argument("--verify", action="store_true", help="add orthogonality residuals")
        else:
            p.add_argument("--p", default="1,2,inf", help="comma-separated exponents")
        p.set_defaults(func=func)

    p = sub.add_parser("heights", parents=[common], help="h_p, house, symmetric house and the place function")
    p.add_argument("poly", nargs="*")
    p.add_argument("--corpus")
    p.add_argument("--p", default="1,2,inf")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("verify", parents=[common], help="run a reproduction or property suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--corpus", help="corpus for the corpus suites (default: built-in)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="rank polynomials by m_p = d h_p")
    p.add_argument("--corpus")
    p.add_argument("--degree", type=int)
    p.add_argument("--bound", type=int, default=1)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--p", default="1")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.prec < 32:
        sys.stderr.write("mahlernorm: --prec must be at least 32\n")
        return EXIT_USAGE
    # downstream defaults read the precision from the environment
    os.environ["MAHLER_PREC"] = str(args.prec)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write("mahlernorm: %s\n" % exc)
        return EXIT_USAGE
    except MahlerError as exc:
        sys.stderr.write("mahlernorm: %s: %s\n" % (type(exc).__name__, exc))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
