import io
import json

import pytest

from mahlernorm.cache import ResultCache, cache_key
from mahlernorm.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main

LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"


def run(*argv):
    out = io.StringIO()
    try:
        code = main(list(argv), out)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    return code, out.getvalue()


def test_classify_surd_text():
    code, text = run("classify", "x^2-2")
    assert code == EXIT_OK
    assert "surd" in text and "projection_irreducible" in text


def test_classify_salem_json():
    code, text = run("classify", "--json", LEHMER)
    assert code == EXIT_OK
    rec = json.loads(text)
    assert rec["report"]["flags"]["salem"] is True
    assert rec["report"]["mahler_norms"]["1"].startswith("0.324715")


def test_exit_codes():
    assert run("classify", "x^2-1")[0] == EXIT_FAIL
    assert run("classify", "x^^2")[0] == EXIT_USAGE
    assert run("verify", "nonexistent")[0] == EXIT_USAGE
    assert run("classify", "--prec", "8", "x^2-2")[0] == EXIT_USAGE
    assert run("decompose", "x^2-4x+2", "--context", "no-such-context")[0] == EXIT_USAGE


def test_corpus_file(tmp_path):
    path = tmp_path / "salem.csv"
    path.write_text("lehmer,1,1,0,-1,-1,-1,-1,-1,0,1,1\nsalem4,1,-1,-1,-1,1\n")
    code, text = run("classify", "--corpus", str(path), "--p", "1,2,inf")
    assert code == EXIT_OK
    assert "lehmer" in text and "salem4" in text and "m_inf=" in text


def test_decompose_example():
    code, text = run("decompose", "x^2-4x+2", "--context", "quad2.json")
    assert code == EXIT_OK
    assert "(Q, 1): f[sqrt(2)]" in text
    assert "(Q(sqrt(2)), 2): f[1 + sqrt(2)]" in text


def test_decompose_standalone_and_verify():
    code, text = run("decompose", "x-2")
    assert code == EXIT_OK and "(Q, 1): f[2]" in text
    code, text = run("decompose", "x^2-4x+2", "--context", "quad2", "--verify", "--json")
    rec = json.loads(text)
    assert set(rec["residuals"]) == {"by_degree", "by_field", "joint"}


def test_verify_suites_json():
    code, text = run("verify", "paper-examples", "--json")
    assert code == EXIT_OK
    rec = json.loads(text)
    assert rec["passed"] is True and rec["checks"]


def test_heights_and_mfactor():
    code, text = run("heights", "2x-3", "--json")
    rec = json.loads(text)
    assert code == EXIT_OK and rec["heights"]["inf"].startswith("1.0986122886")
    code, text = run("mfactor", "x^2-4x+2", "--context", "quad2", "--p", "2")
    assert code == EXIT_OK and "M f = f[4 + 3*sqrt(2)]" in text


def test_scan():
    code, text = run("scan", "--degree", "4", "--bound", "1", "--top", "2")
    assert code == EXIT_OK
    assert len(text.strip().splitlines()) == 2


# -- invariants ---------------------------------------------------------------------

def test_json_round_trip():
    for argv in (["classify", "--json", "x^3-x-1"], ["heights", "--json", "x^2-3"],
                 ["decompose", "--json", "x^2-4x+2", "--context", "quad2"]):
        code, text = run(*argv)
        assert code == EXIT_OK
        for line in text.strip().splitlines():
            assert json.dumps(json.loads(line), sort_keys=True) == line


def test_cache_byte_identical(tmp_path):
    argv = ["classify", "--json", "--cache-dir", str(tmp_path), "x^2-2", LEHMER, "x^3-x-1"]
    code1, fresh = run(*argv)
    cache = ResultCache(tmp_path)
    assert len(cache) == 3
    code2, cached = run(*argv)
    assert code1 == code2 == EXIT_OK
    assert fresh == cached
    # the stored record reproduces the emitted report exactly
    line = (tmp_path / "results.jsonl").read_text().splitlines()[0]
    stored = json.loads(line)["value"]
    assert json.loads(fresh.splitlines()[0])["report"] == json.loads(stored)


def test_cache_serves_stored_value(tmp_path):
    cache = ResultCache(tmp_path)
    key = cache_key("probe", {"x": 1}, 128)
    cache.put(key, "probe", '{"answer": 42}')
    cache.put(key, "probe", '{"answer": 42}')
    assert ResultCache(tmp_path).get(key) == '{"answer": 42}'
    assert len((tmp_path / "results.jsonl").read_text().splitlines()) == 1
    with open(tmp_path / "results.jsonl", "a") as fh:
        fh.write('{"key": "torn')
    assert ResultCache(tmp_path).get(key) == '{"answer": 42}'


def test_cache_key_depends_on_precision():
    assert cache_key("classify", [1, 2], 128) != cache_key("classify", [1, 2], 256)


def test_parallel_matches_serial():
    argv = ["classify", "--json", "--corpus", "builtin"]
    code1, serial = run(*argv, "--jobs", "1")
    code2, parallel = run(*argv, "--jobs", "3")
    assert code1 == code2
    assert serial == parallel
    names = [json.loads(line)["name"] for line in serial.splitlines()]
    assert names[:3] == ["lehmer", "salem4", "salem6"]
