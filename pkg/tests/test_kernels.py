import subprocess
import sys

import numpy as np
import pytest

from mahlernorm import _kernels


def _desc(seed, n):
    rng = np.random.default_rng(seed)
    c = rng.integers(-9, 10, size=n + 1).astype(float)
    c[0] = rng.integers(1, 4)
    return c


def _matched_distance(a, b):
    return max(np.min(np.abs(b - z)) for z in a)


@pytest.mark.parametrize("seed", range(6))
def test_aberth_numba_matches_numpy(seed):
    desc = _desc(seed, 8)
    a = _kernels.aberth(desc, use_numba=True)
    b = _kernels.aberth(desc, use_numba=False)
    want = np.roots(desc)
    assert _matched_distance(a, b) < 1e-8
    assert _matched_distance(a, want) < 1e-6


def test_log_mahler_batch_paths_agree():
    descs = [_desc(s, 6) for s in range(20)]
    roots = np.array([np.roots(d) for d in descs])
    lead = np.array([d[0] for d in descs])
    a = _kernels.log_mahler_batch(roots, lead, use_numba=True)
    b = _kernels.log_mahler_batch(roots, lead, use_numba=False)
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_env_flag_selects_numpy():
    code = "from mahlernorm import _kernels; print(_kernels.NUMBA_AVAILABLE)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"MAHLER_NUMBA": "0", "PATH": ""}, check=True)
    assert out.stdout.strip() == "False"
