"""Double-precision kernels: float Aberth iteration and batch Mahler measures.

These produce starting points and quick screens only; anything that ends
up in a certified answer is redone in mpmath.  Set ``MAHLER_NUMBA=0`` to
force the pure-numpy versions.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("MAHLER_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not USE_NUMBA:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return deco


def initial_guesses(desc: np.ndarray) -> np.ndarray:
    """Points on a circle of radius given by the Fujiwara-style bound."""
    n = desc.shape[0] - 1
    a = np.abs(desc[1:] / desc[0])
    k = np.arange(1, n + 1)
    rad = 2.0 * np.max(a ** (1.0 / k)) if n > 0 else 1.0
    if not np.isfinite(rad) or rad == 0.0:
        rad = 1.0
    ang = 2.0 * np.pi * np.arange(n) / n + 0.4
    return rad * np.exp(1j * ang) * 0.5


# -- Aberth iteration -----------------------------------------------------

@njit(cache=True)
def _aberth_numba(desc, z, maxiter, tol):
    n = z.shape[0]
    for it in range(maxiter):
        maxstep = 0.0
        for i in range(n):
            p = desc[0]
            dp = 0.0 + 0.0j
            for k in range(1, desc.shape[0]):
                dp = dp * z[i] + p
                p = p * z[i] + desc[k]
            s = 0.0 + 0.0j
            for j in range(n):
                if j != i:
                    s += 1.0 / (z[i] - z[j])
            if p == 0:
                continue
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
            z[i] -= w
            aw = abs(w)
            if aw > maxstep:
                maxstep = aw
        if maxstep < tol:
            return z, it + 1
    return z, maxiter


def _aberth_numpy(desc, z, maxiter, tol):
    n = z.shape[0]
    for it in range(maxiter):
        p = np.polyval(desc, z)
        dp = np.polyval(np.polyder(desc), z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.max(np.abs(w)) < tol:
            return z, it + 1
    return z, maxiter


def aberth(desc, maxiter: int = 500, tol: float = 1e-14, use_numba=None):
    """Approximate all roots of a polynomial given by descending coefficients."""
    desc = np.asarray(desc, dtype=np.complex128)
    z = initial_guesses(desc).astype(np.complex128)
    if use_numba is None:
        use_numba = NUMBA_AVAILABLE
    if use_numba and NUMBA_AVAILABLE:
        z, it = _aberth_numba(desc, z.copy(), maxiter, tol)
    else:
        z, it = _aberth_numpy(desc, z.copy(), maxiter, tol)
    return z


# -- batch Mahler measure screen -----------------------------------------

@njit(cache=True)
def _log_mahler_numba(roots, lead):
    out = np.empty(roots.shape[0])
    for r in range(roots.shape[0]):
        acc = np.log(abs(lead[r]))
        for k in range(roots.shape[1]):
            a = abs(roots[r, k])
            if a > 1.0:
                acc += np.log(a)
        out[r] = acc
    return out


def _log_mahler_numpy(roots, lead):
    return np.log(np.abs(lead)) + np.sum(np.log(np.maximum(np.abs(roots), 1.0)), axis=1)


def log_mahler_batch(roots: np.ndarray, lead: np.ndarray, use_numba=None) -> np.ndarray:
    """Logarithmic Mahler measures for rows of a (count, degree) root matrix."""
    roots = np.asarray(roots, dtype=np.complex128)
    lead = np.asarray(lead, dtype=np.float64)
    if use_numba is None:
        use_numba = NUMBA_AVAILABLE
    if use_numba and NUMBA_AVAILABLE:
        return _log_mahler_numba(roots, lead)
    return _log_mahler_numpy(roots, lead)
