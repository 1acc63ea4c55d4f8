"""Integer kernels shared by the coset and matrix-set code.

Every kernel exists twice: a numba ``@njit`` version and a plain numpy
version with identical results.  The numba path is used when numba imports
and ``HECKE_LAB_PURE_NUMPY`` is unset (or ``0``); callers may also pick a
backend explicitly, which is what the tests and the benchmark do.

All kernels work on int64 arrays.  They are only ever called with levels and
determinants small enough (a few thousand at most) that no intermediate
product leaves the int64 range.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def default_backend() -> str:
    flag = os.environ.get("HECKE_LAB_PURE_NUMPY", "").strip().lower()
    if not HAVE_NUMBA or flag not in ("", "0", "false", "no"):
        return "numpy"
    return "numba"


def _units(n: int) -> np.ndarray:
    return np.array([k for k in range(1, n + 1) if math.gcd(k, n) == 1], dtype=np.int64)


# --------------------------------------------------------------------------
# projective line over Z/n: canonical code of every pair (x, y)
# --------------------------------------------------------------------------

def _proj_canon_numpy(n, units):
    x = np.repeat(np.arange(n, dtype=np.int64), n)
    y = np.tile(np.arange(n, dtype=np.int64), n)
    best = x * n + y
    for k in units:
        best = np.minimum(best, ((k * x) % n) * n + (k * y) % n)
    return best


def _proj_canon_loops(n, units):
    out = np.empty(n * n, dtype=np.int64)
    for x in range(n):
        for y in range(n):
            best = x * n + y
            for t in range(units.shape[0]):
                k = units[t]
                code = ((k * x) % n) * n + (k * y) % n
                if code < best:
                    best = code
            out[x * n + y] = best
    return out


# --------------------------------------------------------------------------
# right action of a 2x2 matrix on row vectors mod n, followed by lookup
# --------------------------------------------------------------------------

def _act_rows_numpy(xs, ys, g, n, canon, ordinal_of_code):
    nx = (xs * g[0] + ys * g[2]) % n
    ny = (xs * g[1] + ys * g[3]) % n
    return ordinal_of_code[canon[nx * n + ny]]


def _act_rows_loops(xs, ys, g, n, canon, ordinal_of_code):
    out = np.empty(xs.shape[0], dtype=np.int64)
    for i in range(xs.shape[0]):
        nx = (xs[i] * g[0] + ys[i] * g[2]) % n
        ny = (xs[i] * g[1] + ys[i] * g[3]) % n
        out[i] = ordinal_of_code[canon[nx * n + ny]]
    return out


# --------------------------------------------------------------------------
# S_n = {(a b; c d): ad - bc = n, a > c >= 0, d > b >= 0}, lexicographic
# --------------------------------------------------------------------------

def _enum_sn_numpy(n):
    rows = []
    for a in range(1, n + 1):
        c = np.arange(a, dtype=np.int64)
        for b in range(0, n + 1):
            num = n + b * c
            ok = num % a == 0
            d = num // a
            ok &= d > b
            for ci, di in zip(c[ok], d[ok]):
                rows.append((a, b, ci, di))
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


def _enum_sn_count(n):
    count = 0
    for a in range(1, n + 1):
        for b in range(0, n + 1):
            for c in range(0, a):
                num = n + b * c
                if num % a == 0 and num // a > b:
                    count += 1
    return count


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _proj_canon_jit = _jit(_proj_canon_loops)
    _act_rows_jit = _jit(_act_rows_loops)
    _enum_sn_count_jit = _jit(_enum_sn_count)

    @numba.njit(cache=True, nogil=True)
    def _enum_sn_jit(n):
        out = np.empty((_enum_sn_count_jit(n), 4), dtype=np.int64)
        k = 0
        for a in range(1, n + 1):
            for b in range(0, n + 1):
                for c in range(0, a):
                    num = n + b * c
                    if num % a != 0:
                        continue
                    d = num // a
                    if d > b:
                        out[k, 0] = a
                        out[k, 1] = b
                        out[k, 2] = c
                        out[k, 3] = d
                        k += 1
        return out[:k]


def proj_canon_table(n: int, backend: str | None = None) -> np.ndarray:
    """Canonical code ``x0*n + y0`` for every pair ``(x, y)`` mod ``n``.

    ``(x0, y0)`` is the lexicographically smallest unit multiple of
    ``(x, y)``, so two pairs share a code iff they define the same point of
    the projective line over Z/n.  Index the result with ``x*n + y``.
    """
    backend = backend or default_backend()
    units = _units(n)
    if backend == "numba":
        return _proj_canon_jit(n, units)
    return _proj_canon_numpy(n, units)


def act_rows(xs, ys, g, n, canon, ordinal_of_code, backend: str | None = None) -> np.ndarray:
    """Ordinals of the rows ``(x, y)·g`` mod ``n``; ``g`` is (a, b, c, d) mod n."""
    backend = backend or default_backend()
    g = np.asarray(g, dtype=np.int64)
    if backend == "numba":
        return _act_rows_jit(xs, ys, g, n, canon, ordinal_of_code)
    return _act_rows_numpy(xs, ys, g, n, canon, ordinal_of_code)


def enumerate_sn(n: int, backend: str | None = None) -> np.ndarray:
    """All members of S_n as an ``(N, 4)`` array, sorted lexicographically."""
    backend = backend or default_backend()
    if backend == "numba":
        out = _enum_sn_jit(n)
    else:
        out = _enum_sn_numpy(n)
    if out.shape[0] > 1:
        order = np.lexsort((out[:, 3], out[:, 2], out[:, 1], out[:, 0]))
        out = out[order]
    return out
