import math

import numpy as np
import pytest

from hecke_lab import _kernels
from hecke_lab.cosets import build_index_table
from hecke_lab.gl2 import Mat2


@pytest.mark.parametrize("value, expected", [("1", "numpy"), ("yes", "numpy"), ("0", None), ("", None), ("false", None)])
def test_pure_numpy_flag(monkeypatch, value, expected):
    monkeypatch.setenv("HECKE_LAB_PURE_NUMPY", value)
    native = "numba" if _kernels.HAVE_NUMBA else "numpy"
    assert _kernels.default_backend() == (expected or native)


def test_flag_unset(monkeypatch):
    monkeypatch.delenv("HECKE_LAB_PURE_NUMPY", raising=False)
    assert _kernels.default_backend() == ("numba" if _kernels.HAVE_NUMBA else "numpy")


@pytest.mark.parametrize("n", [1, 2, 6, 9, 30, 64])
def test_projective_codes_by_definition(n, backend):
    canon = _kernels.proj_canon_table(n, backend)
    units = [u for u in range(1, n + 1) if math.gcd(u, n) == 1]
    for x in range(n):
        for y in range(n):
            x0, y0 = min(((u * x) % n, (u * y) % n) for u in units)
            assert canon[x * n + y] == x0 * n + y0


@pytest.mark.parametrize("n", [2, 5, 12, 35])
@pytest.mark.parametrize("g", [Mat2(1, 1, 0, 1), Mat2(0, -1, 1, 0), Mat2(5, 2, 7, 3)])
def test_row_action_by_definition(n, g, backend):
    table = build_index_table(n)
    canon, ordinal = table._dense
    xs, ys = table._rows
    out = _kernels.act_rows(xs, ys, tuple(v % n for v in g), n, canon, ordinal, backend)
    for k, (x, y) in enumerate(zip(xs, ys)):
        code = canon[((x * g.a + y * g.c) % n) * n + (x * g.b + y * g.d) % n]
        assert out[k] == ordinal[code]


@pytest.mark.parametrize("n", [1, 2, 7, 12, 40])
def test_enumeration_is_sorted_and_has_determinant_n(n, backend):
    out = _kernels.enumerate_sn(n, backend)
    assert out.dtype == np.int64 and out.shape[1] == 4
    assert np.all(out[:, 0] * out[:, 3] - out[:, 1] * out[:, 2] == n)
    assert [tuple(r) for r in out] == sorted(tuple(r) for r in out)
