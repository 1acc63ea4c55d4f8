"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from hecke_lab.gl2 import Mat2, T

small = st.integers(min_value=-40, max_value=40)


@st.composite
def sl2z(draw, max_len=8):
    """Products of T^+-1 and S, so every draw is unimodular."""
    g = Mat2(1, 0, 0, 1)
    for step in draw(st.lists(st.sampled_from(["T", "Ti", "S"]), max_size=max_len)):
        if step == "T":
            g = g @ T
        elif step == "Ti":
            g = g @ Mat2(1, -1, 0, 1)
        else:
            g = g @ Mat2(0, -1, 1, 0)
    return g


@st.composite
def gamma0(draw, n, max_len=8):
    gens = [T, Mat2(1, -1, 0, 1), Mat2(1, 0, n, 1), Mat2(1, 0, -n, 1), Mat2(-1, 0, 0, -1)]
    g = Mat2(1, 0, 0, 1)
    for k in draw(st.lists(st.integers(0, len(gens) - 1), max_size=max_len)):
        g = g @ gens[k]
    return g


@st.composite
def positive_det(draw, max_det=60):
    """Matrices of positive determinant: a unimodular factor times (a b; 0 d)."""
    a = draw(st.integers(1, 12))
    d = draw(st.integers(1, 12))
    b = draw(st.integers(-30, 30))
    return draw(sl2z()) @ Mat2(a, b, 0, d)
