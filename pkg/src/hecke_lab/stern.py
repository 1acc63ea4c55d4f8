"""Dominant matrix sets, the K map and its orbits, and Farey paths.

``S_n`` holds the determinant-n matrices ``(a b; c d)`` with ``a > c >= 0``
and ``d > b >= 0``.  Its upper-triangular members form ``X_n`` (primitive
ones ``X_n*``) and its lower-triangular members ``Y_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _kernels
from .cosets import build_index_table
from .formal import FormalSum, total
from .gl2 import DomainError, I, Mat2, quotient


@dataclass(frozen=True)
class MatrixSets:
    n: int
    S: tuple[Mat2, ...]
    X: tuple[Mat2, ...]
    Y: tuple[Mat2, ...]
    X_star: tuple[Mat2, ...]


def in_S(A: Mat2) -> bool:
    a, b, c, d = A
    return a > c >= 0 and d > b >= 0 and A.det > 0


@lru_cache(maxsize=None)
def matrix_sets(n: int, backend: str | None = None) -> MatrixSets:
    if n < 1:
        raise DomainError("n must be positive")
    S = tuple(Mat2(*map(int, row)) for row in _kernels.enumerate_sn(n, backend))
    X = tuple(A for A in S if A.c == 0)
    Y = tuple(A for A in S if A.b == 0)
    X_star = tuple(A for A in X if A.content() == 1)
    return MatrixSets(n, S, X, Y, X_star)


@lru_cache(maxsize=None)
def x_sets(n: int) -> tuple[tuple[Mat2, ...], tuple[Mat2, ...]]:
    """``(X_n, X_n*)`` enumerated directly, without building S_n."""
    if n < 1:
        raise DomainError("n must be positive")
    X = tuple(sorted(
        Mat2(n // d, b, 0, d) for d in range(1, n + 1) if n % d == 0 for b in range(d)
    ))
    return X, tuple(A for A in X if A.content() == 1)


def k_map(A: Mat2) -> Mat2:
    a, b, c, d = A
    if b == 0:
        raise DomainError(f"K is undefined on {A!r}: it lies in Y (b = 0)")
    q = -(-d // b)
    return Mat2(q * a - c, q * b - d, a, b)


@dataclass(frozen=True)
class KOrbit:
    start: Mat2
    orbit: tuple[Mat2, ...]

    @property
    def k(self) -> int:
        return len(self.orbit) - 1

    def as_sum(self) -> FormalSum:
        return FormalSum.of(*self.orbit)


class NonTermination(RuntimeError):
    pass


@lru_cache(maxsize=65536)
def k_orbit(A: Mat2) -> KOrbit:
    """Iterate K from ``A`` until the lower-triangular set Y is reached."""
    if not in_S(A):
        raise DomainError(f"{A!r} is not in S_{A.det}")
    cap = 4 * sum(A)
    orbit = [A]
    while orbit[-1].b != 0:
        if len(orbit) > cap:
            raise NonTermination(f"K orbit of {A!r} exceeded {cap} steps")
        orbit.append(k_map(orbit[-1]))
    return KOrbit(A, tuple(orbit))


@dataclass(frozen=True)
class FareyPath:
    """The chain ``-1/0 < 0 = y_1 < ... < y_L = q`` of Farey neighbours."""

    q: Fraction
    fractions: tuple[tuple[int, int], ...]
    matrices: tuple[Mat2, ...]

    @property
    def L(self) -> int:
        return len(self.matrices)

    @property
    def M(self) -> FormalSum:
        return FormalSum.of(*self.matrices)

    def to_dict(self) -> dict:
        return {
            "q": str(self.q),
            "L": str(self.L),
            "fractions": [[str(a), str(b)] for a, b in self.fractions],
            "matrices": [m.to_json() for m in self.matrices],
        }


def _as_fraction(q) -> Fraction:
    if isinstance(q, tuple):
        return Fraction(*q)
    return Fraction(q)


@lru_cache(maxsize=None)
def _farey_path(q: Fraction) -> FareyPath:
    A = Mat2(1, q.numerator, 0, q.denominator)
    orbit = k_orbit(A).orbit
    mats = (I,) + tuple(quotient(B, A) for B in orbit[1:])
    fracs = [(-1, 0)]
    for m in mats:
        fracs.append((-m.b, m.a))
    return FareyPath(q, tuple(fracs), mats)


def farey_path(q) -> FareyPath:
    q = _as_fraction(q)
    if not 0 <= q < 1:
        raise DomainError(f"q = {q} is outside [0, 1)")
    return _farey_path(q)


def psi_vector(n: int) -> tuple[FormalSum, ...]:
    """K-orbit sums of the matrices A_i, in the order of the level-n index table."""
    return tuple(k_orbit(e.A).as_sum() for e in build_index_table(n).entries)


def psi_total(m: int) -> FormalSum:
    return total(psi_vector(m))


def is_farey_chain(path: FareyPath) -> bool:
    """Neighbour determinants, strict monotonicity and endpoints of a path."""
    fr = path.fractions
    if fr[0] != (-1, 0) or fr[1] != (0, 1):
        return False
    a, b = fr[-1]
    if Fraction(a, b) != path.q:
        return False
    for (a0, b0), (a1, b1) in zip(fr, fr[1:]):
        if a0 * b1 - a1 * b0 != -1:
            return False
    values = [Fraction(a, b) for a, b in fr[1:]]
    return all(x < y for x, y in zip(values, values[1:])) and all(
        m.det == 1 for m in path.matrices
    ) and math.gcd(a, b) == 1
