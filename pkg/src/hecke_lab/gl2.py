"""Exact 2x2 integer matrices, congruence-subgroup membership and coset keys.

Entries are Python ints, so nothing overflows.  A matrix is the row-major
tuple ``(a, b, c, d)``; ``@`` is the matrix product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class SingularMatrixError(ZeroDivisionError):
    pass


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class Mat2(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def __matmul__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        a, b, c, d = self
        e, f, g, h = other
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __repr__(self) -> str:
        return f"Mat2({self.a}, {self.b}; {self.c}, {self.d})"

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adj(self) -> Mat2:
        """Adjugate: ``x @ x.adj() == det(x) * I``."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def scale(self, k: int) -> Mat2:
        return Mat2(k * self.a, k * self.b, k * self.c, k * self.d)

    def inverse(self) -> tuple[Mat2, int]:
        """The inverse as the exact pair ``(adj, det)``, meaning ``adj / det``."""
        det = self.det
        if det == 0:
            raise SingularMatrixError(f"{self!r} has determinant 0")
        return self.adj(), det

    def unimodular_inverse(self) -> Mat2:
        """Integral inverse of a determinant +-1 matrix."""
        det = self.det
        if det == 1:
            return self.adj()
        if det == -1:
            return -self.adj()
        raise DomainError(f"{self!r} is not invertible over Z (det {det})")

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), math.gcd(self.c, self.d))

    def is_nonnegative(self) -> bool:
        return min(self) >= 0

    def mobius(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def to_json(self) -> list[list[str]]:
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]

    @classmethod
    def from_json(cls, rows) -> Mat2:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))


I = Mat2(1, 0, 0, 1)
T = Mat2(1, 1, 0, 1)
S = Mat2(0, -1, 1, 0)
M = Mat2(0, 1, 1, 0)
T_PRIME = Mat2(1, 0, 1, 1)
T_INV = Mat2(1, -1, 0, 1)
T_PRIME_INV = Mat2(1, 0, -1, 1)


def B(m: int) -> Mat2:
    """``B_m = (m 0; 0 1)``."""
    return Mat2(m, 0, 0, 1)


def scalar(k: int) -> Mat2:
    return Mat2(k, 0, 0, k)


def divides_matrix(left: Mat2, right: Mat2) -> bool:
    """True iff ``left @ right^{-1}`` is an integral matrix of determinant 1."""
    adj, det = right.inverse()
    if left.det != det:
        return False
    prod = left @ adj
    return all(x % det == 0 for x in prod)


def quotient(left: Mat2, right: Mat2) -> Mat2:
    """``left @ right^{-1}``, which must be integral."""
    adj, det = right.inverse()
    prod = left @ adj
    if any(x % det for x in prod):
        raise DomainError(f"{left!r} @ {right!r}^-1 is not integral")
    return Mat2(*(x // det for x in prod))


# --------------------------------------------------------------------------
# subgroups
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    """One of SL(2,Z), Gamma0(n), Gamma0(n, m) or the det +-1 group GL(2,Z)."""

    kind: str = "Gamma0"
    n: int = 1
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("SL2Z", "Gamma0", "GL2Z"):
            raise DomainError(f"unknown group kind {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise DomainError("group parameters must be positive")

    @classmethod
    def sl2z(cls) -> GroupSpec:
        return cls("SL2Z")

    @classmethod
    def gamma0(cls, n: int, m: int = 1) -> GroupSpec:
        return cls("Gamma0", n, m)

    @classmethod
    def gl2z(cls) -> GroupSpec:
        return cls("GL2Z")


def membership(g: Mat2, spec: GroupSpec) -> bool:
    if spec.kind == "GL2Z":
        return g.det in (1, -1)
    if g.det != 1:
        return False
    if spec.kind == "SL2Z":
        return True
    return g.c % spec.n == 0 and g.b % spec.m == 0


def in_gamma0(g: Mat2, n: int) -> bool:
    return g.det == 1 and g.c % n == 0


# --------------------------------------------------------------------------
# Hermite decomposition g = gamma @ (c b; 0 e)
# --------------------------------------------------------------------------

def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_decompose(g: Mat2) -> tuple[Mat2, Mat2]:
    """Split ``g`` (det > 0) as ``gamma @ A`` with gamma in SL(2,Z).

    ``A = (c b; 0 e)`` with ``c >= 1``, ``c*e == det g`` and ``0 <= b < e``;
    the pair is unique under this normalization.
    """
    det = g.det
    if det <= 0:
        raise DomainError(f"hnf_decompose needs det > 0, got {det} for {g!r}")
    a, b, c, d = g
    h, x, y = xgcd(a, c)
    # U = (x y; -c/h a/h) has det 1 and kills the lower-left entry
    u = Mat2(x, y, -c // h, a // h)
    top = x * b + y * d
    e = det // h
    k = -(top // e)
    A = Mat2(h, top + k * e, 0, e)
    uk = Mat2(1, k, 0, 1) @ u
    gamma = uk.adj()
    return gamma, A


# --------------------------------------------------------------------------
# projective line over Z/n and coset keys
# --------------------------------------------------------------------------

def canonical_pair(x: int, y: int, n: int) -> tuple[int, int]:
    """Lexicographically least unit multiple of ``(x, y)`` mod ``n``.

    Agrees with the table built by ``_kernels.proj_canon_table``; this
    version is O(c) per call with c = gcd(x, n), so it also serves levels
    too large for a table.
    """
    if n == 1:
        return 0, 0
    x %= n
    y %= n
    c = math.gcd(x, n)
    first = c % n
    step = n // c
    if step == 1:
        k0 = 1
    else:
        k0 = pow(x // c, -1, step)
    while math.gcd(k0, n) != 1:
        k0 += step
    y0 = (k0 * y) % n
    best = y0
    u = 1
    for _ in range(c):
        if math.gcd(u, n) == 1:
            cand = (u * y0) % n
            if cand < best:
                best = cand
        u += step
    return first, best


class CosetKey(NamedTuple):
    level: int
    proj: tuple[int, int]
    hnf: Mat2


def coset_key(n: int, g: Mat2) -> CosetKey:
    """Canonical label of the left coset ``Gamma0(n) g`` (det g >= 1)."""
    if g.det <= 0:
        raise DomainError(f"coset_key needs det >= 1, got {g.det}")
    gamma, A = hnf_decompose(g)
    x, y = gamma.c, gamma.d
    if math.gcd(math.gcd(x, y), n) != 1:
        raise AssertionError(f"bottom row {(x, y)} of a unimodular factor is not primitive mod {n}")
    return CosetKey(n, canonical_pair(x, y, n), A)
