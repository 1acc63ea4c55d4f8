"""Index sets of Gamma0(n)\\SL(2,Z), representative systems and the
permutation representations rho and rho-tilde.

The index set I_n is parametrized by pairs ``(c, b)`` with ``c | n``,
``0 <= b < n/c`` and ``gcd(c, b, n/c) == 1``, ordered lexicographically.
Entry ``i`` carries the upper-triangular matrix ``A_i = (c b; 0 n/c)`` and a
unimodular representative ``R_i`` whose bottom row is ``(c, d_n(c, b))``.

Two projections from level ``n*m`` are used elsewhere.  Both reduce the
bottom row of ``R_i`` to the smaller level; which smaller level is meant is
always passed explicitly (``sigma_project(n*m, n, i)`` or
``sigma_project(n*m, m, i)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import _kernels
from .gl2 import (
    B,
    DomainError,
    Mat2,
    canonical_pair,
    coset_key,
    hnf_decompose,
    in_gamma0,
)

# levels up to this use the dense projective-line table from _kernels
TABLE_LIMIT = 512


class InvariantViolation(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""


def prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def index_mu(n: int) -> int:
    """``n * prod(1 + 1/q)`` over primes ``q | n``, computed in integers."""
    mu = n
    for q in prime_factors(n):
        mu = mu // q * (q + 1)
    return mu


def divisors(n: int) -> list[int]:
    return [c for c in range(1, n + 1) if n % c == 0]


def p_pairs(n: int) -> list[tuple[int, int]]:
    return [
        (c, b)
        for c in divisors(n)
        for b in range(n // c)
        if math.gcd(math.gcd(c, b), n // c) == 1
    ]


def d_value(n: int, c: int, b: int) -> int:
    e = n // c
    for k in range(c):
        if math.gcd(c, b + k * e) == 1:
            return c + b + k * e
    raise InvariantViolation(f"no admissible k for pair {(c, b)} at level {n}")


def representative(c: int, d: int) -> Mat2:
    """Unimodular matrix with bottom row ``(c, d)`` and least top-left entry >= 0."""
    a = pow(d, -1, c) if c > 1 else 0
    return Mat2(a, (a * d - 1) // c, c, d)


@dataclass(frozen=True)
class IndexEntry:
    ordinal: int
    c: int
    b: int
    d: int
    A: Mat2
    R: Mat2

    @property
    def pair(self) -> tuple[int, int]:
        return self.c, self.b


class CosetTable:
    """Immutable index table for one level ``n``."""

    def __init__(self, n: int):
        if n < 1:
            raise DomainError("level must be positive")
        self.n = n
        entries = []
        for k, (c, b) in enumerate(p_pairs(n)):
            d = d_value(n, c, b)
            entries.append(IndexEntry(k, c, b, d, Mat2(c, b, 0, n // c), representative(c, d)))
        self.entries: tuple[IndexEntry, ...] = tuple(entries)
        self.mu = len(entries)
        self.ordinal_of_class: dict[tuple[int, int], int] = {}
        for e in entries:
            key = canonical_pair(e.c, e.d, n)
            if key in self.ordinal_of_class:
                raise InvariantViolation(f"pairs collide on class {key} at level {n}")
            self.ordinal_of_class[key] = e.ordinal
        self.ordinal_of_A: dict[Mat2, int] = {e.A: e.ordinal for e in entries}

    def __len__(self) -> int:
        return self.mu

    def __repr__(self) -> str:
        return f"CosetTable(n={self.n}, mu={self.mu})"

    # -- lookups ----------------------------------------------------------

    def ordinal_of_row(self, x: int, y: int) -> int:
        """Ordinal of the coset ``Gamma0(n) g`` where ``(x, y)`` is the bottom row of g."""
        if self._dense is not None:
            canon, ordinal_of_code = self._dense
            n = self.n
            return int(ordinal_of_code[canon[(x % n) * n + y % n]])
        return self.ordinal_of_class[canonical_pair(x, y, self.n)]

    def ordinal_of_matrix(self, g: Mat2) -> int:
        if g.det != 1:
            raise DomainError(f"{g!r} is not in SL(2,Z)")
        return self.ordinal_of_row(g.c, g.d)

    def class_of(self, i: int) -> tuple[int, int]:
        e = self.entries[i]
        return canonical_pair(e.c, e.d, self.n)

    def ordinal_of_pair(self, c: int, b: int) -> int:
        return self.ordinal_of_A[Mat2(c, b, 0, self.n // c)]

    # -- dense tables for the kernels ------------------------------------

    @cached_property
    def _dense(self):
        n = self.n
        if n > TABLE_LIMIT:
            return None
        canon = _kernels.proj_canon_table(n)
        ordinal_of_code = np.full(n * n, -1, dtype=np.int64)
        for (x0, y0), k in self.ordinal_of_class.items():
            ordinal_of_code[x0 * n + y0] = k
        return canon, ordinal_of_code

    @cached_property
    def _rows(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.array([e.c % self.n for e in self.entries], dtype=np.int64)
        ys = np.array([e.d % self.n for e in self.entries], dtype=np.int64)
        return xs, ys

    # -- derived maps ----------------------------------------------------

    @cached_property
    def h(self) -> tuple[int, ...]:
        """The bijection ``h_n``: ``(0 1; -n 0) R_i`` lies in ``SL(2,Z) A_{h(i)}``."""
        w = Mat2(0, 1, -self.n, 0)
        out = tuple(self.ordinal_of_A[hnf_decompose(w @ e.R)[1]] for e in self.entries)
        if sorted(out) != list(range(self.mu)):
            raise InvariantViolation(f"h_{self.n} is not a bijection")
        return out

    @cached_property
    def h_inverse(self) -> tuple[int, ...]:
        inv = [0] * self.mu
        for i, j in enumerate(self.h):
            inv[j] = i
        return tuple(inv)

    def rho_perm(self, g: Mat2, backend: str | None = None) -> tuple[int, ...]:
        """``perm[i] = j`` iff ``R_i g R_j^-1`` lies in Gamma0(n)."""
        if g.det != 1:
            raise DomainError(f"rho needs det 1, got {g.det}")
        n = self.n
        if self._dense is not None:
            xs, ys = self._rows
            canon, ordinal_of_code = self._dense
            out = _kernels.act_rows(
                xs, ys, (g.a % n, g.b % n, g.c % n, g.d % n), n, canon, ordinal_of_code, backend
            )
            return tuple(int(k) for k in out)
        return tuple(
            self.ordinal_of_row(e.c * g.a + e.d * g.c, e.c * g.b + e.d * g.d) for e in self.entries
        )

    def rho_tilde_perm(self, g: Mat2) -> tuple[int, ...]:
        """``perm[i] = j`` iff ``A_i g A_j^-1`` lies in SL(2,Z)."""
        if g.det != 1:
            raise DomainError(f"rho-tilde needs det 1, got {g.det}")
        return tuple(self.ordinal_of_A[hnf_decompose(e.A @ g)[1]] for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "n": str(self.n),
            "mu": str(self.mu),
            "entries": [
                {
                    "ordinal": str(e.ordinal),
                    "c": str(e.c),
                    "b": str(e.b),
                    "d": str(e.d),
                    "A": e.A.to_json(),
                    "R": e.R.to_json(),
                    "h": str(self.h[e.ordinal]),
                }
                for e in self.entries
            ],
        }


@lru_cache(maxsize=None)
def build_index_table(n: int) -> CosetTable:
    return CosetTable(n)


# --------------------------------------------------------------------------
# permutations as matrices
# --------------------------------------------------------------------------

def perm_matrix(perm) -> np.ndarray:
    """0/1 matrix with a one at ``(i, perm[i])``."""
    k = len(perm)
    out = np.zeros((k, k), dtype=np.int64)
    out[np.arange(k), np.asarray(perm, dtype=np.int64)] = 1
    return out


def rho(n: int, g: Mat2) -> np.ndarray:
    return perm_matrix(build_index_table(n).rho_perm(g))


def rho_tilde(n: int, g: Mat2) -> np.ndarray:
    return perm_matrix(build_index_table(n).rho_tilde_perm(g))


def h_matrix(n: int) -> np.ndarray:
    """``H_n`` with ``H_n rho(g) H_n^-1 == rho_tilde(g)``."""
    return perm_matrix(build_index_table(n).h_inverse)


def act(perm, vector):
    """Apply the permutation matrix of ``perm`` to a vector: ``out[i] = v[perm[i]]``."""
    return [vector[j] for j in perm]


# --------------------------------------------------------------------------
# projections and representative systems
# --------------------------------------------------------------------------

def sigma_project(n_from: int, n_to: int, i: int) -> int:
    if n_to < 1 or n_from % n_to:
        raise DomainError(f"{n_to} does not divide {n_from}")
    if n_to == n_from:
        return i
    e = build_index_table(n_from).entries[i]
    return build_index_table(n_to).ordinal_of_row(e.c, e.d)


@lru_cache(maxsize=None)
def sigma_map(n_from: int, n_to: int) -> tuple[int, ...]:
    """``sigma_project(n_from, n_to, i)`` for every ordinal ``i``."""
    if n_to < 1 or n_from % n_to:
        raise DomainError(f"{n_to} does not divide {n_from}")
    big = build_index_table(n_from)
    if n_to == n_from:
        return tuple(range(big.mu))
    small = build_index_table(n_to)
    return tuple(small.ordinal_of_row(e.c, e.d) for e in big.entries)


@lru_cache(maxsize=None)
def fibers(n_from: int, n_to: int) -> tuple[tuple[int, ...], ...]:
    """Preimages of each ordinal of I_{n_to} under ``sigma_map``."""
    out: list[list[int]] = [[] for _ in range(index_mu(n_to))]
    for i, j in enumerate(sigma_map(n_from, n_to)):
        out[j].append(i)
    return tuple(tuple(f) for f in out)


@dataclass(frozen=True)
class RepSystem:
    """Representatives of Gamma0(n m)\\Gamma0(n), labelled by ordinals of I_{nm}."""

    n: int
    m: int
    labels: tuple[int, ...]
    reps: tuple[Mat2, ...]

    def __len__(self) -> int:
        return len(self.reps)


@lru_cache(maxsize=None)
def rep_system(n: int, m: int) -> RepSystem:
    """Built from the fiber of I_{nm} over the identity coset of I_n.

    For ``j`` in that fiber, ``R_j^{nm} (R_0^{n})^-1`` lies in Gamma0(n),
    where ``R_0^{n}`` is the representative of the identity coset.
    """
    if n < 1 or m < 1:
        raise DomainError("n and m must be positive")
    small = build_index_table(n)
    big = build_index_table(n * m)
    k0 = small.ordinal_of_row(0, 1)
    base_inv = small.entries[k0].R.unimodular_inverse()
    labels = fibers(n * m, n)[k0]
    reps = tuple(big.entries[j].R @ base_inv for j in labels)
    if len(reps) != big.mu // small.mu:
        raise InvariantViolation(f"rep system ({n},{m}) has {len(reps)} members")
    for r in reps:
        if not in_gamma0(r, n):
            raise InvariantViolation(f"representative {r!r} is not in Gamma0({n})")
    if len({coset_key(n * m, r) for r in reps}) != len(reps):
        raise InvariantViolation(f"rep system ({n},{m}) is not disjoint")
    return RepSystem(n, m, labels, reps)


def bar_map(m: int, g: Mat2) -> Mat2:
    """``B_m g B_m^-1``, so that ``B_m g == bar_map(m, g) B_m``."""
    if m < 1:
        raise DomainError("m must be positive")
    if g.c % m:
        raise DomainError(f"bar_map({m}): lower-left entry {g.c}/{m} is not integral")
    out = Mat2(g.a, m * g.b, g.c // m, g.d)
    assert B(m) @ g == out @ B(m)
    return out
