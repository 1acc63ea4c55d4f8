"""Hecke-type operators between levels.

Two projections from I_{nm} are involved.  ``sigma_map(n*m, n)`` sends an
index to its coset for Gamma0(n); ``sigma_map(n*m, m)`` sends it to its coset
for Gamma0(m).  In the lift below the determinant of ``A_l K^j(A_s) A_i^-1``
must be 1, which forces ``s`` into I_m and ``l`` into I_n.

Period vectors are indexed by the matrices ``A_i`` (the rho-tilde
indexing).  ``induce_old_vector`` works in the coset indexing (rho) and is
compared with the lift through ``h_n`` and ``h_{nm}``.

Coset sums are multisets of canonical left cosets ``Gamma0(n) g``.  Products
of coset sums are formed from raw representative lists and canonicalized
only afterwards.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from gmpy2 import mpq

from .cosets import (
    InvariantViolation,
    build_index_table,
    fibers,
    index_mu,
    prime_factors,
    rep_system,
    sigma_map,
)
from .formal import FormalSum, PeriodVector, ZERO, nonzero_points_exact, slash_eval, total
from .gl2 import B, CosetKey, DomainError, Mat2, coset_key, hnf_decompose, scalar
from .stern import farey_path, k_orbit, x_sets


# --------------------------------------------------------------------------
# the l_{i,j} table and the lift
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftTable:
    n: int
    m: int
    sigma: tuple[int, ...]
    orbits: tuple[tuple[Mat2, ...], ...]
    l: tuple[tuple[int, ...], ...]
    witnesses: tuple[tuple[Mat2, ...], ...]

    def verify(self) -> bool:
        small = build_index_table(self.n)
        big = build_index_table(self.n * self.m)
        for i, row in enumerate(self.l):
            Ai = big.entries[i].A
            for j, l in enumerate(row):
                if small.entries[l].A @ self.orbits[i][j] != self.witnesses[i][j] @ Ai:
                    return False
                if self.witnesses[i][j].det != 1:
                    return False
        return True


@lru_cache(maxsize=None)
def lift_table(n: int, m: int) -> LiftTable:
    """For every i in I_{nm} and orbit position j, the unique l in I_n with
    ``A_l K^j(A_s) A_i^-1`` in SL(2,Z), where ``s = sigma_map(nm, m)[i]``."""
    if n < 1 or m < 1:
        raise DomainError("n and m must be positive")
    small = build_index_table(n)
    mid = build_index_table(m)
    big = build_index_table(n * m)
    sigma = sigma_map(n * m, m)
    orbits, ls, wits = [], [], []
    for i, e in enumerate(big.entries):
        orbit = k_orbit(mid.entries[sigma[i]].A).orbit
        row, wrow = [], []
        for K in orbit:
            hits = []
            for f in small.entries:
                gamma, A = hnf_decompose(f.A @ K)
                if A == e.A:
                    hits.append((f.ordinal, gamma))
            if len(hits) != 1:
                raise InvariantViolation(
                    f"index {i} of level {n * m}, orbit matrix {K!r}: {len(hits)} candidates in I_{n}"
                )
            row.append(hits[0][0])
            wrow.append(hits[0][1])
        orbits.append(orbit)
        ls.append(tuple(row))
        wits.append(tuple(wrow))
    return LiftTable(n, m, sigma, tuple(orbits), tuple(ls), tuple(wits))


def l_index(n: int, m: int, i: int, j: int) -> int:
    table = lift_table(n, m)
    row = table.l[i]
    if not 0 <= j < len(row):
        raise DomainError(f"orbit position {j} out of range 0..{len(row) - 1}")
    return row[j]


def lift_weights(n: int, m: int, weights) -> tuple[FormalSum, ...]:
    table = lift_table(n, m)
    return tuple(
        total(weights[l] @ K for l, K in zip(table.l[i], table.orbits[i]))
        for i in range(len(table.l))
    )


def _check_level(v: PeriodVector, n: int):
    if v.n != n:
        raise DomainError(f"vector has level {v.n}, expected {n}")


def lift_period(n: int, m: int, v: PeriodVector) -> PeriodVector:
    _check_level(v, n)
    if m == 1:
        return v
    return PeriodVector(n * m, v.seed, lift_weights(n, m, v.weights))


def project_weights(n: int, m: int, weights) -> tuple[FormalSum, ...]:
    return tuple(total(weights[i] for i in fib) for fib in fibers(n * m, n))


def project(n: int, m: int, v: PeriodVector) -> PeriodVector:
    """Level nm to level n: sum the components over each fiber."""
    _check_level(v, n * m)
    return PeriodVector(n, v.seed, project_weights(n, m, v.weights))


def inflate(n: int, m: int, v: PeriodVector) -> PeriodVector:
    """Level n to level nm: copy component ``sigma(i)`` into slot ``i``."""
    _check_level(v, n)
    sig = sigma_map(n * m, n)
    return PeriodVector(n * m, v.seed, tuple(v.weights[s] for s in sig))


def t_tilde_weights(n: int, m: int, weights) -> tuple[FormalSum, ...]:
    if m == 1:
        return tuple(weights)
    return project_weights(n, m, lift_weights(n, m, weights))


def t_tilde_apply(n: int, m: int, v: PeriodVector) -> PeriodVector:
    _check_level(v, n)
    return v.with_weights(t_tilde_weights(n, m, v.weights))


# --------------------------------------------------------------------------
# sigma_R, Phi_A and the induced old vector
# --------------------------------------------------------------------------

def sigma_phi_maps(level: int, j: int, A: Mat2) -> tuple[Mat2, int]:
    """``(sigma_R(A), Phi_A(j))`` for ``R = R_j`` at the given level.

    ``A R_j sigma_R(A)^-1`` lies in ``Gamma0(level) R_{Phi_A(j)}``.
    """
    if A.det <= 0:
        raise DomainError("A must have positive determinant")
    table = build_index_table(level)
    gamma, upper = hnf_decompose(A @ table.entries[j].R)
    return upper, table.ordinal_of_matrix(gamma)


def induce_old_weights(n: int, m: int, weights) -> tuple[FormalSum, ...]:
    """Old vector at level nm built from a level-n vector in coset indexing."""
    small = build_index_table(n)
    big_level = n * m
    sig = sigma_map(big_level, n)
    out = []
    for i in range(index_mu(big_level)):
        upper, phi = sigma_phi_maps(big_level, i, B(m))
        k = sig[phi]
        path = farey_path((upper.b, upper.d))
        acc = []
        for mr in path.matrices:
            perm = small.rho_perm(mr.unimodular_inverse())
            acc.append(weights[perm[k]] @ (mr @ upper))
        out.append(total(acc))
    return tuple(out)


def induce_old_vector(n: int, m: int, v: PeriodVector) -> PeriodVector:
    _check_level(v, n)
    if m == 1:
        return v
    return PeriodVector(n * m, v.seed, induce_old_weights(n, m, v.weights))


def to_coset_indexing(n: int, weights) -> tuple:
    """``u`` with ``u_k = w_{h(k)}``, i.e. ``H_n^-1 w``."""
    h = build_index_table(n).h
    return tuple(weights[h[k]] for k in range(len(h)))


def to_matrix_indexing(n: int, weights) -> tuple:
    """``w`` with ``w_{h(k)} = u_k``, i.e. ``H_n u``."""
    hinv = build_index_table(n).h_inverse
    return tuple(weights[hinv[i]] for i in range(len(hinv)))


# --------------------------------------------------------------------------
# coset sums
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CosetSum:
    level: int
    counts: Counter

    @classmethod
    def from_matrices(cls, n: int, mats: Iterable[Mat2], mult: int = 1) -> CosetSum:
        c: Counter = Counter()
        for g in mats:
            c[coset_key(n, g)] += mult
        return cls(n, c)

    def __add__(self, other: CosetSum) -> CosetSum:
        if self.level != other.level:
            raise DomainError("coset sums of different levels")
        return CosetSum(self.level, self.counts + other.counts)

    def __eq__(self, other) -> bool:
        return isinstance(other, CosetSum) and self.level == other.level and self.counts == other.counts

    def __hash__(self):
        return hash((self.level, frozenset(self.counts.items())))

    def size(self) -> int:
        return sum(self.counts.values())

    def determinants(self) -> set[int]:
        return {k.hnf.det for k in self.counts}

    def difference(self, other: CosetSum) -> tuple[Counter, Counter]:
        return self.counts - other.counts, other.counts - self.counts

    def to_dict(self) -> dict:
        items = sorted(self.counts.items())
        return {
            "level": str(self.level),
            "cosets": [
                {
                    "proj": [str(k.proj[0]), str(k.proj[1])],
                    "hnf": k.hnf.to_json(),
                    "multiplicity": str(v),
                }
                for k, v in items
            ],
        }

    @classmethod
    def from_dict(cls, data) -> CosetSum:
        level = int(data["level"])
        counts: Counter = Counter()
        for item in data["cosets"]:
            key = CosetKey(level, (int(item["proj"][0]), int(item["proj"][1])), Mat2.from_json(item["hnf"]))
            counts[key] += int(item["multiplicity"])
        return cls(level, counts)


def h_hat_raw(n: int, m: int) -> tuple[Mat2, ...]:
    """The matrices ``B_m R_j`` over the representatives of Gamma0(nm)\\Gamma0(n)."""
    Bm = B(m)
    return tuple(Bm @ r for r in rep_system(n, m).reps)


def h_hat_coset_sum(n: int, m: int) -> CosetSum:
    return CosetSum.from_matrices(n, h_hat_raw(n, m))


def h_hat_from_x_star(n: int, m: int) -> CosetSum:
    """``{Gamma0(n) A : A in X_m*}``; equals ``h_hat_coset_sum`` when gcd(n, m) = 1."""
    return CosetSum.from_matrices(n, x_sets(m)[1])


def raw_product(first: Iterable[Mat2], second: Iterable[Mat2]) -> list[Mat2]:
    second = list(second)
    return [x @ y for x in first for y in second]


def coset_sum_product(n: int, first: Iterable[Mat2], second: Iterable[Mat2]) -> CosetSum:
    """Cosets of ``x y`` over raw representative lists ``first`` and ``second``.

    With ``first = h_hat_raw(n, a)`` and ``second = h_hat_raw(n, b)`` this is
    the operator that applies H_{n,a} first and H_{n,b} second.
    """
    return CosetSum.from_matrices(n, raw_product(first, second))


# --------------------------------------------------------------------------
# relation verification
# --------------------------------------------------------------------------

@dataclass
class RelationReport:
    family: str
    params: dict
    passed: bool
    lhs_size: int = 0
    rhs_size: int = 0
    only_lhs: list = field(default_factory=list)
    only_rhs: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "status": "pass" if self.passed else "fail",
            "lhsSize": str(self.lhs_size),
            "rhsSize": str(self.rhs_size),
            "onlyLhs": [repr(k) for k in self.only_lhs],
            "onlyRhs": [repr(k) for k in self.only_rhs],
            "note": self.note,
        }


def _compare(family: str, params: dict, lhs: CosetSum, rhs: CosetSum) -> RelationReport:
    a, b = lhs.difference(rhs)
    return RelationReport(
        family, params, not a and not b, lhs.size(), rhs.size(), sorted(a.elements()), sorted(b.elements())
    )


def prime_power_relation(n: int, p: int, e: int) -> RelationReport:
    """``H_p H_{p^e}`` against the prime-power recursion, as coset sums."""
    if len(prime_factors(p)) != 1 or prime_factors(p)[0] != p:
        raise DomainError(f"{p} is not prime")
    if e < 1:
        raise DomainError("e must be at least 1")
    lhs = coset_sum_product(n, h_hat_raw(n, p), h_hat_raw(n, p ** e))
    rhs = h_hat_coset_sum(n, p ** (e + 1))
    pI = scalar(p)
    if n % p == 0:
        family = "divides"
    else:
        family = "coprime"
        mult = p + 1 if e == 1 else p
        rhs = rhs + CosetSum.from_matrices(n, [pI @ g for g in h_hat_raw(n, p ** (e - 1))], mult)
    return _compare(family, {"n": n, "p": p, "e": e}, lhs, rhs)


def multiplicative_relation(n: int, m: int, m2: int) -> RelationReport:
    if math.gcd(m, m2) != 1:
        raise DomainError(f"gcd({m}, {m2}) != 1")
    lhs = coset_sum_product(n, h_hat_raw(n, m), h_hat_raw(n, m2))
    return _compare("mult", {"n": n, "m": m, "m2": m2}, lhs, h_hat_coset_sum(n, m * m2))


def commutation_relation(n: int, a: int, b: int) -> RelationReport:
    lhs = coset_sum_product(n, h_hat_raw(n, a), h_hat_raw(n, b))
    rhs = coset_sum_product(n, h_hat_raw(n, b), h_hat_raw(n, a))
    return _compare("commute", {"n": n, "a": a, "b": b}, lhs, rhs)


def verify_algebra(n: int, relation: str, **params) -> RelationReport:
    """Dispatch on ``relation`` in {divides, coprime, mult, commute}."""
    if relation in ("divides", "coprime"):
        p, e = params["p"], params["e"]
        if (n % p == 0) != (relation == "divides"):
            raise DomainError(f"family {relation!r} does not apply to p={p}, n={n}")
        return prime_power_relation(n, p, e)
    if relation == "mult":
        return multiplicative_relation(n, params["m"], params["m2"])
    if relation == "commute":
        return commutation_relation(n, params["a"], params["b"])
    raise DomainError(f"unknown relation family {relation!r}")


def x_star_product(p_first: int, p_second: int) -> Counter:
    """Multiset of literal products ``A B`` with A in X*_{p_first}, B in X*_{p_second}."""
    return Counter(
        a @ b for a in x_sets(p_first)[1] for b in x_sets(p_second)[1]
    )


def x_star_product_expected(p: int, e: int) -> Counter:
    """Right-hand side of the X*-product decomposition for ``X_p* X_{p^e}*``."""
    pI = scalar(p)
    out = Counter(x_sets(p ** (e + 1))[1])
    if e == 1:
        out[pI] += 1
        for b in range(p):
            out[pI @ Mat2(1, b, 0, 1)] += 1
        return out
    for l in range(p):
        for x in x_sets(p ** (e - 1))[1]:
            out[pI @ Mat2(1, l, 0, 1) @ x] += 1
    return out


# --------------------------------------------------------------------------
# relations between the period-vector operators
# --------------------------------------------------------------------------

@dataclass
class TTildeRelationReport:
    n: int
    p: int
    e: int
    coefficient: int
    passed: bool
    failing_components: list[int]

    def to_dict(self) -> dict:
        return {
            "n": str(self.n),
            "p": str(self.p),
            "e": str(self.e),
            "coefficient": str(self.coefficient),
            "status": "pass" if self.passed else "fail",
            "failingComponents": [str(i) for i in self.failing_components],
        }


def recursion_coefficient(n: int, p: int, e: int) -> int:
    """Multiplicity of the lower term in ``T_p T_{p^e} = T_{p^{e+1}} + c T_{p^{e-1}}``.

    The operators sum over primitive matrices only, so the e = 1 product
    also picks up ``p I`` once beyond the p copies of ``p I T^b``.
    """
    if n % p == 0:
        return 0
    return p + 1 if e == 1 else p


def t_tilde_relation(v: PeriodVector, p: int, e: int, coefficient: int | None = None) -> TTildeRelationReport:
    """``T_p T_{p^e} v == T_{p^{e+1}} v + c T_{p^{e-1}} v`` by exact evaluation.

    ``c`` defaults to ``recursion_coefficient``.  Scalar matrices act
    trivially on functions so the ``pI`` factor drops out.
    """
    n = v.n
    if e < 1:
        raise DomainError("e must be at least 1")
    if coefficient is None:
        coefficient = recursion_coefficient(n, p, e)
    lhs = t_tilde_weights(n, p, t_tilde_weights(n, p ** e, v.weights))
    rhs_top = t_tilde_weights(n, p ** (e + 1), v.weights)
    rhs_low = t_tilde_weights(n, p ** (e - 1), v.weights) if coefficient else (ZERO,) * len(lhs)
    bad = []
    for i, (x, y, z) in enumerate(zip(lhs, rhs_top, rhs_low)):
        diff = x - y - coefficient * z
        if nonzero_points_exact(v.seed, diff):
            bad.append(i)
    return TTildeRelationReport(n, p, e, coefficient, not bad, bad)


def t_tilde_commutes(v: PeriodVector, a: int, b: int) -> bool:
    n = v.n
    x = t_tilde_weights(n, a, t_tilde_weights(n, b, v.weights))
    y = t_tilde_weights(n, b, t_tilde_weights(n, a, v.weights))
    return all(not nonzero_points_exact(v.seed, s - t) for s, t in zip(x, y))


def detect_eigenvalue(v: PeriodVector, w: PeriodVector):
    """Rational ``lam`` with ``w == lam v`` as functions, or None."""
    z0 = mpq(7, 3)
    lam = None
    for x, y in zip(v.weights, w.weights):
        vx = slash_eval(v.seed, x, z0)
        if vx != 0:
            lam = slash_eval(w.seed, y, z0) / vx
            break
    if lam is None:
        return None
    num, den = int(lam.numerator), int(lam.denominator)
    # compare den * w with num * v to stay inside integer formal sums
    for x, y in zip(v.weights, w.weights):
        if nonzero_points_exact(v.seed, y * den - x * num):
            return None
    return lam
