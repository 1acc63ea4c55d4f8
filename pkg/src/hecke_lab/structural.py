"""Exhaustive and randomized checks of the structural identities relating
index tables, representative systems, the lift indices and coset sums.

Every check returns a ``CheckResult``; none raises on a failed identity.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .cosets import (
    bar_map,
    build_index_table,
    divisors,
    index_mu,
    rep_system,
    sigma_map,
)
from .gl2 import B, GroupSpec, Mat2, T, S, T_PRIME, coset_key, hnf_decompose, in_gamma0, membership
from .hecke import (
    CosetSum,
    coset_sum_product,
    h_hat_raw,
    lift_table,
    sigma_phi_maps,
)
from .stern import farey_path


@dataclass
class CheckResult:
    passed: bool
    cases: int
    failures: list

    @classmethod
    def collect(cls, cases: int, failures: list) -> CheckResult:
        return cls(not failures, cases, failures[:20])


def factor_pairs(limit: int):
    for N in range(1, limit + 1):
        for n in divisors(N):
            yield n, N // n


def random_gamma0(rng: random.Random, n: int, length: int = 6) -> Mat2:
    """A bounded random word in (1 1; 0 1)^+-1, (1 0; n 1)^+-1 and -I."""
    gens = [T, Mat2(1, -1, 0, 1), Mat2(1, 0, n, 1), Mat2(1, 0, -n, 1), Mat2(-1, 0, 0, -1)]
    g = Mat2(1, 0, 0, 1)
    for _ in range(rng.randint(1, length)):
        g = g @ rng.choice(gens)
    return g


def random_sl2z(rng: random.Random, length: int = 6) -> Mat2:
    return random_gamma0(rng, 1, length) @ (S if rng.random() < 0.5 else T_PRIME)


# --------------------------------------------------------------------------
# index tables
# --------------------------------------------------------------------------

def check_index_formula(n_max: int = 60) -> CheckResult:
    bad = [n for n in range(1, n_max + 1) if build_index_table(n).mu != index_mu(n)]
    return CheckResult.collect(n_max, bad)


def check_class_bijection(n_max: int = 60) -> CheckResult:
    """Pairs map injectively onto all primitive points of the projective line."""
    from math import gcd

    from .gl2 import canonical_pair

    bad = []
    for n in range(1, n_max + 1):
        table = build_index_table(n)
        classes = {
            canonical_pair(x, y, n)
            for x in range(n)
            for y in range(n)
            if gcd(gcd(x, y), n) == 1
        } if n > 1 else {(0, 0)}
        if set(table.ordinal_of_class) != classes:
            bad.append(n)
    return CheckResult.collect(n_max, bad)


def check_h_bijective(n_max: int = 60) -> CheckResult:
    bad = [n for n in range(1, n_max + 1) if sorted(build_index_table(n).h) != list(range(index_mu(n)))]
    if build_index_table(1).h != (0,):
        bad.append(1)
    return CheckResult.collect(n_max, bad)


def check_h_sigma(limit: int = 60) -> CheckResult:
    """``h_n(sigma(i)) == sigma(h_{nm}(i))`` for the projection to level n."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        big, small = build_index_table(n * m), build_index_table(n)
        sig = sigma_map(n * m, n)
        for i in range(big.mu):
            cases += 1
            if small.h[sig[i]] != sig[big.h[i]]:
                bad.append((n, m, i))
    return CheckResult.collect(cases, bad)


def check_rho_equivalence(n_max: int = 12, words: int = 100, seed: int = 0) -> CheckResult:
    """Homomorphism property of rho, and rho == H^-1 rho-tilde H on generators and words."""
    rng = random.Random(seed)
    bad, cases = [], 0
    for n in range(1, n_max + 1):
        table = build_index_table(n)
        h = table.h
        tests = [T, S, T_PRIME] + [random_sl2z(rng) for _ in range(words)]
        for g in tests:
            cases += 1
            p, pt = table.rho_perm(g), table.rho_tilde_perm(g)
            if any(pt[h[i]] != h[p[i]] for i in range(table.mu)):
                bad.append(("equivalence", n, g))
        for _ in range(words):
            g1, g2 = random_sl2z(rng), random_sl2z(rng)
            p1, p2, p12 = table.rho_perm(g1), table.rho_perm(g2), table.rho_perm(g1 @ g2)
            cases += 1
            if any(p12[i] != p2[p1[i]] for i in range(table.mu)):
                bad.append(("homomorphism", n, g1, g2))
    return CheckResult.collect(cases, bad)


def check_lemma_fr(n_max: int = 60) -> CheckResult:
    """``sigma_{R_i}(B_n) == A_{h_n(i)}``."""
    bad, cases = [], 0
    for n in range(1, n_max + 1):
        table = build_index_table(n)
        for i in range(table.mu):
            cases += 1
            if sigma_phi_maps(n, i, B(n))[0] != table.entries[table.h[i]].A:
                bad.append((n, i))
    return CheckResult.collect(cases, bad)


# --------------------------------------------------------------------------
# lift indices
# --------------------------------------------------------------------------

def check_factorization_uniqueness(limit: int = 60) -> CheckResult:
    """Every A_i of level nm factors as ``gamma A_j A_k`` for exactly one pair (j, k)."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        small, mid, big = build_index_table(n), build_index_table(m), build_index_table(n * m)
        counts = Counter(hnf_decompose(a.A @ b.A)[1] for a in small.entries for b in mid.entries)
        for e in big.entries:
            cases += 1
            if counts[e.A] != 1:
                bad.append((n, m, e.pair, counts[e.A]))
    return CheckResult.collect(cases, bad)


def check_lift_tables(limit: int = 60) -> CheckResult:
    """Every lift index exists, is unique and carries a verified SL(2,Z) witness."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        cases += 1
        try:
            if not lift_table(n, m).verify():
                bad.append((n, m))
        except AssertionError as exc:
            bad.append((n, m, str(exc)))
    return CheckResult.collect(cases, bad)


def check_common_divisor(limit: int = 36, shifts: int = 3) -> CheckResult:
    """Distinct pairs with ``A1 B1 == T^k A2 B2`` give a non-primitive product."""
    from .stern import x_sets

    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        buckets: dict = {}
        for a in x_sets(n)[1]:
            for b in x_sets(m)[1]:
                c = a @ b
                buckets.setdefault((c.a, c.d, c.b % c.d), []).append((a, b, c))
        for group in buckets.values():
            for x in range(len(group)):
                for y in range(len(group)):
                    if x == y:
                        continue
                    (a1, b1, c1), (a2, b2, c2) = group[x], group[y]
                    if abs(c1.b - c2.b) > shifts * c1.d:
                        continue
                    cases += 1
                    if c1.content() == 1:
                        bad.append((a1, b1, a2, b2))
    return CheckResult.collect(cases, bad)


def check_orbit_selection(limit: int = 36) -> CheckResult:
    """``rho-tilde(m_s^-1)`` sends ``l_{j,0}`` to ``l_{j,s-1}`` along the Farey path of ``A_sigma(j) 0``."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        small, mid = build_index_table(n), build_index_table(m)
        lt = lift_table(n, m)
        sm = sigma_map(n * m, m)
        for j, row in enumerate(lt.l):
            A = mid.entries[sm[j]].A
            for s, ms in enumerate(farey_path((A.b, A.d)).matrices, 1):
                cases += 1
                if small.rho_tilde_perm(ms.unimodular_inverse())[row[0]] != row[s - 1]:
                    bad.append((n, m, j, s))
    return CheckResult.collect(cases, bad)


def check_kronecker_form(limit: int = 36) -> CheckResult:
    """The entry ``[rho-tilde(m_s^-1)]_{l_{j,0}, l_{j,r}}`` equals ``[s == r + 1]`` for every j, s, r."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        small, mid = build_index_table(n), build_index_table(m)
        lt = lift_table(n, m)
        sm = sigma_map(n * m, m)
        for j, row in enumerate(lt.l):
            A = mid.entries[sm[j]].A
            for s, ms in enumerate(farey_path((A.b, A.d)).matrices, 1):
                perm = small.rho_tilde_perm(ms.unimodular_inverse())
                for r, l in enumerate(row):
                    cases += 1
                    if (perm[row[0]] == l) != (s == r + 1):
                        bad.append((n, m, j, s, r))
    return CheckResult.collect(cases, bad)


def check_lemma_la(limit: int = 36) -> CheckResult:
    """``l_{h(i),0} == h_n(sigma(Phi_{B_m}(i)))`` and ``A_{sigma(h(i))} == sigma_{R_i}(B_m)``."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        small, mid, big = build_index_table(n), build_index_table(m), build_index_table(n * m)
        lt = lift_table(n, m)
        sn, sm = sigma_map(n * m, n), sigma_map(n * m, m)
        for i in range(big.mu):
            cases += 1
            upper, phi = sigma_phi_maps(n * m, i, B(m))
            hi = big.h[i]
            if lt.l[hi][0] != small.h[sn[phi]] or mid.entries[sm[hi]].A != upper:
                bad.append((n, m, i))
    return CheckResult.collect(cases, bad)


def check_lemma_bnbm(limit: int = 36) -> CheckResult:
    """``B_n B_m R_i`` lies in ``SL(2,Z) A_{h_n(sigma(Phi_{B_m}(i)))} sigma_{R_i}(B_m)``."""
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        small, big = build_index_table(n), build_index_table(n * m)
        sn = sigma_map(n * m, n)
        for i in range(big.mu):
            cases += 1
            upper, phi = sigma_phi_maps(n * m, i, B(m))
            target = small.entries[small.h[sn[phi]]].A @ upper
            if hnf_decompose(B(n) @ B(m) @ big.entries[i].R)[1] != hnf_decompose(target)[1]:
                bad.append((n, m, i))
    return CheckResult.collect(cases, bad)


# --------------------------------------------------------------------------
# subgroups and representative systems
# --------------------------------------------------------------------------

def check_b7(n_max: int = 12, samples: int = 200, seed: int = 0) -> CheckResult:
    """For coprime n, m: g in Gamma0(n) with ``B_m g B_m^-1`` in Gamma0(n, m) lies in Gamma0(nm)."""
    from math import gcd

    rng = random.Random(seed)
    bad, cases = [], 0
    for n in range(1, n_max + 1):
        for m in range(1, n_max + 1):
            if gcd(n, m) != 1:
                continue
            for _ in range(samples // n_max):
                g = random_gamma0(rng, n)
                if rng.random() < 0.5:
                    g = g @ random_gamma0(rng, n * m)
                if g.c % m:
                    continue
                cases += 1
                if membership(bar_map(m, g), GroupSpec.gamma0(n, m)) and not in_gamma0(g, n * m):
                    bad.append((n, m, g))
    return CheckResult.collect(cases, bad)


def _is_rep_system(reps, n_small: int, n_big: int) -> bool:
    if len(reps) * index_mu(n_small) != index_mu(n_big):
        return False
    if not all(in_gamma0(r, n_small) for r in reps):
        return False
    return len({coset_key(n_big, r) for r in reps}) == len(reps)


def check_rep_systems(limit: int = 60) -> CheckResult:
    bad, cases = [], 0
    for n, m in factor_pairs(limit):
        cases += 1
        if not _is_rep_system(rep_system(n, m).reps, n, n * m):
            bad.append((n, m))
    return CheckResult.collect(cases, bad)


def check_bar_images(n_max: int = 6, p_set=(2, 3, 5), e_max: int = 2, m_max: int = 6) -> CheckResult:
    """Bar images of representatives for one index pair represent the smaller pair."""
    from math import gcd

    bad, cases = [], 0
    for n in range(1, n_max + 1):
        for p in p_set:
            # the prime case needs p | n
            for e in range(1, e_max + 1 if n % p == 0 else 1):
                cases += 1
                reps = [bar_map(p, r) for r in rep_system(p * n, p ** e).reps]
                if not _is_rep_system(reps, n, p ** e * n):
                    bad.append(("prime", n, p, e))
        for m in range(1, m_max + 1):
            for m2 in range(1, m_max + 1):
                if gcd(m, m2) != 1 or n * m * m2 > 120:
                    continue
                cases += 1
                reps = [bar_map(m, r) for r in rep_system(m * n, m2).reps]
                if not _is_rep_system(reps, n, m2 * n):
                    bad.append(("coprime", n, m, m2))
    return CheckResult.collect(cases, bad)


def check_representative_independence(configs=None, rechoices: int = 10, seed: int = 0) -> CheckResult:
    """Coset sums and their products do not depend on the chosen representatives."""
    rng = random.Random(seed)
    configs = configs or [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (4, 2), (5, 3), (6, 5)]
    bad, cases = [], 0
    for n, m in configs:
        base = h_hat_raw(n, m)
        ref = CosetSum.from_matrices(n, base)
        other = h_hat_raw(n, 2)
        ref_prod = coset_sum_product(n, base, other)
        for _ in range(rechoices):
            cases += 1
            moved = [random_gamma0(rng, n * m) @ g for g in rep_system(n, m).reps]
            raw = [B(m) @ r for r in moved]
            if CosetSum.from_matrices(n, raw) != ref:
                bad.append(("sum", n, m))
            other_moved = [B(2) @ random_gamma0(rng, 2 * n) @ r for r in rep_system(n, 2).reps]
            if coset_sum_product(n, raw, other_moved) != ref_prod:
                bad.append(("product", n, m))
    return CheckResult.collect(cases, bad)


# --------------------------------------------------------------------------
# Farey paths and the K map
# --------------------------------------------------------------------------

def check_farey_k_coherence(n_max: int = 60) -> CheckResult:
    """``K^l(A) == m_{l+1} A`` along the path of ``A 0`` and ``k_A == L - 1`` for A in X_n."""
    from fractions import Fraction

    from .stern import is_farey_chain, k_orbit, x_sets

    bad, cases = [], 0
    for n in range(1, n_max + 1):
        for A in x_sets(n)[0]:
            cases += 1
            path = farey_path(Fraction(A.b, A.d))
            orbit = k_orbit(A).orbit
            if len(orbit) != path.L or not is_farey_chain(path):
                bad.append((A, "length"))
                continue
            if any(K != m @ A for K, m in zip(orbit, path.matrices)):
                bad.append((A, "matrices"))
    return CheckResult.collect(cases, bad)


def check_psi_total(primes=(2, 3, 5, 7, 11, 13)) -> CheckResult:
    """The total of the level-m orbit sums is the sum over S_m, as multisets."""
    from .formal import FormalSum
    from .stern import matrix_sets, psi_total

    bad = [m for m in primes if psi_total(m) != FormalSum.of(*matrix_sets(m).S)]
    return CheckResult.collect(len(primes), bad)


def check_x_star_products(p_set=(2, 3, 5), e_max: int = 4) -> CheckResult:
    from .hecke import x_star_product, x_star_product_expected

    bad, cases = [], 0
    for p in p_set:
        for e in range(1, e_max + 1):
            cases += 1
            if x_star_product(p, p ** e) != x_star_product_expected(p, e):
                bad.append((p, e))
    return CheckResult.collect(cases, bad)
