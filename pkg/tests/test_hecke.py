import random
from collections import Counter
from math import gcd

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from hecke_lab.cosets import build_index_table, index_mu, rep_system, sigma_map
from hecke_lab.formal import (
    FormalSum,
    PeriodVector,
    SeedFunction,
    constant_vector,
    lewis_check_function,
    slash_eval,
)
from hecke_lab.gl2 import B, DomainError, I, Mat2, coset_key, hnf_decompose, scalar
from hecke_lab.hecke import (
    CosetSum,
    coset_sum_product,
    detect_eigenvalue,
    h_hat_coset_sum,
    h_hat_from_x_star,
    h_hat_raw,
    induce_old_vector,
    inflate,
    l_index,
    lift_period,
    lift_table,
    project,
    recursion_coefficient,
    sigma_phi_maps,
    t_tilde_apply,
    t_tilde_commutes,
    t_tilde_relation,
    to_coset_indexing,
    verify_algebra,
    x_star_product,
    x_star_product_expected,
)
from hecke_lab.stern import matrix_sets, psi_vector, x_sets

INV = SeedFunction.inverse_z()


def psi_period(n, seed=INV):
    return PeriodVector(n, seed, psi_vector(n))


def brute_l(n, m, i, j):
    """Scan I_n for A_l K^j(A_s) A_i^-1 in SL(2,Z) by exact rational division."""
    big, mid, small = build_index_table(n * m), build_index_table(m), build_index_table(n)
    s = sigma_map(n * m, m)[i]
    orbit = [mid.entries[s].A]
    while orbit[-1].b != 0:
        a, b, c, d = orbit[-1]
        q = -(-d // b)
        orbit.append(Mat2(q * a - c, q * b - d, a, b))
    Ai = big.entries[i].A
    hits = []
    for f in small.entries:
        q = f.A @ orbit[j] @ Ai.adj()
        if all(x % Ai.det == 0 for x in q) and Mat2(*(x // Ai.det for x in q)).det == 1:
            hits.append(f.ordinal)
    return hits


def test_l_index_fixtures():
    assert l_index(1, 1, 0, 0) == 0
    big, small = build_index_table(4), build_index_table(2)
    i = big.ordinal_of_pair(1, 1)
    assert l_index(2, 2, i, 0) == small.ordinal_of_pair(1, 0)
    assert l_index(2, 2, i, 1) == small.ordinal_of_pair(2, 0)
    table = lift_table(2, 2)
    assert table.witnesses[i] == (I, Mat2(4, -1, 1, 0))
    with pytest.raises(DomainError):
        l_index(2, 2, i, 5)


@pytest.mark.parametrize("n, m", [(1, 2), (2, 2), (2, 3), (3, 2), (4, 3), (1, 6), (5, 2), (3, 3)])
def test_l_index_matches_brute_force(n, m):
    table = lift_table(n, m)
    assert table.verify()
    for i, row in enumerate(table.l):
        for j, l in enumerate(row):
            assert brute_l(n, m, i, j) == [l]


def test_lift_from_level_one_is_the_orbit_vector():
    v = constant_vector(1, INV)
    assert lift_period(1, 2, v).weights == psi_vector(2)
    assert lift_period(1, 1, v) is v


@pytest.mark.parametrize("n, m", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_lift_output_solves_the_equation(n, m):
    for seed in (INV, SeedFunction.eisenstein(2)):
        assert lewis_check_function(n * m, lift_period(n, m, psi_period(n, seed))).passed


def test_project_and_inflate():
    v = constant_vector(1, INV)
    assert inflate(1, 1, v) == v and project(1, 1, v) == v
    up = inflate(1, 2, v)
    assert up.weights == (FormalSum.one(),) * 3
    assert lewis_check_function(2, up).passed
    down = project(1, 2, lift_period(1, 2, v))
    assert slash_eval(INV, down.weights[0], mpq(5, 7)) == 3 / mpq(5, 7)
    with pytest.raises(DomainError):
        project(1, 2, v)
    for n, m in ((2, 2), (2, 3), (3, 2)):
        w = psi_period(n * m)
        assert lewis_check_function(n, project(n, m, w)).passed
        assert lewis_check_function(n * m, inflate(n, m, psi_period(n))).passed


def test_identity_operator():
    v = psi_period(4)
    assert t_tilde_apply(4, 1, v) == v


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_operators_scale_inverse_z_by_p_plus_one(p):
    v = constant_vector(1, INV)
    w = t_tilde_apply(1, p, v)
    assert detect_eigenvalue(v, w) == p + 1
    assert w.weights[0] == FormalSum.of(*matrix_sets(p).S)


def test_index_four_operator_on_inverse_z():
    v = constant_vector(1, INV)
    w = t_tilde_apply(1, 4, v)
    # every K-orbit sum fixes 1/z, and there are index_mu(4) = 6 of them
    assert detect_eigenvalue(v, w) == 6 == index_mu(4)


def test_eisenstein_eigenvalues_are_rational():
    v = constant_vector(1, SeedFunction.eisenstein(2))
    assert detect_eigenvalue(v, t_tilde_apply(1, 3, v)) == mpq(28, 3)
    assert detect_eigenvalue(v, t_tilde_apply(1, 2, v)) == mpq(9, 2)


def test_detect_eigenvalue_rejects_non_eigenvectors():
    v = psi_period(2)
    w = v.with_weights((v.weights[0] * 2, v.weights[1], v.weights[2]))
    assert detect_eigenvalue(v, w) is None


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("m", range(2, 5))
def test_operator_output_solves_the_equation(n, m):
    for seed in (INV, SeedFunction.eisenstein(1), SeedFunction.eisenstein(2)):
        assert lewis_check_function(n, t_tilde_apply(n, m, psi_period(n, seed))).passed


def test_h_hat_fixtures():
    assert h_hat_coset_sum(5, 1) == CosetSum.from_matrices(5, [I])
    assert h_hat_coset_sum(1, 2) == h_hat_from_x_star(1, 2)
    assert h_hat_coset_sum(1, 2).size() == 3
    assert h_hat_coset_sum(2, 2).size() == 2


@pytest.mark.parametrize("n, m", [(n, m) for n in range(1, 9) for m in range(1, 9) if gcd(n, m) == 1])
def test_coprime_h_hat_is_the_primitive_set(n, m):
    assert h_hat_coset_sum(n, m) == h_hat_from_x_star(n, m)
    assert set(h_hat_coset_sum(n, m).counts.values()) == {1}


def test_coset_product_fixtures():
    prod = coset_sum_product(1, h_hat_raw(1, 2), h_hat_raw(1, 2))
    assert prod.size() == 9
    expected = CosetSum.from_matrices(1, x_sets(4)[1]) + CosetSum.from_matrices(1, [scalar(2)], 3)
    assert prod == expected
    assert coset_sum_product(2, h_hat_raw(2, 2), h_hat_raw(2, 2)) == h_hat_coset_sum(2, 4)
    assert coset_sum_product(2, h_hat_raw(2, 2), h_hat_raw(2, 2)).size() == 4
    p = coset_sum_product(1, h_hat_raw(1, 2), h_hat_raw(1, 3))
    assert p.size() == 12 and p == h_hat_coset_sum(1, 6)


def test_coset_sum_json_round_trip():
    for n, m in ((1, 4), (3, 2), (6, 5)):
        s = h_hat_coset_sum(n, m)
        assert CosetSum.from_dict(s.to_dict()) == s


def test_coset_sums_of_different_levels_do_not_add():
    with pytest.raises(DomainError):
        h_hat_coset_sum(1, 2) + h_hat_coset_sum(2, 2)


@pytest.mark.parametrize("n, p, e", [(1, 2, 1), (1, 2, 2), (1, 3, 3), (3, 2, 2), (2, 2, 1), (2, 2, 3), (6, 3, 2), (5, 5, 1)])
def test_prime_power_relations(n, p, e):
    family = "divides" if n % p == 0 else "coprime"
    assert verify_algebra(n, family, p=p, e=e).passed


def test_relation_arguments_are_checked():
    with pytest.raises(DomainError):
        verify_algebra(2, "coprime", p=2, e=1)
    with pytest.raises(DomainError):
        verify_algebra(2, "mult", m=2, m2=4)
    with pytest.raises(DomainError):
        verify_algebra(2, "associate")


@given(st.integers(1, 6), st.integers(2, 6), st.integers(2, 6))
def test_operators_commute(n, a, b):
    assert verify_algebra(n, "commute", a=a, b=b).passed


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("e", [1, 2, 3, 4])
def test_x_star_products(p, e):
    assert x_star_product(p, p**e) == x_star_product_expected(p, e)


def test_x_star_product_first_case_by_hand():
    prod = x_star_product(2, 2)
    extra = prod - Counter(x_sets(4)[1])
    assert extra == Counter({scalar(2): 2, scalar(2) @ Mat2(1, 1, 0, 1): 1})


def test_recursion_coefficients():
    assert recursion_coefficient(1, 2, 1) == 3
    assert recursion_coefficient(1, 2, 2) == 2
    assert recursion_coefficient(4, 2, 1) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("e", [1, 2])
def test_operator_recursion_on_orbit_vectors(n, p, e):
    for seed in (INV, SeedFunction.eisenstein(1)):
        assert t_tilde_relation(psi_period(n, seed), p, e).passed


def test_operator_commutation_on_vectors():
    v = psi_period(3, SeedFunction.eisenstein(1))
    assert t_tilde_commutes(v, 2, 5)


def test_sigma_phi_fixtures():
    for j in range(build_index_table(6).mu):
        assert sigma_phi_maps(6, j, I) == (I, j)
    table = build_index_table(2)
    i = table.ordinal_of_pair(1, 0)
    upper, _ = sigma_phi_maps(2, i, B(2))
    assert upper == Mat2(1, 1, 0, 2) == table.entries[table.h[i]].A
    for i in range(3):
        upper, phi = sigma_phi_maps(2, i, B(2))
        assert lift_table(1, 2).l[table.h[i]][0] == build_index_table(1).h[sigma_map(2, 1)[phi]]


@given(st.integers(1, 12), st.integers(1, 6), st.data())
def test_sigma_phi_relation(level, m, data):
    j = data.draw(st.integers(0, index_mu(level) - 1))
    A = data.draw(st.sampled_from(x_sets(m)[0]))
    upper, phi = sigma_phi_maps(level, j, A)
    table = build_index_table(level)
    lhs = A @ table.entries[j].R @ upper.adj()
    g = Mat2(*(x // upper.det for x in lhs))
    assert all(x % upper.det == 0 for x in lhs)
    assert coset_key(level, g) == coset_key(level, table.entries[phi].R)


@pytest.mark.parametrize("n, m", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (1, 6), (4, 3)])
def test_induced_old_vector_equals_permuted_lift(n, m):
    v = psi_period(n)
    induced = induce_old_vector(n, m, v.with_weights(to_coset_indexing(n, v.weights)))
    assert induced.weights == to_coset_indexing(n * m, lift_period(n, m, v).weights)


def test_induce_identity():
    v = psi_period(3)
    assert induce_old_vector(3, 1, v) == v


@pytest.mark.parametrize("n, m", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_coset_sums_ignore_representative_choice(n, m):
    rng = random.Random(n * 100 + m)
    gens = [Mat2(1, 1, 0, 1), Mat2(1, -1, 0, 1), Mat2(1, 0, n * m, 1), Mat2(-1, 0, 0, -1)]
    ref = h_hat_coset_sum(n, m)
    for _ in range(10):
        reps = []
        for r in rep_system(n, m).reps:
            g = I
            for _ in range(6):
                g = g @ rng.choice(gens)
            reps.append(B(m) @ g @ r)
        assert CosetSum.from_matrices(n, reps) == ref
