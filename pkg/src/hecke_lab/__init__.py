"""Exact coset, period-function and Hecke-operator computations for Gamma0(n)."""
from .gl2 import Mat2, in_gamma0, hnf_decompose, coset_key
from .cosets import build_index_table, rep_system, index_mu
from .formal import FormalSum, SeedFunction, PeriodVector, lewis_check_function
from .stern import matrix_sets, k_orbit, farey_path, psi_vector, psi_total
from .hecke import (
    lift_period,
    t_tilde_apply,
    induce_old_vector,
    h_hat_coset_sum,
    verify_algebra,
)

__version__ = "0.1.0"

__all__ = [
    "Mat2",
    "in_gamma0",
    "hnf_decompose",
    "coset_key",
    "build_index_table",
    "rep_system",
    "index_mu",
    "FormalSum",
    "SeedFunction",
    "PeriodVector",
    "lewis_check_function",
    "matrix_sets",
    "k_orbit",
    "farey_path",
    "psi_vector",
    "psi_total",
    "lift_period",
    "t_tilde_apply",
    "induce_old_vector",
    "h_hat_coset_sum",
    "verify_algebra",
]
