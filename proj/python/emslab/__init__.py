"""Identity-based key agreement lab.

Big integers are plain Python ints. Library failures raise ``Error`` with
``args == (kind, message, leaked_factor_or_None)``.
"""

import json

from ._emslab import (
    HASH_POLICY,
    Error,
    brute_force_solve,
    compose,
    hash_to_jacobi_one,
    is_probable_prime,
    jacobi,
    parse_transcript,
    run_session,
    setup,
    solve,
    solve_reporting_leaks,
    sqrt_mod_prime,
)
from . import _emslab

__all__ = [
    "HASH_POLICY",
    "Error",
    "brute_force_solve",
    "compose",
    "hash_to_jacobi_one",
    "is_probable_prime",
    "jacobi",
    "oracle_check",
    "parse_transcript",
    "run_repair_probe",
    "run_resiliency_experiment",
    "run_scaling_bench",
    "run_session",
    "setup",
    "solve",
    "solve_reporting_leaks",
    "sqrt_mod_prime",
]


def run_resiliency_experiment(modulus_bits, ell, seed, leak_index):
    return json.loads(_emslab.run_resiliency_experiment(modulus_bits, ell, seed, leak_index))


def run_repair_probe(modulus_bits, ell, seed, sessions):
    return json.loads(_emslab.run_repair_probe(modulus_bits, ell, seed, sessions))


def oracle_check(n):
    return json.loads(_emslab.oracle_check(n))


def run_scaling_bench(sizes, ell, seed, sessions_per_size):
    return json.loads(_emslab.run_scaling_bench(list(sizes), ell, seed, sessions_per_size))
