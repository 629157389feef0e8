"""Hamiltonian ℓ-cycles in k-uniform hypergraphs: exact counts, brute-force
oracles and a constructive cycle sampler."""

from .formulas import c_k_ell, psi
from .graph import (EllCycle, EllPath, KGraph, PartiteView, canonical_cycle, min_codegree,
                    partite_min_codegree, validate_ell_cycle, validate_ell_path)
from .models import gen_binomial, gen_complete, gen_dirac
from .oracle import count_ham_ell_cycles, permanent
from .pipeline import sample_ham_cycles, solve_params

__version__ = "0.1.0"

__all__ = [
    "EllCycle", "EllPath", "KGraph", "PartiteView", "c_k_ell", "canonical_cycle",
    "count_ham_ell_cycles", "gen_binomial", "gen_complete", "gen_dirac", "min_codegree",
    "partite_min_codegree", "permanent", "psi",
    "sample_ham_cycles", "solve_params", "validate_ell_cycle", "validate_ell_path",
]
