"""Symbolic automata over ``M^n``: finite words, Büchi acceptance, complementation."""
from .buechi import (
    Lasso, SymbolicBuechi, buechi_accepts_lasso, buechi_find_lasso, buechi_intersect,
    buechi_is_empty, buechi_project, buechi_union, concat, empty_buechi, format_lasso,
    omega_power, parse_lasso, universal_buechi,
)
from .dot import to_dot, write_dot
from .io import format_aut, parse_aut, read_aut, write_aut
from .nfa import (
    SymbolicNFA, empty_nfa, epsilon_nfa, nfa_accepts, nfa_complement, nfa_determinize,
    nfa_intersect, nfa_is_empty, nfa_project, nfa_union, universal_nfa, word,
)
from .profiles import (
    ProfileMonoid, TransitionProfile, buechi_complement, buechi_equivalent, buechi_included,
    compute_profiles,
)
from .reduce import reduce

__all__ = [
    "SymbolicNFA", "SymbolicBuechi", "Lasso", "word", "universal_nfa", "empty_nfa",
    "epsilon_nfa", "nfa_accepts", "nfa_union", "nfa_intersect", "nfa_complement",
    "nfa_determinize", "nfa_project", "nfa_is_empty", "universal_buechi", "empty_buechi",
    "buechi_accepts_lasso", "buechi_is_empty", "buechi_find_lasso", "buechi_union",
    "buechi_intersect", "buechi_project", "concat", "omega_power", "format_lasso",
    "parse_lasso", "TransitionProfile", "ProfileMonoid", "compute_profiles",
    "buechi_complement", "buechi_included", "buechi_equivalent", "reduce",
    "format_aut", "parse_aut", "read_aut", "write_aut", "to_dot", "write_dot",
]
