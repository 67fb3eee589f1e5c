"""Language-preserving size reduction: trimming and bisimulation quotients."""
from __future__ import annotations

from ..formula import disj
from .base import merge_parallel


def bisimulation_classes(A):
    """Coarsest forward bisimulation respecting acceptance.

    Two states are merged when they agree on acceptance and, for every
    block, the disjunction of their labels into that block simplifies to
    the same formula.  For finite structures simplification is canonical,
    so this is exact bisimilarity; elsewhere it may merge less.
    """
    theory = A.theory
    block = [1 if q in A.accepting else 0 for q in range(A.n_states)]
    while True:
        sigs = {}
        new = []
        for p in range(A.n_states):
            into = {}
            for f, q in A.out[p]:
                into.setdefault(block[q], []).append(f)
            sig = (block[p], frozenset((b, theory.simplify(disj(fs))) for b, fs in into.items()))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(block)):
            return new
        block = new


def quotient(A, block):
    order = {}
    for q in [A.initial] + list(range(A.n_states)):
        order.setdefault(block[q], len(order))
    cls = [order[block[q]] for q in range(A.n_states)]
    trans = [(cls[p], f, cls[q]) for p, f, q in A.transitions]
    return A.replace(states=len(order), initial=cls[A.initial],
                     accepting={cls[q] for q in A.accepting},
                     transitions=merge_parallel(A.theory, trans), names=None)


def reduce(A):
    """Trim, then merge bisimilar states (Büchi or finite-word)."""
    if A.kind == "nfa":
        from .nfa import trim
    else:
        from .buechi import trim
    A = trim(A)
    return trim(quotient(A, bisimulation_classes(A)))
