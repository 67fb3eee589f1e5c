"""Cheap complements for weak or deterministic Büchi automata.

An automaton is *weak* when every cycle stays inside accepting states or
inside rejecting ones.  A run is then accepting iff it eventually stays
among accepting states, i.e. it visits the rejecting states finitely
often (co-Büchi acceptance).  The breakpoint construction determinizes
that condition, and flipping it gives a deterministic Büchi complement.
"""
from __future__ import annotations

from collections import deque

from ..formula import TRUE, conj, disj, neg
from .buechi import SymbolicBuechi, is_weak, prune, saturate_accepting


def weak_complement(A):
    """Deterministic Büchi automaton for the complement of a weak ``A``.

    States are pairs ``(S, O)``: ``S`` the states reachable so far, ``O ⊆ S``
    those reached along runs that avoided rejecting states since the last
    breakpoint (``O = ∅``).  Complement runs see infinitely many breakpoints.
    """
    A = prune(A)
    theory = A.theory
    good = A.accepting
    start = (frozenset([A.initial]), frozenset())
    index = {start: 0}
    order = [start]
    trans = []
    queue = deque([start])
    while queue:
        S, O = queue.popleft()
        edges = [(f, p, q) for p in sorted(S) for f, q in A.out[p]]
        labels = list(dict.fromkeys(f for f, _, _ in edges))
        targets = {}
        for J, psi in theory.mintermize(labels):
            chosen = {labels[j - 1] for j in J}
            S2 = frozenset(q for f, _, q in edges if f in chosen)
            src = O if O else S
            O2 = frozenset(q for f, p, q in edges if f in chosen and p in src and q in good)
            targets.setdefault((S2, O2), []).append(psi)
        for T in sorted(targets, key=lambda t: (sorted(t[0]), sorted(t[1]))):
            if T not in index:
                index[T] = len(order)
                order.append(T)
                queue.append(T)
            trans.append((index[(S, O)], theory.simplify(disj(targets[T])), index[T]))
    acc = [i for i, (_, O) in enumerate(order) if not O]
    names = ["{" + ",".join(map(str, sorted(S))) + "|" + ",".join(map(str, sorted(O))) + "}"
             for S, O in order]
    return SymbolicBuechi(theory, A.arity, len(order), 0, acc, trans, names=names)


def is_deterministic(A):
    theory = A.theory
    for p in range(A.n_states):
        out = A.out[p]
        for i, (f, q) in enumerate(out):
            for g, r in out[i + 1:]:
                if theory.is_satisfiable(conj(f, g)):
                    return False
    return True


def complete(A):
    """Add a rejecting sink for the letters no transition reads."""
    theory = A.theory
    sink = A.n_states
    trans = list(A.transitions)
    for p in range(A.n_states):
        rest = neg(disj([f for f, _ in A.out[p]]))
        if theory.is_satisfiable(rest):
            trans.append((p, theory.simplify(rest), sink))
    if len(trans) == len(A.transitions):
        return A
    trans.append((sink, TRUE, sink))
    return SymbolicBuechi(theory, A.arity, A.n_states + 1, A.initial, A.accepting, trans)


def deterministic_complement(A):
    """Complement of a deterministic ``A``.

    Weak inputs just swap accepting and rejecting states.  Otherwise the
    result guesses the point after which the unique run avoids accepting
    states: a copy of ``A`` followed by an accepting copy restricted to
    rejecting states.
    """
    A = complete(A)
    n = A.n_states
    rejecting = [q for q in range(n) if q not in A.accepting]
    if is_weak(A):
        return A.replace(accepting=rejecting, names=None)
    trans = list(A.transitions)
    for p, f, q in A.transitions:
        if q not in A.accepting:
            trans.append((p, f, n + q))
            if p not in A.accepting:
                trans.append((n + p, f, n + q))
    return SymbolicBuechi(A.theory, A.arity, 2 * n, A.initial, [n + q for q in rejecting], trans)


def complement_by_shape(A, fallback):
    """Pick the cheapest applicable complement; ``fallback(A)`` handles the general case.

    Returns ``(automaton, method)``.
    """
    A = saturate_accepting(A)
    if is_deterministic(A):
        return deterministic_complement(A), "deterministic"
    if is_weak(A):
        return weak_complement(A), "breakpoint"
    return fallback(A), "ramsey"


__all__ = [
    "is_weak", "weak_complement", "is_deterministic", "complete", "deterministic_complement",
    "complement_by_shape",
]
