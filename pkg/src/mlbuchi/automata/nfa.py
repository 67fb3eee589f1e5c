"""Finite-word symbolic automata and their boolean closure."""
from __future__ import annotations

from collections import deque

from ..errors import ArityMismatch
from ..formula import TRUE, disj
from .base import (
    Automaton, as_word, check_compatible, letter_env, merge_parallel, reachable,
    renumber, shift_down, useful,
)


class SymbolicNFA(Automaton):
    """Nondeterministic automaton on finite words over ``M^arity``."""

    kind = "nfa"


Word = tuple


def word(*letters):
    """Build a word; bare elements become 1-tuples."""
    return tuple(x if isinstance(x, tuple) else (x,) for x in letters)


def universal_nfa(theory, arity=1):
    return SymbolicNFA(theory, arity, 1, 0, [0], [(0, TRUE, 0)])


def empty_nfa(theory, arity=1):
    return SymbolicNFA(theory, arity, 1, 0, [], [])


def epsilon_nfa(theory, arity=1):
    """Accepts only the empty word."""
    return SymbolicNFA(theory, arity, 1, 0, [0], [])


def step(A, states, letter):
    """Successor set after reading one concrete letter."""
    env = letter_env(A.arity, letter)
    out = set()
    for p in states:
        for f, q in A.out[p]:
            if q not in out and A.theory.evaluate(f, env):
                out.add(q)
    return out


def nfa_accepts(A, w):
    """Whether the finite word ``w`` (sequence of letter tuples) is accepted."""
    w = as_word(w, A.arity)
    current = {A.initial}
    for letter in w:
        current = step(A, current, letter)
        if not current:
            return False
    return bool(current & A.accepting)


def prune(A):
    """Drop unsatisfiable transitions and states unreachable from the start."""
    trans = merge_parallel(A.theory, A.transitions)
    succ = [[] for _ in range(A.n_states)]
    for p, _, q in trans:
        succ[p].append(q)
    keep = reachable(A.n_states, A.initial, succ)
    return renumber(A, keep, transitions=trans)


def trim(A):
    """:func:`prune` plus removal of states that cannot reach an accepting state."""
    A = prune(A)
    pred = [[] for _ in range(A.n_states)]
    for p, _, q in A.transitions:
        pred[q].append(p)
    live = set()
    for f in A.accepting:
        live |= reachable(A.n_states, f, pred)
    if A.initial not in live:
        return empty_nfa(A.theory, A.arity)
    return renumber(A, live)


def nfa_union(A, B):
    """Disjoint sum with a fresh start state copying both initial fan-outs."""
    check_compatible(A, B)
    boff = 1 + A.n_states
    trans = []
    for p, f, q in A.transitions:
        trans.append((p + 1, f, q + 1))
        if p == A.initial:
            trans.append((0, f, q + 1))
    for p, f, q in B.transitions:
        trans.append((p + boff, f, q + boff))
        if p == B.initial:
            trans.append((0, f, q + boff))
    acc = [q + 1 for q in A.accepting] + [q + boff for q in B.accepting]
    if A.initial in A.accepting or B.initial in B.accepting:
        acc.append(0)
    return prune(SymbolicNFA(A.theory, A.arity, 1 + A.n_states + B.n_states, 0, acc, trans))


def product_transitions(theory, start, expand):
    """Explore a product from ``start``; ``expand(state)`` yields ``(label, succ)``.

    Returns ``(order, index, transitions)`` with labels already pruned.
    """
    index = {start: 0}
    order = [start]
    trans = []
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for f, t in expand(s):
            if not useful(theory, f):
                continue
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
            trans.append((index[s], f, index[t]))
    return order, index, trans


def nfa_intersect(A, B):
    """Synchronous product; conjunctions whose label is unsatisfiable are dropped."""
    check_compatible(A, B)
    theory = A.theory

    def expand(s):
        p, q = s
        for f, p2 in A.out[p]:
            for g, q2 in B.out[q]:
                yield theory.simplify(f & g), (p2, q2)

    order, index, trans = product_transitions(theory, (A.initial, B.initial), expand)
    acc = [i for i, (p, q) in enumerate(order) if p in A.accepting and q in B.accepting]
    return SymbolicNFA(theory, A.arity, len(order), 0, acc, merge_parallel(theory, trans),
                       names=[f"{p},{q}" for p, q in order])


def determinize(A):
    """Subset construction over local minterms; result is complete.

    Returns ``(order, transitions)`` where ``order`` lists the subsets
    (frozensets of ``A``'s states) in discovery order.
    """
    theory = A.theory
    start = frozenset([A.initial])
    index = {start: 0}
    order = [start]
    trans = []
    queue = deque([start])
    while queue:
        S = queue.popleft()
        edges = [e for p in sorted(S) for e in A.out[p]]
        labels = list(dict.fromkeys(f for f, _ in edges))
        targets = {}
        for J, psi in theory.mintermize(labels):
            chosen = {labels[j - 1] for j in J}
            T = frozenset(q for f, q in edges if f in chosen)
            targets.setdefault(T, []).append(psi)
        for T in sorted(targets, key=lambda s: sorted(s)):
            if T not in index:
                index[T] = len(order)
                order.append(T)
                queue.append(T)
            label = theory.simplify(disj(targets[T]))
            trans.append((index[S], label, index[T]))
    return order, trans


def nfa_complement(A):
    """Deterministic complete automaton for the complement language."""
    order, trans = determinize(A)
    acc = [i for i, S in enumerate(order) if not (S & A.accepting)]
    names = ["{" + ",".join(map(str, sorted(S))) + "}" for S in order]
    return SymbolicNFA(A.theory, A.arity, len(order), 0, acc, trans, names=names)


def nfa_determinize(A):
    order, trans = determinize(A)
    acc = [i for i, S in enumerate(order) if S & A.accepting]
    names = ["{" + ",".join(map(str, sorted(S))) + "}" for S in order]
    return SymbolicNFA(A.theory, A.arity, len(order), 0, acc, trans, names=names)


def project_labels(A, component):
    if not 1 <= component <= A.arity:
        raise ArityMismatch(f"component {component} out of range 1..{A.arity}")
    if A.arity == 1:
        raise ArityMismatch("projecting the last component would leave an empty alphabet")
    var = f"x{component}"
    return [(p, shift_down(A.theory.project(f, var), component), q)
            for p, f, q in A.transitions]


def nfa_project(A, component):
    """Existentially quantify letter component ``component`` (1-based)."""
    trans = project_labels(A, component)
    return prune(A.replace(arity=A.arity - 1, transitions=trans))


def _letters_for(theory, labels, arity):
    """One concrete letter per label, or ``None`` if witnesses are unavailable."""
    variables = [f"x{i}" for i in range(1, arity + 1)]
    out = []
    for f in labels:
        env = theory.witness(f, variables)
        if env is None:
            return None
        out.append(tuple(env[v] for v in variables))
    return out


def nfa_is_empty(A, witness=False):
    """Emptiness over useful transitions.

    With ``witness=True`` returns ``(empty, word)`` where ``word`` is an
    accepted word (or ``None`` when empty or witnesses are unsupported).
    """
    theory = A.theory
    parent = {A.initial: None}
    queue = deque([A.initial])
    found = A.initial if A.initial in A.accepting else None
    while queue and found is None:
        p = queue.popleft()
        for f, q in A.out[p]:
            if q in parent or not useful(theory, f):
                continue
            parent[q] = (p, f)
            if q in A.accepting:
                found = q
                break
            queue.append(q)
    empty = found is None
    if not witness:
        return empty
    if empty:
        return True, None
    labels = []
    q = found
    while parent[q] is not None:
        p, f = parent[q]
        labels.append(f)
        q = p
    labels.reverse()
    letters = _letters_for(theory, labels, A.arity)
    return False, (None if letters is None else tuple(letters))


__all__ = [
    "SymbolicNFA", "Word", "word", "universal_nfa", "empty_nfa", "epsilon_nfa",
    "nfa_accepts", "nfa_union", "nfa_intersect", "nfa_complement", "nfa_determinize",
    "nfa_project", "nfa_is_empty", "prune", "trim", "step",
]
