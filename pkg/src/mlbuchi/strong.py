"""Strong Büchi automata: transitions that also see the previous letter.

An interior transition ``(p, φ, q)`` has a label over ``x1..xn`` (the
current letter) and ``y1..yn`` (the previous one).  The first letter is
read by an initial transition ``(q0, φ(x), q)``.
"""
from __future__ import annotations

import itertools
from collections import deque

import networkx as nx

from .automata.base import Automaton, letter_vars, merge_parallel
from .automata.buechi import Lasso, SymbolicBuechi, normalize_lasso
from .automata.profiles import TransitionProfile
from .errors import ArityMismatch, NotFinite, WitnessUnsupported
from .formula import Const, Formula, substitute
from .syntax import format_formula


def prev_vars(arity):
    return tuple(f"y{i}" for i in range(1, arity + 1))


class StrongBuchi(Automaton):
    """Büchi automaton whose interior labels may mention ``y1..yn``.

    Parameters are those of :class:`~mlbuchi.automata.base.Automaton`
    plus ``initial_transitions``, a list of ``(q, φ(x1..xn))`` leaving the
    initial state on the first letter.
    """

    kind = "strong"

    def __init__(self, theory, arity, states, initial, accepting, initial_transitions,
                 transitions, names=None):
        super().__init__(theory, arity, states, initial, accepting, transitions, names)
        inits = {}
        allowed = set(letter_vars(self.arity))
        for q, f in initial_transitions:
            if not isinstance(f, Formula):
                raise TypeError(f"transition label {f!r} is not a formula")
            if f.free_vars - allowed:
                raise ArityMismatch(f"initial label {format_formula(f)} may only use x1..x{self.arity}")
            if not 0 <= int(q) < self.n_states:
                raise ValueError("initial transition target out of range")
            inits[(int(q), f)] = None
        self.initial_transitions = tuple(sorted(inits, key=lambda t: (t[0], format_formula(t[1]))))

    def _extra_vars(self):
        return prev_vars(self.arity)

    def replace(self, **kw):
        args = dict(theory=self.theory, arity=self.arity, states=self.n_states,
                    initial=self.initial, accepting=self.accepting,
                    initial_transitions=self.initial_transitions,
                    transitions=self.transitions, names=self.names)
        args.update(kw)
        return StrongBuchi(**args)

    def __eq__(self, other):
        return super().__eq__(other) and self.initial_transitions == other.initial_transitions

    def __hash__(self):
        return hash((super().__hash__(), self.initial_transitions))


def _env(arity, cur, prev=None):
    env = {f"x{i}": e for i, e in enumerate(cur, start=1)}
    if prev is not None:
        env.update({f"y{i}": e for i, e in enumerate(prev, start=1)})
    return env


def strong_step(A, p, cur, prev):
    """States reachable from ``p`` reading ``cur`` after ``prev`` (``None`` at the start)."""
    theory = A.theory
    if prev is None:
        if p != A.initial:
            return set()
        env = _env(A.arity, cur)
        return {q for q, f in A.initial_transitions if theory.evaluate(f, env)}
    env = _env(A.arity, cur, prev)
    return {q for f, q in A.out[p] if theory.evaluate(f, env)}


def strong_accepts_lasso(A, lasso):
    """Membership of ``stem · cycle^ω``.

    Positions are the stem followed by two copies of the cycle; the second
    copy loops onto itself, so every position has a fixed previous letter.
    """
    if not isinstance(lasso, Lasso):
        lasso = Lasso(*lasso)
    if lasso.arity != A.arity:
        raise ArityMismatch(f"lasso arity {lasso.arity} vs automaton arity {A.arity}")
    u, v = len(lasso.stem), len(lasso.cycle)
    n = u + 2 * v
    letters = [lasso.letter(i) for i in range(n)]

    def nxt(i):
        return i + 1 if i + 1 < n else u + v

    G = nx.DiGraph()
    start = ("init", 0)
    G.add_node(start)
    queue = deque()
    for q in strong_step(A, A.initial, letters[0], None):
        node = (q, nxt(0))
        G.add_edge(start, node)
        queue.append(node)
    seen = set(queue)
    while queue:
        p, i = queue.popleft()
        prev = letters[i - 1]
        for q in strong_step(A, p, letters[i], prev):
            node = (q, nxt(i))
            G.add_edge((p, i), node)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    for comp in nx.strongly_connected_components(G):
        if start in comp or not any(q in A.accepting for q, _ in comp):
            continue
        if len(comp) > 1 or any(G.has_edge(x, x) for x in comp):
            return True
    return False


def strong_to_buechi_finite(A):
    """Ordinary Büchi automaton remembering the previous letter in its state.

    States are ``(q0, ⊥)`` followed by ``Q × M^n`` (all of them, reachable
    or not); every transition reads one concrete letter, named by the
    conjunction of singleton predicates.
    """
    theory = A.theory
    if not getattr(theory, "is_finite", False):
        raise NotFinite(f"{theory.name} is not a finite structure")
    letters = list(itertools.product(theory.elements, repeat=A.arity))
    variables = letter_vars(A.arity)
    idx = {}
    names = ["q0,⊥"]
    for q in range(A.n_states):
        for a in letters:
            idx[(q, a)] = len(names)
            names.append(f"{q},{''.join(a) if A.arity == 1 else a}")
    trans = []
    for q, f in A.initial_transitions:
        for a in letters:
            if theory.evaluate(f, _env(A.arity, a)):
                trans.append((0, theory.letter_formula(a, variables), idx[(q, a)]))
    for p, f, q in A.transitions:
        for b in letters:
            for a in letters:
                if theory.evaluate(f, _env(A.arity, a, b)):
                    trans.append((idx[(p, b)], theory.letter_formula(a, variables), idx[(q, a)]))
    acc = [idx[(q, a)] for q in A.accepting for a in letters]
    return SymbolicBuechi(theory, A.arity, len(names), 0, acc, merge_parallel(theory, trans),
                          names=names)


def _candidate_letters(A, f, prev, limit):
    theory = A.theory
    if prev is not None:
        f = substitute(f, {f"y{i}": Const(e) for i, e in enumerate(prev, start=1)})
    return [tuple(env[v] for v in letter_vars(A.arity))
            for env in theory.witnesses(f, letter_vars(A.arity), limit=limit)]


class Unknown:
    """Result of a bounded search that found nothing (not a proof of emptiness)."""

    def __init__(self, bound, explored):
        self.bound = bound
        self.explored = explored

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Unknown(bound={self.bound}, explored={self.explored})"


def strong_bounded_nonemptiness(A, bound, letters_per_transition=1):
    """Search for an accepting lasso of total length at most ``bound``.

    Nodes are ``(state, previous letter)``; letters come from the theory's
    witness enumeration (``letters_per_transition`` per label and node).
    Returns a :class:`Lasso` or an :class:`Unknown`.
    """
    theory = A.theory
    if not theory.supports_witness:
        raise WitnessUnsupported(f"{theory.name} cannot enumerate letters")
    if bound <= 0:
        return Unknown(bound, 0)
    root = ("root", None)
    depth = {root: 0}
    G = nx.DiGraph()
    G.add_node(root)
    edge_letter = {}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        d = depth[node]
        # expanding depth ``bound`` closes cycles whose stem normalizes away
        if d > bound:
            continue
        p, prev = node
        if node is root:
            moves = [(q, f) for q, f in A.initial_transitions]
        else:
            moves = [(q, f) for f, q in A.out[p]]
        for q, f in moves:
            for a in _candidate_letters(A, f, prev, letters_per_transition):
                if q not in strong_step(A, A.initial if node is root else p, a, prev):
                    continue
                child = (q, a)
                if child not in depth:
                    depth[child] = d + 1
                    queue.append(child)
                G.add_edge(node, child)
                edge_letter[(node, child)] = a
    best = None
    for comp in nx.strongly_connected_components(G):
        if root in comp:
            continue
        sub = G.subgraph(comp)
        for node in sorted((n for n in comp if n[0] in A.accepting), key=lambda n: (depth[n], repr(n))):
            if sub.has_edge(node, node):
                cyc = [node, node]
            elif len(comp) > 1:
                cyc = None
                for succ in sub.successors(node):
                    back = nx.shortest_path(sub, succ, node)
                    if cyc is None or len(back) + 1 < len(cyc):
                        cyc = [node] + back
            else:
                continue
            path = nx.shortest_path(G, root, node)
            lasso = normalize_lasso(Lasso([edge_letter[(a, b)] for a, b in zip(path, path[1:])],
                                          [edge_letter[(a, b)] for a, b in zip(cyc, cyc[1:])]))
            total = len(lasso.stem) + len(lasso.cycle)
            if total <= bound and (best is None or total < best[0]):
                best = (total, lasso)
    if best is None:
        return Unknown(bound, len(depth))
    return best[1]


# -- strong profiles ------------------------------------------------------------


class StrongProfile(TransitionProfile):
    """Profile of the segment ``[i, j]`` of a fixed lasso, in context."""

    __slots__ = ("segment", "lasso")

    def __init__(self, I, J, segment=None, lasso=None):
        super().__init__(I, J)
        self.segment = segment
        self.lasso = lasso

    def __mul__(self, other):
        if isinstance(other, StrongProfile) and self.segment and other.segment:
            if self.lasso != other.lasso or self.segment[1] + 1 != other.segment[0]:
                raise ValueError("strong profiles compose only on adjacent segments of one word")
        base = TransitionProfile.__mul__(self, other)
        seg = None
        if self.segment and getattr(other, "segment", None):
            seg = (self.segment[0], other.segment[1])
        return StrongProfile(base.I, base.J, seg, self.lasso)


def strong_profile(A, lasso, i, j):
    """``tp_α([i, j])``: runs over positions ``i..j`` of the lasso word.

    Position ``0`` is read by initial transitions, so only pairs leaving
    the initial state exist for segments starting at ``0``.
    """
    n = A.n_states
    fmask = 0
    for q in A.accepting:
        fmask |= 1 << q
    I = [0] * n
    J = [0] * n
    for p in range(n):
        # frontier maps state -> visited-F flag
        cur = {p: p in A.accepting}
        for k in range(i, j + 1):
            prev = lasso.letter(k - 1) if k > 0 else None
            nxt = {}
            for s, seen in cur.items():
                for q in strong_step(A, s, lasso.letter(k), prev):
                    flag = seen or q in A.accepting
                    nxt[q] = nxt.get(q, False) or flag
            cur = nxt
        for q, seen in cur.items():
            I[p] |= 1 << q
            if seen:
                J[p] |= 1 << q
    return StrongProfile(I, J, (i, j), lasso)


__all__ = [
    "StrongBuchi", "strong_accepts_lasso", "strong_to_buechi_finite",
    "strong_bounded_nonemptiness", "Unknown", "StrongProfile", "strong_profile",
    "normalize_lasso", "prev_vars", "strong_step",
]
