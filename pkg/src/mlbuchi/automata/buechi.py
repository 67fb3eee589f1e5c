"""Büchi automata with formula labels: membership, closure, emptiness."""
from __future__ import annotations

from collections import deque

import networkx as nx

from ..errors import ArityMismatch, ConstantsUnsupported
from ..formula import TRUE, conj
from .base import (
    Automaton, as_word, check_compatible, letter_env, merge_parallel, reachable,
    renumber,
)
from .nfa import SymbolicNFA, _letters_for, product_transitions, project_labels, step


class SymbolicBuechi(Automaton):
    """Nondeterministic Büchi automaton over ``M^arity``."""

    kind = "buechi"


class Lasso:
    """The ultimately periodic word ``stem · cycle^ω``.

    ``stem`` and ``cycle`` are sequences of letter tuples; ``cycle`` must
    be nonempty.
    """

    __slots__ = ("stem", "cycle")

    def __init__(self, stem, cycle):
        stem = tuple(tuple(x) if isinstance(x, (tuple, list)) else (x,) for x in stem)
        cycle = tuple(tuple(x) if isinstance(x, (tuple, list)) else (x,) for x in cycle)
        if not cycle:
            raise ValueError("the cycle of a lasso must be nonempty")
        arities = {len(x) for x in stem + cycle}
        if len(arities) > 1:
            raise ArityMismatch("letters of a lasso have different arities")
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "cycle", cycle)

    def __setattr__(self, name, value):
        raise AttributeError("Lasso is immutable")

    @property
    def arity(self):
        return len(self.cycle[0])

    def __len__(self):
        return len(self.stem) + len(self.cycle)

    def letter(self, i):
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    def prefix(self, n):
        return tuple(self.letter(i) for i in range(n))

    def track(self, i):
        """The lasso of component ``i`` (1-based)."""
        return Lasso([x[i - 1] for x in self.stem], [x[i - 1] for x in self.cycle])

    def __eq__(self, other):
        return isinstance(other, Lasso) and (self.stem, self.cycle) == (other.stem, other.cycle)

    def __hash__(self):
        return hash((self.stem, self.cycle))

    def __repr__(self):
        return f"Lasso({format_lasso(self)!r})"


def format_letter(letter):
    if len(letter) == 1:
        return str(letter[0])
    return "(" + ",".join(map(str, letter)) + ")"


def format_lasso(lasso):
    stem = " ".join(format_letter(x) for x in lasso.stem)
    cycle = " ".join(format_letter(x) for x in lasso.cycle)
    return f"{stem} | {cycle}".strip() if stem else f"| {cycle}"


def parse_lasso(text, theory=None):
    """Read ``"stem | cycle"`` with space-separated letters such as ``(0,1)``."""
    if "|" not in text:
        raise ValueError("a lasso needs 'stem | cycle'")
    stem_text, cycle_text = text.split("|", 1)
    conv = theory.parse_element if theory is not None else (lambda s: s)

    def letters(part):
        out = []
        for tok in part.split():
            tok = tok.strip()
            if tok.startswith("(") and tok.endswith(")"):
                out.append(tuple(conv(s.strip()) for s in tok[1:-1].split(",")))
            else:
                out.append((conv(tok),))
        return out

    return Lasso(letters(stem_text), letters(cycle_text))


def normalize_lasso(lasso):
    """Shortest equivalent presentation: minimal cycle period, shortest stem."""
    stem, cycle = list(lasso.stem), list(lasso.cycle)
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    while stem and stem[-1] == cycle[-1]:
        stem.pop()
        cycle = [cycle[-1]] + cycle[:-1]
    return Lasso(stem, cycle)


def universal_buechi(theory, arity=1):
    return SymbolicBuechi(theory, arity, 1, 0, [0], [(0, TRUE, 0)])


def empty_buechi(theory, arity=1):
    return SymbolicBuechi(theory, arity, 1, 0, [], [])


# -- membership ---------------------------------------------------------------


def buechi_run_lasso(A, lasso):
    """Direct simulation: search the (state, position) graph of the lasso."""
    if lasso.arity != A.arity:
        raise ArityMismatch(f"lasso arity {lasso.arity} vs automaton arity {A.arity}")
    n = len(lasso)
    u = len(lasso.stem)
    G = nx.DiGraph()
    start = (A.initial, 0)
    G.add_node(start)
    queue = deque([start])
    while queue:
        p, i = queue.popleft()
        j = i + 1 if i + 1 < n else u
        for q in step(A, [p], lasso.letter(i)):
            node = (q, j)
            if node not in G:
                G.add_node(node)
                queue.append(node)
            G.add_edge((p, i), node)
    for comp in nx.strongly_connected_components(G):
        if not any(q in A.accepting for q, _ in comp):
            continue
        if len(comp) > 1:
            return True
        (node,) = comp
        if G.has_edge(node, node):
            return True
    return False


def lasso_automaton(theory, lasso):
    """Deterministic automaton accepting exactly the word of ``lasso``."""
    if not theory.supports_constants:
        raise ConstantsUnsupported(f"{theory.name} cannot name letters")
    n = len(lasso)
    u = len(lasso.stem)
    variables = [f"x{i}" for i in range(1, lasso.arity + 1)]
    trans = []
    for i in range(n):
        j = i + 1 if i + 1 < n else u
        trans.append((i, theory.letter_formula(lasso.letter(i), variables), j))
    return SymbolicBuechi(theory, lasso.arity, n, 0, range(n), trans)


def buechi_accepts_lasso(A, lasso, method="product"):
    """Whether ``stem · cycle^ω`` is accepted.

    ``method="product"`` intersects ``A`` with the lasso automaton and tests
    emptiness; ``method="direct"`` simulates runs on the lasso.
    """
    if not isinstance(lasso, Lasso):
        lasso = Lasso(*lasso)
    if lasso.arity != A.arity:
        raise ArityMismatch(f"lasso arity {lasso.arity} vs automaton arity {A.arity}")
    if method == "direct":
        return buechi_run_lasso(A, lasso)
    L = lasso_automaton(A.theory, lasso)
    return not buechi_is_empty(buechi_intersect(L, A))


# -- structural helpers -----------------------------------------------------------


def _graph(A, theory=None):
    theory = theory or A.theory
    G = nx.DiGraph()
    G.add_nodes_from(range(A.n_states))
    for p, f, q in A.transitions:
        if theory.is_satisfiable(f):
            G.add_edge(p, q)
    return G


def _good_sccs(A, G, nodes):
    sub = G.subgraph(nodes)
    for comp in nx.strongly_connected_components(sub):
        if not comp & A.accepting:
            continue
        if len(comp) > 1 or any(sub.has_edge(q, q) for q in comp):
            yield comp


def prune(A):
    """Drop useless transitions and states unreachable from the start."""
    trans = merge_parallel(A.theory, A.transitions)
    succ = [[] for _ in range(A.n_states)]
    for p, _, q in trans:
        succ[p].append(q)
    return renumber(A, reachable(A.n_states, A.initial, succ), transitions=trans)


def trim(A):
    """Keep only states lying on some accepting run."""
    A = prune(A)
    G = _graph(A)
    live = set()
    for comp in _good_sccs(A, G, range(A.n_states)):
        live |= comp
    if not live:
        return empty_buechi(A.theory, A.arity)
    R = G.reverse(copy=False)
    keep = set()
    for q in live:
        if q not in keep:
            keep |= nx.descendants(R, q) | {q}
    if A.initial not in keep:
        return empty_buechi(A.theory, A.arity)
    return renumber(A, keep)


def buechi_is_empty(A, witness=False):
    """Emptiness via SCCs of the useful-transition graph.

    With ``witness=True`` returns ``(empty, lasso)``; ``lasso`` is ``None``
    when empty or when the theory cannot produce concrete letters.
    """
    G = _graph(A)
    reach = nx.descendants(G, A.initial) | {A.initial}
    comp = next(iter(_good_sccs(A, G, reach)), None)
    if not witness:
        return comp is None
    if comp is None:
        return True, None
    f = min(comp & A.accepting)
    labels = {}
    for p, lab, q in A.transitions:
        if G.has_edge(p, q):
            labels.setdefault((p, q), lab)
    path = nx.shortest_path(G, A.initial, f)
    sub = G.subgraph(comp)
    if sub.has_edge(f, f):
        cycle = [f, f]
    else:
        best = None
        for nxt in sub.successors(f):
            back = nx.shortest_path(sub, nxt, f)
            if best is None or len(back) < len(best):
                best = [f] + back
        cycle = best
    stem_labels = [labels[(a, b)] for a, b in zip(path, path[1:])]
    cycle_labels = [labels[(a, b)] for a, b in zip(cycle, cycle[1:])]
    stem = _letters_for(A.theory, stem_labels, A.arity)
    cyc = _letters_for(A.theory, cycle_labels, A.arity)
    if stem is None or cyc is None:
        return False, None
    return False, normalize_lasso(Lasso(stem, cyc))


def buechi_find_lasso(A):
    return buechi_is_empty(A, witness=True)[1]


# -- closure constructions -----------------------------------------------------


def omega_power(U):
    """Büchi automaton for ``(L(U) \\ {ε})^ω``.

    A fresh initial state ``s`` copies the fan-out of ``U``'s start; every
    transition entering a final state is doubled by one returning to ``s``,
    which is the only accepting state.
    """
    off = 1
    trans = []
    for p, f, q in U.transitions:
        sources = [p + off] + ([0] if p == U.initial else [])
        for src in sources:
            trans.append((src, f, q + off))
            if q in U.accepting:
                trans.append((src, f, 0))
    A = SymbolicBuechi(U.theory, U.arity, U.n_states + 1, 0, [0], trans)
    return prune(A)


def concat(U, K):
    """Büchi automaton for ``L(U) · L(K)``."""
    check_compatible(U, K)
    off = U.n_states
    trans = []
    for p, f, q in U.transitions:
        trans.append((p, f, q))
        if q in U.accepting:
            trans.append((p, f, K.initial + off))
    for p, f, q in K.transitions:
        trans.append((p + off, f, q + off))
        if p == K.initial and U.initial in U.accepting:
            trans.append((U.initial, f, q + off))
    acc = [q + off for q in K.accepting]
    A = SymbolicBuechi(U.theory, U.arity, U.n_states + K.n_states, U.initial, acc, trans)
    return prune(A)


def buechi_union(A, B):
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
    return prune(SymbolicBuechi(A.theory, A.arity, boff + B.n_states, 0, acc, trans))


def is_weak(A):
    """Every cycle lies entirely among accepting or entirely among rejecting states."""
    G = nx.DiGraph()
    G.add_nodes_from(range(A.n_states))
    G.add_edges_from((p, q) for p, _, q in A.transitions)
    for comp in nx.strongly_connected_components(G):
        if len(comp) == 1:
            (p,) = comp
            if not G.has_edge(p, p):
                continue
        if len({p in A.accepting for p in comp}) > 1:
            return False
    return True


def saturate_accepting(A):
    """Mark whole SCCs accepting when every cycle through them meets ``F``.

    A run that settles in such an SCC cannot avoid ``F`` forever, so the
    language is unchanged; the result passes :func:`is_weak` more often.
    """
    G = nx.DiGraph()
    G.add_nodes_from(range(A.n_states))
    G.add_edges_from((p, q) for p, _, q in A.transitions)
    acc = set(A.accepting)
    for comp in nx.strongly_connected_components(G):
        if not comp & acc or comp <= acc:
            continue
        rest = G.subgraph(comp - acc)
        if nx.is_directed_acyclic_graph(rest):
            acc |= comp
    if acc == set(A.accepting):
        return A
    return A.replace(accepting=sorted(acc))


def buechi_intersect(A, B):
    """Two-flag product: flag 0 waits for ``F_A``, flag 1 waits for ``F_B``.

    When either side is weak the flags are unnecessary: its runs eventually
    stay accepting, so ``F_A × F_B`` recurring is the right condition.
    """
    check_compatible(A, B)
    theory = A.theory
    A, B = saturate_accepting(A), saturate_accepting(B)
    if is_weak(A) or is_weak(B):
        def pexpand(s):
            p, q = s
            for f, p2 in A.out[p]:
                for g, q2 in B.out[q]:
                    yield conj(f, g), (p2, q2)

        order, _, trans = product_transitions(theory, (A.initial, B.initial), pexpand)
        acc = [i for i, (p, q) in enumerate(order) if p in A.accepting and q in B.accepting]
        return SymbolicBuechi(theory, A.arity, len(order), 0, acc, merge_parallel(theory, trans),
                              names=[f"{p},{q}" for p, q in order])

    def expand(s):
        p, q, flag = s
        if flag == 0:
            nflag = 1 if p in A.accepting else 0
        else:
            nflag = 0 if q in B.accepting else 1
        for f, p2 in A.out[p]:
            for g, q2 in B.out[q]:
                yield conj(f, g), (p2, q2, nflag)

    order, _, trans = product_transitions(theory, (A.initial, B.initial, 0), expand)
    acc = [i for i, (p, q, flag) in enumerate(order) if flag == 0 and p in A.accepting]
    return SymbolicBuechi(theory, A.arity, len(order), 0, acc, merge_parallel(theory, trans),
                          names=[f"{p},{q},{flag}" for p, q, flag in order])


def buechi_project(A, component):
    trans = project_labels(A, component)
    return prune(A.replace(arity=A.arity - 1, transitions=trans))


def as_nfa(A):
    return SymbolicNFA(A.theory, A.arity, A.n_states, A.initial, A.accepting, A.transitions,
                       names=A.names)


def as_buechi(A):
    return SymbolicBuechi(A.theory, A.arity, A.n_states, A.initial, A.accepting, A.transitions,
                          names=A.names)


__all__ = [
    "SymbolicBuechi", "Lasso", "format_lasso", "parse_lasso", "format_letter",
    "universal_buechi", "empty_buechi", "normalize_lasso", "buechi_run_lasso", "lasso_automaton",
    "buechi_accepts_lasso", "buechi_is_empty", "buechi_find_lasso", "omega_power",
    "concat", "buechi_union", "buechi_intersect", "buechi_project", "prune", "trim",
    "as_nfa", "as_buechi", "letter_env", "as_word", "is_weak", "saturate_accepting",
]
