"""State-graph skeleton shared by finite-word and Büchi automata.

States are dense integers ``0..n-1``.  A transition is a triple
``(source, label, target)`` whose label is a :class:`~mlbuchi.formula.Formula`
over the letter variables ``x1..xn``.
"""
from __future__ import annotations

from collections import defaultdict

from ..errors import ArityMismatch, TheoryMismatch
from ..formula import FALSE, Formula, disj, rename, var_key
from ..syntax import format_formula


def letter_vars(arity):
    return tuple(f"x{i}" for i in range(1, arity + 1))


def letter_env(arity, letter):
    letter = tuple(letter)
    if len(letter) != arity:
        raise ArityMismatch(f"letter {letter!r} has arity {len(letter)}, expected {arity}")
    return {f"x{i}": e for i, e in enumerate(letter, start=1)}


class Automaton:
    """Immutable state graph with formula labels.

    Parameters
    ----------
    theory : Theory
    arity : int
        Letters are ``arity``-tuples of structure elements.
    states : int
        Number of states.
    initial : int
    accepting : iterable of int
    transitions : iterable of ``(p, label, q)``
    names : optional sequence of printable state names
    """

    kind = "abstract"

    def __init__(self, theory, arity, states, initial, accepting, transitions, names=None):
        self.theory = theory
        self.arity = int(arity)
        self.n_states = int(states)
        self.initial = int(initial)
        self.accepting = frozenset(int(q) for q in accepting)
        allowed = set(letter_vars(self.arity)) | set(self._extra_vars())
        trans = {}
        for p, f, q in transitions:
            if not isinstance(f, Formula):
                raise TypeError(f"transition label {f!r} is not a formula")
            if f.free_vars - allowed:
                extra = sorted(f.free_vars - allowed, key=var_key)
                raise ArityMismatch(f"label {format_formula(f)} mentions {extra}")
            trans[(int(p), f, int(q))] = None
        self.transitions = tuple(sorted(trans, key=lambda t: (t[0], t[2], format_formula(t[1]))))
        self.names = tuple(names) if names is not None else None
        if not 0 <= self.initial < max(self.n_states, 1) or self.n_states < 1:
            raise ValueError("initial state out of range")
        if any(not 0 <= q < self.n_states for q in self.accepting):
            raise ValueError("accepting state out of range")
        if any(not (0 <= p < self.n_states and 0 <= q < self.n_states) for p, _, q in self.transitions):
            raise ValueError("transition endpoint out of range")
        self._out = None

    def _extra_vars(self):
        return ()

    @property
    def variables(self):
        return letter_vars(self.arity)

    @property
    def out(self):
        """``out[p]`` lists ``(label, q)`` for transitions leaving ``p``."""
        if self._out is None:
            out = [[] for _ in range(self.n_states)]
            for p, f, q in self.transitions:
                out[p].append((f, q))
            self._out = out
        return self._out

    def replace(self, **kw):
        args = dict(theory=self.theory, arity=self.arity, states=self.n_states,
                    initial=self.initial, accepting=self.accepting,
                    transitions=self.transitions, names=self.names)
        args.update(kw)
        return type(self)(**args)

    def state_name(self, q):
        return str(self.names[q]) if self.names else str(q)

    def __eq__(self, other):
        return (type(self) is type(other) and self.theory.name == other.theory.name
                and self.arity == other.arity and self.n_states == other.n_states
                and self.initial == other.initial and self.accepting == other.accepting
                and self.transitions == other.transitions)

    def __hash__(self):
        return hash((type(self).__name__, self.arity, self.n_states, self.initial,
                     self.accepting, self.transitions))

    def __repr__(self):
        return (f"<{type(self).__name__} {self.theory.name} arity={self.arity} "
                f"states={self.n_states} transitions={len(self.transitions)}>")


# -- small helpers used by the constructions --------------------------------


def check_compatible(a, b):
    if a.theory is not b.theory and a.theory.name != b.theory.name:
        raise TheoryMismatch(f"{a.theory.name} vs {b.theory.name}")
    if a.arity != b.arity:
        raise ArityMismatch(f"arity {a.arity} vs {b.arity}")


def useful(theory, f):
    """A transition is useful when its label is satisfiable."""
    return theory.is_satisfiable(f)


def merge_parallel(theory, transitions):
    """Join labels of parallel edges and drop unsatisfiable ones."""
    grouped = defaultdict(list)
    for p, f, q in transitions:
        grouped[(p, q)].append(f)
    out = []
    for (p, q), fs in grouped.items():
        f = fs[0] if len(fs) == 1 else theory.simplify(disj(fs))
        if f != FALSE and useful(theory, f):
            out.append((p, f, q))
    return out


def renumber(A, keep, initial=None, accepting=None, transitions=None):
    """Restrict ``A`` to the states in ``keep`` (order preserved)."""
    keep = sorted(keep)
    idx = {q: i for i, q in enumerate(keep)}
    init = A.initial if initial is None else initial
    acc = A.accepting if accepting is None else accepting
    trans = A.transitions if transitions is None else transitions
    names = [A.names[q] for q in keep] if A.names else None
    return A.replace(
        states=len(keep), initial=idx[init],
        accepting=[idx[q] for q in acc if q in idx],
        transitions=[(idx[p], f, idx[q]) for p, f, q in trans if p in idx and q in idx],
        names=names,
    )


def reachable(n, initial, succ):
    seen = {initial}
    stack = [initial]
    while stack:
        p = stack.pop()
        for q in succ[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def rename_tracks(f, mapping):
    """Rename letter variables by index: ``mapping[i] = j`` sends ``xi`` to ``xj``."""
    return rename(f, {f"x{i}": f"x{j}" for i, j in mapping.items()})


def shift_down(f, removed):
    """Renumber ``x_{i}`` to ``x_{i-1}`` for all ``i > removed``."""
    names = sorted((v for v in f.free_vars if v.startswith("x")), key=var_key)
    mapping = {}
    for v in names:
        i = int(v[1:])
        if i > removed:
            mapping[v] = f"x{i - 1}"
    return rename(f, mapping)


def as_letter(x, arity):
    """Accept bare elements for arity-1 letters."""
    if isinstance(x, (tuple, list)):
        letter = tuple(x)
    else:
        letter = (x,)
    if len(letter) != arity:
        raise ArityMismatch(f"letter {letter!r} has arity {len(letter)}, expected {arity}")
    return letter


def as_word(w, arity):
    return tuple(as_letter(x, arity) for x in w)


__all__ = [
    "Automaton", "letter_vars", "letter_env", "check_compatible", "useful",
    "merge_parallel", "renumber", "reachable", "rename_tracks", "shift_down",
    "as_letter", "as_word",
]
