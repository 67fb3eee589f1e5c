"""Brute-force reference implementations used by the tests.

Nothing here calls into the automata or logic layers of the package.
Labels are carried twice, as a formula for the library and as a Python
predicate for the oracle, and chain sentences are evaluated on an
explicitly enumerated finite part of the tree.
"""
import itertools
import random

from mlbuchi.automata import Lasso, SymbolicBuechi, SymbolicNFA
from mlbuchi.formula import And, Atom, Bottom, Const, Exists, Forall, Implies, Not, Or, Shift, Top, Var
from mlbuchi.logic.chain import Sibling
from mlbuchi.strong import StrongBuchi
from mlbuchi.syntax import parse_formula
from mlbuchi.theory import binary_structure

M2 = ("0", "1")

# (text, predicate on the letter tuple)
LABELS_1 = [
    ("true", lambda a: True),
    ("R0(x1)", lambda a: a[0] == "0"),
    ("R1(x1)", lambda a: a[0] == "1"),
]

LABELS_2 = [
    ("true", lambda a: True),
    ("R0(x1)", lambda a: a[0] == "0"),
    ("R1(x2)", lambda a: a[1] == "1"),
    ("x1 = x2", lambda a: a[0] == a[1]),
    ("~x1 = x2", lambda a: a[0] != a[1]),
    ("R1(x1) & R0(x2)", lambda a: a == ("1", "0")),
]

# strong labels see the current letter x1 and the previous one y1
STRONG_LABELS = [
    ("true", lambda a, b: True),
    ("x1 = y1", lambda a, b: a == b),
    ("~x1 = y1", lambda a, b: a != b),
    ("R0(x1)", lambda a, b: a[0] == "0"),
    ("R1(y1)", lambda a, b: b[0] == "1"),
    ("R1(x1) & R0(y1)", lambda a, b: a[0] == "1" and b[0] == "0"),
]


class Explicit:
    """An automaton as plain data: ``trans`` holds ``(p, predicate, q)``."""

    def __init__(self, n, initial, accepting, trans, init=None):
        self.n = n
        self.initial = initial
        self.accepting = set(accepting)
        self.trans = trans
        self.init = init or []


def random_automaton(rng, kind="buechi", max_states=3, arity=1, theory=None, density=0.45):
    """A random library automaton paired with its explicit twin."""
    theory = theory or binary_structure()
    labels = LABELS_1 if arity == 1 else LABELS_2
    n = rng.randint(1, max_states)
    acc = [q for q in range(n) if rng.random() < 0.4] or [rng.randrange(n)]
    trans = []
    for p in range(n):
        for q in range(n):
            if rng.random() < density:
                text, pred = rng.choice(labels)
                trans.append((p, text, pred, q))
    cls = SymbolicNFA if kind == "nfa" else SymbolicBuechi
    A = cls(theory, arity, n, 0, acc, [(p, parse_formula(t), q) for p, t, _, q in trans])
    return A, Explicit(n, 0, acc, [(p, pred, q) for p, _, pred, q in trans])


def random_strong(rng, max_states=3, theory=None):
    theory = theory or binary_structure()
    n = rng.randint(2, max_states + 1)
    acc = [q for q in range(1, n) if rng.random() < 0.5] or [n - 1]
    init = []
    for q in range(1, n):
        if rng.random() < 0.6:
            text, pred = rng.choice(LABELS_1)
            init.append((q, text, pred))
    trans = []
    for p in range(1, n):
        for q in range(1, n):
            if rng.random() < 0.5:
                text, pred = rng.choice(STRONG_LABELS)
                trans.append((p, text, pred, q))
    A = StrongBuchi(theory, 1, n, 0, acc, [(q, parse_formula(t)) for q, t, _ in init],
                    [(p, parse_formula(t), q) for p, t, _, q in trans])
    E = Explicit(n, 0, acc, [(p, pred, q) for p, _, pred, q in trans],
                 init=[(q, pred) for q, _, pred in init])
    return A, E


# -- membership ------------------------------------------------------------------


def nfa_member(E, w):
    states = {E.initial}
    for a in w:
        states = {q for p, pred, q in E.trans if p in states and pred(a)}
    return bool(states & E.accepting)


def _accepting_cycle(succ, start, accepting):
    """Is some accepting node reachable from ``start`` and on a cycle?"""
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for y in succ(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    for x in seen:
        if not accepting(x):
            continue
        inner, stack = set(), list(succ(x))
        while stack:
            y = stack.pop()
            if y == x:
                return True
            if y not in inner:
                inner.add(y)
                stack.extend(succ(y))
    return False


def buechi_member(E, stem, cycle):
    stem, cycle = list(stem), list(cycle)
    u, v = len(stem), len(cycle)
    word = stem + cycle

    def succ(node):
        p, i = node
        j = i + 1 if i + 1 < u + v else u
        return [(q, j) for s, pred, q in E.trans if s == p and pred(word[i])]

    return _accepting_cycle(succ, (E.initial, 0), lambda x: x[0] in E.accepting)


def strong_member(E, stem, cycle):
    stem, cycle = list(stem), list(cycle)
    u, v = len(stem), len(cycle)
    word = stem + cycle
    start = ("init", 0, None)

    def succ(node):
        p, i, prev = node
        j = i + 1 if i + 1 < u + v else u
        a = word[i]
        if p == "init":
            return [(q, j, a) for q, pred in E.init if pred(a)]
        return [(q, j, a) for s, pred, q in E.trans if s == p and pred(a, prev)]

    return _accepting_cycle(succ, start, lambda x: x[0] in E.accepting)


def words(letters, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(letters, repeat=n)


def lassos(letters, max_stem, max_cycle):
    for stem in words(letters, max_stem):
        for n in range(1, max_cycle + 1):
            for cycle in itertools.product(letters, repeat=n):
                yield stem, cycle


def m2_letters(arity):
    return [tuple(t) for t in itertools.product(M2, repeat=arity)]


def as_lasso(stem, cycle):
    return Lasso(list(stem), list(cycle))


# -- letter formulas ----------------------------------------------------------------


def _term(t, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Shift):
        return env[t.var.name] + t.offset
    raise TypeError(t)


def letter_holds(f, env):
    """Evaluate a quantifier-free letter formula; elements are ints or '0'/'1'."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not letter_holds(f.arg, env)
    if isinstance(f, And):
        return all(letter_holds(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(letter_holds(a, env) for a in f.args)
    if isinstance(f, Implies):
        return not letter_holds(f.lhs, env) or letter_holds(f.rhs, env)
    vals = [_term(t, env) for t in f.args]
    rel = f.rel
    if rel == "=":
        return str(vals[0]) == str(vals[1])
    if rel in ("R0", "P0"):
        return str(vals[0]) == "0"
    if rel in ("R1", "P1"):
        return str(vals[0]) == "1"
    if rel == "<":
        return vals[0] < vals[1]
    if rel == "<=":
        return vals[0] <= vals[1]
    if rel == "Suc":
        return vals[1] == vals[0] + 1
    raise ValueError(f"no oracle for relation {rel}")


# -- chain logic on a truncated tree -------------------------------------------------


def tree_nodes(elements, depth):
    """Nonempty sequences of length at most ``depth``: the root is left out."""
    return [u for n in range(1, depth + 1) for u in itertools.product(elements, repeat=n)]


def tree_chains(elements, depth):
    """All chains (sets of pairwise comparable nodes) within the given depth."""
    out = [frozenset()]
    for top in tree_nodes(elements, depth):
        below = [top[:k] for k in range(1, len(top))]
        for r in range(len(below) + 1):
            for sub in itertools.combinations(below, r):
                out.append(frozenset(sub + (top,)))
    return out


def _single(c):
    return next(iter(c)) if len(c) == 1 else None


def _siblings(chains, relation):
    """Singletons ``{z m1}, .., {z ml}`` with ``relation(m1, .., ml)``."""
    nodes = [_single(c) for c in chains]
    if any(u is None for u in nodes):
        return False
    parents = {u[:-1] for u in nodes}
    return len(parents) == 1 and relation(*[u[-1] for u in nodes])


def chain_atom(f, env):
    """Truth of one atom for chains given as frozensets of tuples."""
    if isinstance(f, Sibling):
        cs = [env[x] for x in f.vars]
        return _siblings(cs, lambda *m: letter_holds(
            f.phi, {f"x{i}": int(e) if str(e).isdigit() else e for i, e in enumerate(m, 1)}))
    names = [a.name for a in f.args]
    cs = [env[x] for x in names]
    if f.rel.endswith("*"):
        rel = Atom(f.rel[:-1], [Var(f"x{i}") for i in range(1, len(cs) + 1)])
        return chain_atom(Sibling(names, rel), env)
    if f.rel == "Sing":
        return len(cs[0]) == 1
    if f.rel == "Sub":
        return cs[0] <= cs[1]
    u, v = _single(cs[0]), _single(cs[1])
    if u is None or v is None:
        return False
    if f.rel == "Succ":
        return len(v) == len(u) + 1 and v[:len(u)] == u
    if f.rel == "Pre":
        return v[:len(u)] == u
    if f.rel == "E":
        return len(u) == len(v)
    raise ValueError(f"unknown chain atom {f.rel}")


def chain_holds(f, env, domains, level=0):
    """Evaluate a chain formula; the quantifier at nesting ``level`` ranges over ``domains[level]``."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, (Atom, Sibling)):
        return chain_atom(f, env)
    if isinstance(f, Not):
        return not chain_holds(f.arg, env, domains, level)
    if isinstance(f, And):
        return all(chain_holds(a, env, domains, level) for a in f.args)
    if isinstance(f, Or):
        return any(chain_holds(a, env, domains, level) for a in f.args)
    if isinstance(f, Implies):
        return not chain_holds(f.lhs, env, domains, level) or chain_holds(f.rhs, env, domains, level)
    dom = domains[min(level, len(domains) - 1)]
    test = any if isinstance(f, Exists) else all
    return test(chain_holds(f.body, {**env, f.var: c}, domains, level + 1) for c in dom)


def bounded_truth(f, elements, depths):
    """Truth on the tree cut at the per-level depths (list indexed by quantifier nesting)."""
    cache = {}
    domains = []
    for d in depths:
        if d not in cache:
            cache[d] = tree_chains(elements, d)
        domains.append(cache[d])
    return chain_holds(f, {}, domains)


def random_chain(rng, elements, depth):
    """A random finite chain below the given depth: a path and a subset of it."""
    n = rng.randint(1, depth)
    path = tuple(rng.choice(elements) for _ in range(n))
    return frozenset(path[:k] for k in range(1, n + 1) if rng.random() < 0.5)


def seeded(seed):
    return random.Random(seed)
