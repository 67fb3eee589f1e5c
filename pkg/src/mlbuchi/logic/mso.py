"""MSO over ω-words of structure letters, and its compilation to Büchi automata.

Free variables are *tracks*: each denotes an ω-sequence of letters.  A
track ``X`` is read as the set of positions carrying the designated 1
(``P1``), so set atoms make sense on any track.  Atoms::

    Sing(X)                 X is a singleton
    Sub(X, Y)               X ⊆ Y
    Succ(X, Y)              X = {t}, Y = {t+1}
    Pre(X, Y)               X = {s}, Y = {t}, s ≤ t
    Sub(X, {Y1,..,Yl: φ})   every position of X has letters (Y1..Yl) satisfying φ(x1..xl)
    Valid(Y, Z)             (Y, Z) is a canonical chain encoding (used by the chain front end)
    Bits(X)                 every letter of X is the designated 0 or 1

Connectives are the ones of :mod:`mlbuchi.syntax`; ``E X.`` and ``A X.``
quantify tracks.
"""
from __future__ import annotations

from ..automata.buechi import (
    SymbolicBuechi, buechi_intersect, buechi_is_empty, buechi_project, buechi_union,
    empty_buechi, universal_buechi,
)
from ..automata.profiles import buechi_complement
from ..automata.reduce import reduce
from ..automata.weak import complement_by_shape
from ..errors import ArityMismatch, NotASentence, UnknownRelation
from ..formula import (
    And, Atom, Bottom, Exists, Forall, Formula, Implies, Not, Or, Top, Var, conj, disj,
    exists, fresh_name, neg, rename, var_key,
)
from ..syntax import BaseParser, FormulaParser, format_connectives, format_formula

SET_ATOMS = {"Sing": 1, "Sub": 2, "Succ": 2, "Pre": 2, "Valid": 2, "Bits": 1}


class LetterPred(Formula):
    """``X ⊆ P_φ``: at every position of ``X`` the letters of ``tracks`` satisfy ``phi``.

    ``phi`` is a first-order formula over ``x1..xl`` where ``xj`` stands for
    the letter of ``tracks[j-1]``.
    """

    __slots__ = ("var", "tracks", "phi")

    def __init__(self, var, tracks, phi):
        object.__setattr__(self, "var", var.name if isinstance(var, Var) else var)
        object.__setattr__(self, "tracks", tuple(t.name if isinstance(t, Var) else t for t in tracks))
        object.__setattr__(self, "phi", phi)
        allowed = {f"x{i}" for i in range(1, len(self.tracks) + 1)}
        if phi.free_vars - allowed:
            raise ArityMismatch(
                f"letter formula {format_formula(phi)} has more variables than its {len(self.tracks)} tracks")

    def _key(self):
        return (self.var, self.tracks, self.phi)

    def _free(self):
        return {self.var, *self.tracks}

    def _surface(self):
        return format_mso(self)

    def _subst_vars(self, mapping):
        def r(name):
            t = mapping.get(name)
            return t.name if isinstance(t, Var) else name

        return LetterPred(r(self.var), [r(t) for t in self.tracks], self.phi)


def sing(x):
    return Atom("Sing", (Var(x),))


def sub(x, y):
    return Atom("Sub", (Var(x), Var(y)))


def succ(x, y):
    return Atom("Succ", (Var(x), Var(y)))


def pre(x, y):
    return Atom("Pre", (Var(x), Var(y)))


def valid(y, z):
    return Atom("Valid", (Var(y), Var(z)))


def bits(x):
    return Atom("Bits", (Var(x),))


def letter_pred(x, tracks, phi):
    return LetterPred(x, tracks, phi)


# -- parsing and printing -------------------------------------------------------


class MsoParser(BaseParser):
    atoms = SET_ATOMS

    def parse_track_list(self):
        names = [self.expect_name()]
        while self.at(","):
            self.advance()
            names.append(self.expect_name())
        return names

    def parse_letter_formula(self):
        inner = FormulaParser(self.text)
        inner.tokens = self.tokens
        inner.pos = self.pos
        phi = inner.parse_formula()
        self.pos = inner.pos
        return phi

    def parse_braced(self):
        """``{T1, .., Tl: φ}``; returns ``(tracks, φ)``."""
        open_tok = self.expect("{")
        tracks = self.parse_track_list()
        self.expect(":")
        phi = self.parse_letter_formula()
        self.expect("}")
        allowed = {f"x{i}" for i in range(1, len(tracks) + 1)}
        if phi.free_vars - allowed:
            self.error(f"letter formula may only use x1..x{len(tracks)}", open_tok)
        return tracks, phi

    def parse_atom(self):
        t = self.tok
        if t.kind == "name" and t.text in ("true", "false") and self.peek().text != "(":
            self.advance()
            return Top() if t.text == "true" else Bottom()
        if t.kind != "name":
            self.error("expected an atom")
        if self.peek().text != "(":
            self.error("expected '(' after atom name", self.peek())
        name = self.advance().text
        if name not in self.atoms:
            raise UnknownRelation(f"unknown atom {name!r} at token {t.index}")
        self.expect("(")
        first = self.expect_name()
        if name == "Sub" and self.at(",") and self.peek().text == "{":
            self.advance()
            tracks, phi = self.parse_braced()
            self.expect(")")
            return LetterPred(first, tracks, phi)
        args = [first]
        while self.at(","):
            self.advance()
            args.append(self.expect_name())
        self.expect(")")
        if len(args) != self.atoms[name]:
            self.error(f"{name} takes {self.atoms[name]} argument(s)", t)
        return Atom(name, [Var(a) for a in args])


def parse_mso(text):
    return MsoParser(text).parse()


def format_mso(f):
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, LetterPred):
        return f"Sub({f.var}, {{{', '.join(f.tracks)}: {format_formula(f.phi)}}})"
    if isinstance(f, Atom):
        return f"{f.rel}({', '.join(a.name for a in f.args)})"
    return format_connectives(f, format_mso)


def mso_tracks(f):
    """Track order of compiled automata: free tracks sorted by name."""
    return tuple(sorted(f.free_vars, key=var_key))


# -- atom automata --------------------------------------------------------------


def _atom_automaton(theory, f):
    """Automaton over the atom's arguments in order (duplicates allowed)."""
    one = theory.one
    if isinstance(f, LetterPred):
        args = [f.var] + list(f.tracks)
        body = rename(f.phi, {f"x{i}": f"x{i + 1}" for i in range(1, len(f.tracks) + 1)})
        label = disj(neg(one(Var("x1"))), body)
        return args, SymbolicBuechi(theory, len(args), 1, 0, [0], [(0, label, 0)])
    args = [a.name for a in f.args]
    x = one(Var("x1"))
    if f.rel == "Bits":
        return args, SymbolicBuechi(theory, 1, 1, 0, [0], [(0, disj(theory.zero(Var("x1")), x), 0)])
    if f.rel == "Sing":
        trans = [(0, neg(x), 0), (0, x, 1), (1, neg(x), 1)]
        return args, SymbolicBuechi(theory, 1, 2, 0, [1], trans)
    y = one(Var("x2"))
    nx_, ny = neg(x), neg(y)
    if f.rel == "Sub":
        return args, SymbolicBuechi(theory, 2, 1, 0, [0], [(0, disj(nx_, y), 0)])
    if f.rel == "Succ":
        trans = [(0, conj(nx_, ny), 0), (0, conj(x, ny), 1), (1, conj(nx_, y), 2),
                 (2, conj(nx_, ny), 2)]
        return args, SymbolicBuechi(theory, 2, 3, 0, [2], trans)
    if f.rel == "Pre":
        trans = [(0, conj(nx_, ny), 0), (0, conj(x, ny), 1), (0, conj(x, y), 2),
                 (1, conj(nx_, ny), 1), (1, conj(nx_, y), 2), (2, conj(nx_, ny), 2)]
        return args, SymbolicBuechi(theory, 2, 3, 0, [2], trans)
    if f.rel == "Valid":
        # x1 = path letter, x2 = membership bit.  States: 0 start, 1 "a 1-bit
        # is still to come", 2 just read a 1-bit, 3 zero padding forever.
        bit1 = y
        bit0 = theory.zero(Var("x2"))
        pad = conj(theory.zero(Var("x1")), bit0)
        trans = [(0, bit0, 1), (0, bit1, 2), (0, pad, 3),
                 (1, bit0, 1), (1, bit1, 2),
                 (2, bit0, 1), (2, bit1, 2), (2, pad, 3),
                 (3, pad, 3)]
        return args, SymbolicBuechi(theory, 2, 4, 0, [2, 3], trans)
    raise UnknownRelation(f"unknown MSO atom {f.rel!r}")


def _relabel(A, mapping, arity):
    """Move component ``i`` of ``A`` to component ``mapping[i]`` of an ``arity``-wide alphabet."""
    ren = {f"x{i}": f"x{j}" for i, j in mapping.items() if i != j}
    trans = [(p, rename(f, ren) if ren else f, q) for p, f, q in A.transitions]
    return SymbolicBuechi(A.theory, arity, A.n_states, A.initial, A.accepting, trans)


def _canonical(f, tracks):
    """Rename free tracks to ``_F1..`` (order kept) and bound ones to ``_B<depth>``."""
    mapping = {t: f"_F{i}" for i, t in enumerate(tracks, start=1)}

    def walk(g, env, depth):
        if isinstance(g, (Exists, Forall)):
            name = f"_B{depth}"
            return type(g)(name, walk(g.body, {**env, g.var: name}, depth + 1))
        if isinstance(g, Not):
            return Not(walk(g.arg, env, depth))
        if isinstance(g, (And, Or)):
            return type(g)([walk(a, env, depth) for a in g.args])
        if isinstance(g, Implies):
            return Implies(walk(g.lhs, env, depth), walk(g.rhs, env, depth))
        if isinstance(g, LetterPred):
            return LetterPred(env.get(g.var, g.var), [env.get(t, t) for t in g.tracks], g.phi)
        if isinstance(g, Atom):
            return Atom(g.rel, [Var(env.get(a.name, a.name)) for a in g.args])
        return g

    return walk(f, mapping, 0)


class MsoCompiler:
    """Inductive translation with a cache keyed on formulas up to track renaming.

    :meth:`compile` returns ``True``/``False`` for closed formulas and
    otherwise ``(automaton, tracks)``.
    """

    def __init__(self, theory, complement_options=None, weak="auto"):
        self.theory = theory
        self.options = dict(complement_options or {})
        self.weak = weak
        self.cache = {}
        self.stats = {"hits": 0, "complements": 0, "max_states": 0}
        theory._require_admissible()

    def compile(self, f):
        tracks = mso_tracks(f)
        key = _canonical(f, tracks)
        if key in self.cache:
            self.stats["hits"] += 1
            res = self.cache[key]
        else:
            res = self._compile(f, tracks)
            self.cache[key] = res
            if not isinstance(res, bool):
                self.stats["max_states"] = max(self.stats["max_states"], res.n_states)
        if isinstance(res, bool):
            return res
        return res, tracks

    def complement(self, A):
        """Cheapest complement for the automaton's shape (Ramsey profiles if nothing else applies)."""
        if self.weak != "auto":
            return buechi_complement(A, **self.options)
        C, how = complement_by_shape(A, lambda B: buechi_complement(B, **self.options))
        self.stats[how] = self.stats.get(how, 0) + 1
        return reduce(C)

    def _widen(self, res, tracks):
        """Cylindrify a compiled subformula to ``tracks``."""
        if res is True:
            return universal_buechi(self.theory, len(tracks))
        if res is False:
            return empty_buechi(self.theory, len(tracks))
        A, own = res
        pos = {t: i for i, t in enumerate(tracks, start=1)}
        return _relabel(A, {i: pos[t] for i, t in enumerate(own, start=1)}, len(tracks))

    def _compile(self, f, tracks):
        theory = self.theory
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, (Atom, LetterPred)):
            args, A = _atom_automaton(theory, f)
            pos = {t: i for i, t in enumerate(tracks, start=1)}
            return reduce(_relabel(A, {i: pos[a] for i, a in enumerate(args, start=1)}, len(tracks)))
        if isinstance(f, Not):
            inner = self.compile(f.arg)
            if isinstance(inner, bool):
                return not inner
            self.stats["complements"] += 1
            return self.complement(inner[0])
        if isinstance(f, Implies):
            return self._compile(disj(neg(f.lhs), f.rhs), tracks)
        if isinstance(f, (And, Or)):
            parts = [self.compile(a) for a in f.args]
            is_and = isinstance(f, And)
            if is_and and any(p is False for p in parts):
                return False
            if not is_and and any(p is True for p in parts):
                return True
            parts = [p for p in parts if not isinstance(p, bool)]
            if not parts:
                return is_and
            parts.sort(key=lambda p: p[0].n_states)
            acc = self._widen(parts[0], tracks)
            for p in parts[1:]:
                B = self._widen(p, tracks)
                acc = reduce(buechi_intersect(acc, B) if is_and else buechi_union(acc, B))
                if is_and and not acc.accepting:
                    break
            return acc
        if isinstance(f, Exists):
            body = self.compile(f.body)
            if isinstance(body, bool):
                return body
            A, own = body
            if f.var not in own:
                return A if own == tracks else self._widen(body, tracks)
            if len(own) == 1:
                return not buechi_is_empty(A)
            return reduce(buechi_project(A, own.index(f.var) + 1))
        if isinstance(f, Forall):
            return self._compile(neg(Exists(f.var, neg(f.body))), tracks)
        raise TypeError(f"not an MSO formula: {f!r}")


def compile_mso(f, theory, compiler=None, tracks=None, **options):
    """Büchi automaton for ``f``.

    Tracks follow ``tracks`` when given (a superset of the free tracks,
    extra ones unconstrained) and :func:`mso_tracks` otherwise.  A sentence
    without ``tracks`` yields an automaton over one dummy track: universal
    when the sentence holds, empty otherwise.
    """
    compiler = compiler or MsoCompiler(theory, options)
    res = compiler.compile(f)
    if tracks is not None:
        tracks = tuple(tracks)
        missing = f.free_vars - set(tracks)
        if missing or len(set(tracks)) != len(tracks):
            raise ArityMismatch(f"track list {list(tracks)} does not cover {sorted(missing)}")
        if tracks:
            return compiler._widen(res, tracks)
    if res is True:
        return universal_buechi(theory, 1)
    if res is False:
        return empty_buechi(theory, 1)
    return res[0]


def decide_mso(f, theory, witness=False, compiler=None, **options):
    """Truth of an MSO sentence.

    The outermost existential block stays as free tracks so a true sentence
    comes with a lasso; ``witness=True`` returns ``(verdict, {track: Lasso})``.
    """
    if f.free_vars:
        raise NotASentence(f"free tracks {sorted(f.free_vars, key=var_key)}")
    compiler = compiler or MsoCompiler(theory, options)
    block = []
    body = f
    while isinstance(body, Exists):
        if body.var in block:
            block.remove(body.var)
        block.append(body.var)
        body = body.body
    block = [x for x in block if x in body.free_vars]
    if not block:
        res = compiler.compile(body)
        verdict = bool(res) if isinstance(res, bool) else not buechi_is_empty(res[0])
        return (verdict, {}) if witness else verdict
    A = compile_mso(body, theory, compiler=compiler, tracks=block)
    empty, lasso = buechi_is_empty(A, witness=True)
    if not witness:
        return not empty
    if empty:
        return False, {}
    return True, {x: lasso.track(i) for i, x in enumerate(block, start=1)}


# -- automata back to formulas -----------------------------------------------------


def formula_of(A, tracks=None):
    """MSO formula over ``tracks`` (default ``X1..Xn``) describing an accepting run of ``A``.

    One set variable ``Q<p>`` per state marks the positions where the run
    is in ``p``; they partition the positions, position 0 is in the
    initial state, consecutive positions follow a transition whose label
    holds on the current letters, and accepting states recur.
    """
    n = A.arity
    tracks = list(tracks or [f"X{i}" for i in range(1, n + 1)])
    used = set(tracks)
    qs = []
    for p in range(A.n_states):
        name = fresh_name(used, prefix=f"Q{p}_") if f"Q{p}" in used else f"Q{p}"
        used.add(name)
        qs.append(name)
    T = fresh_name(used, prefix="T")
    used.add(T)
    S = fresh_name(used, prefix="S")

    part = Forall(T, Implies(sing(T), disj([
        conj([sub(T, qs[p])] + [neg(sub(T, qs[r])) for r in range(A.n_states) if r != p])
        for p in range(A.n_states)])))
    first = Forall(T, Implies(conj(sing(T), neg(Exists(S, succ(S, T)))), sub(T, qs[A.initial])))
    moves = disj([conj(sub(T, qs[p]), sub(S, qs[q]), LetterPred(T, tracks, f))
                  for p, f, q in A.transitions])
    step = Forall(T, Forall(S, Implies(succ(T, S), moves)))
    later = conj(pre(T, S), neg(sub(S, T)), disj([sub(S, qs[q]) for q in sorted(A.accepting)]))
    recur = Forall(T, Implies(sing(T), Exists(S, later)))
    body = conj(part, first, step, recur)
    for q in reversed(qs):
        body = exists(q, body)
    return body


__all__ = [
    "LetterPred", "parse_mso", "format_mso", "mso_tracks", "MsoCompiler", "compile_mso",
    "decide_mso", "formula_of", "sing", "sub", "succ", "pre", "valid", "bits", "letter_pred",
    "SET_ATOMS", "MsoParser",
]
