"""Chain logic over the weak tree iteration with equal-level relation.

Variables range over chains of the tree ``M*``: subsets of a single path.
Atoms of the surface syntax::

    Sing(X)           X is a singleton
    Sub(X, Y)         X ⊆ Y
    Succ(X, Y)        X = {u}, Y = {u m}
    Pre(X, Y)         X = {u}, Y = {v}, u a prefix of v
    E(X, Y)           X = {u}, Y = {v}, |u| = |v|
    R*(X1, .., Xl)    singletons z m1, .., z ml with R(m1, .., ml)
    {X1, .., Xl: φ}   singletons z m1, .., z ml (siblings) with φ(m1, .., ml)

A chain ``c`` is encoded by two ω-words ``(α, β)``: ``α`` is the path the
chain lies on (padded with the designated 0 after its last element) and
``β(i)`` is 1 iff ``α[0..i] ∈ c``.  Position ``i`` thus stands for the node
of length ``i + 1``; the root has no position and is not in any chain.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..automata.buechi import Lasso, buechi_accepts_lasso, buechi_is_empty
from ..errors import ArityMismatch, NotAChain, NotASentence, UnknownRelation
from ..formula import (
    And, Atom, Bottom, Exists, Forall, Formula, Implies, Not, Or, Top, Var, conj, disj,
    fresh_name, neg, var_key,
)
from ..syntax import BaseParser, format_connectives, format_formula
from .mso import LetterPred, MsoCompiler, MsoParser, bits, compile_mso, pre, sing, sub, succ, valid

CHAIN_ATOMS = {"Sing": 1, "Sub": 2, "Succ": 2, "Pre": 2, "E": 2}


class Sibling(Formula):
    """``{X1, .., Xl: φ}``: the ``Xj`` are sibling singletons whose last letters satisfy ``φ``."""

    __slots__ = ("vars", "phi")

    def __init__(self, variables, phi):
        object.__setattr__(self, "vars", tuple(v.name if isinstance(v, Var) else v for v in variables))
        object.__setattr__(self, "phi", phi)
        allowed = {f"x{i}" for i in range(1, len(self.vars) + 1)}
        if not self.vars:
            raise ArityMismatch("a sibling formula needs at least one variable")
        if phi.free_vars - allowed:
            raise ArityMismatch(
                f"sibling formula {format_formula(phi)} has more variables than its {len(self.vars)} chains")

    def _key(self):
        return (self.vars, self.phi)

    def _free(self):
        return set(self.vars)

    def _surface(self):
        return format_chain(self)

    def _subst_vars(self, mapping):
        return Sibling([mapping[v].name if v in mapping else v for v in self.vars], self.phi)


def star(rel, *variables):
    """``R*(X1, .., Xl)``."""
    return Atom(f"{rel}*", [Var(v) for v in variables])


# -- parsing and printing -------------------------------------------------------


class ChainParser(MsoParser):
    atoms = CHAIN_ATOMS

    def parse_atom(self):
        t = self.tok
        if t.kind == "name" and t.text in ("true", "false") and self.peek().text != "(":
            self.advance()
            return Top() if t.text == "true" else Bottom()
        if self.at("{"):
            variables, phi = self.parse_braced()
            return Sibling(variables, phi)
        if t.kind != "name":
            self.error("expected an atom")
        starred = self.peek().text == "*"
        if starred:
            if self.peek(2).text != "(":
                self.error("expected '(' after R*", self.peek(2))
        elif self.peek().text != "(":
            self.error("expected '(' after atom name", self.peek())
        name = self.advance().text
        if starred:
            self.advance()
        elif name not in self.atoms:
            raise UnknownRelation(f"unknown atom {name!r} at token {t.index}")
        self.expect("(")
        args = self.parse_track_list()
        self.expect(")")
        if starred:
            return star(name, *args)
        if len(args) != self.atoms[name]:
            self.error(f"{name} takes {self.atoms[name]} argument(s)", t)
        return Atom(name, [Var(a) for a in args])


def parse_chain(text):
    return ChainParser(text).parse()


def format_chain(f):
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Sibling):
        return f"{{{', '.join(f.vars)}: {format_formula(f.phi)}}}"
    if isinstance(f, Atom):
        return f"{f.rel}({', '.join(a.name for a in f.args)})"
    return format_connectives(f, format_chain)


# -- translation to MSO ------------------------------------------------------------


def chain_vars(f):
    return tuple(sorted(f.free_vars, key=var_key))


def track_names(x):
    """Path and membership tracks standing for chain variable ``x``."""
    return f"Y_{x}", f"Z_{x}"


def chain_tracks(f):
    """``(Y_X1, Z_X1, .., Y_Xn, Z_Xn)`` for the free chain variables in order."""
    return tuple(t for x in chain_vars(f) for t in track_names(x))


def _differ(position, path1, path2):
    return LetterPred(position, [path1, path2], neg(Atom("=", (Var("x1"), Var("x2")))))


class _Translator:
    def __init__(self, f, strict=False):
        self.strict = strict
        self.used = set()
        self._collect(f)

    def _collect(self, f):
        if isinstance(f, (Exists, Forall)):
            self.used.add(f.var)
            self._collect(f.body)
        elif isinstance(f, Not):
            self._collect(f.arg)
        elif isinstance(f, (And, Or)):
            for a in f.args:
                self._collect(a)
        elif isinstance(f, Implies):
            self._collect(f.lhs)
            self._collect(f.rhs)
        self.used |= f.free_vars
        for x in list(self.used):
            self.used.update(track_names(x))

    def fresh(self, prefix):
        name = fresh_name(self.used, prefix=prefix)
        self.used.add(name)
        return name

    def guard(self, y, z):
        # Every atom reads a path only up to its last member bit, so the
        # padding discipline of Valid does not change truth values; the
        # weak Bits guard avoids complementing the non-weak Valid automaton.
        return valid(y, z) if self.strict else bits(z)

    def agree_upto(self, z, y1, y2):
        """The paths ``y1``, ``y2`` agree on every position up to the one marked by ``z``."""
        t = self.fresh("_T")
        return neg(Exists(t, conj(pre(t, z), _differ(t, y1, y2))))

    def agree_before(self, z, y1, y2):
        t = self.fresh("_T")
        return neg(Exists(t, conj(pre(t, z), neg(sub(t, z)), _differ(t, y1, y2))))

    def siblings(self, variables, phi):
        (y1, z1) = track_names(variables[0])
        parts = [sing(z1)]
        for x in variables[1:]:
            y, z = track_names(x)
            parts += [sing(z), sub(z1, z), self.agree_before(z1, y1, y)]
        paths = [track_names(x)[0] for x in variables]
        parts.append(LetterPred(z1, paths, phi))
        return conj(parts)

    def atom(self, f):
        if isinstance(f, Sibling):
            return self.siblings(f.vars, f.phi)
        names = [a.name for a in f.args]
        if f.rel.endswith("*"):
            rel = f.rel[:-1]
            phi = Atom(rel, [Var(f"x{i}") for i in range(1, len(names) + 1)])
            return self.siblings(names, phi)
        if f.rel == "Sing":
            return sing(track_names(names[0])[1])
        (y1, z1), (y2, z2) = track_names(names[0]), track_names(names[1])
        if f.rel == "Sub":
            s, t = self.fresh("_S"), self.fresh("_T")
            bad = Exists(s, Exists(t, conj(sub(s, z1), pre(t, s), _differ(t, y1, y2))))
            return conj(sub(z1, z2), neg(bad))
        if f.rel == "Pre":
            return conj(sing(z1), sing(z2), pre(z1, z2), self.agree_upto(z1, y1, y2))
        if f.rel == "Succ":
            return conj(succ(z1, z2), self.agree_upto(z1, y1, y2))
        if f.rel == "E":
            return conj(sing(z1), sing(z2), sub(z1, z2))
        raise UnknownRelation(f"unknown chain atom {f.rel!r}")

    def translate(self, f):
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, (Atom, Sibling)):
            return self.atom(f)
        if isinstance(f, Not):
            return neg(self.translate(f.arg))
        if isinstance(f, And):
            return conj([self.translate(a) for a in f.args])
        if isinstance(f, Or):
            return disj([self.translate(a) for a in f.args])
        if isinstance(f, Implies):
            return Implies(self.translate(f.lhs), self.translate(f.rhs))
        if isinstance(f, Exists):
            y, z = track_names(f.var)
            return Exists(y, Exists(z, conj(self.guard(y, z), self.translate(f.body))))
        if isinstance(f, Forall):
            y, z = track_names(f.var)
            return Forall(y, Forall(z, Implies(self.guard(y, z), self.translate(f.body))))
        raise TypeError(f"not a chain formula: {f!r}")


def chain_to_mso(f, strict=False):
    """MSO formula over :func:`chain_tracks` equivalent to ``f`` on chain encodings.

    Quantified chains range over pairs ``(Y, Z)`` with 0/1 membership
    letters; ``strict=True`` demands canonical padding (``Valid``) instead.
    Both give the same truth values.  Free chains are not constrained.
    """
    return _Translator(f, strict).translate(f)


# -- encodings -----------------------------------------------------------------------


@dataclass(frozen=True)
class ChainEncoding:
    """``(α, β)`` as one-track lassos of equal shape."""

    alpha: Lasso
    beta: Lasso

    def letters(self):
        """The two-track lasso ``⟨α, β⟩``."""
        return _zip([self.alpha, self.beta])

    def nodes(self, theory, limit=None):
        """Chain members, as tuples of elements, up to length ``limit``.

        ``limit`` defaults to ``len(stem) + len(cycle)``, enough for a finite chain.
        """
        L = _zip([self.alpha, self.beta])
        n = limit if limit is not None else len(L.stem) + len(L.cycle)
        out = []
        for i in range(n):
            a, b = L.letter(i)
            if b == theory.one_element:
                out.append(tuple(L.letter(j)[0] for j in range(i + 1)))
        return out

    def is_finite(self, theory):
        L = _zip([self.alpha, self.beta])
        return all(b != theory.one_element for _, b in L.cycle)


def _zip(lassos):
    """Convolution of lassos of arbitrary shapes."""
    stem = max(len(l.stem) for l in lassos)
    period = 1
    for l in lassos:
        n = len(l.cycle)
        a, b = period, n
        while b:
            a, b = b, a % b
        period = period * n // a
    letters = [tuple(x for l in lassos for x in l.letter(i)) for i in range(stem + period)]
    return Lasso(letters[:stem], letters[stem:])


def split_lasso(lasso, parts):
    """Cut a lasso over ``sum(parts)`` tracks into lassos over ``parts[i]`` tracks each."""
    out = []
    start = 0
    for k in parts:
        out.append(Lasso([l[start:start + k] for l in lasso.stem], [l[start:start + k] for l in lasso.cycle]))
        start += k
    return out


def encode_chain(nodes, theory):
    """Encoding ``(α, β)`` of a finite chain given as tuples of elements (root excluded)."""
    theory._require_admissible()
    zero, one = theory.zero_element, theory.one_element
    nodes = [tuple(theory.coerce_element(e) for e in u) for u in nodes]
    if any(len(u) == 0 for u in nodes):
        raise NotAChain("the root has no encoding")
    nodes = sorted(set(nodes), key=len)
    for u, v in zip(nodes, nodes[1:]):
        if v[:len(u)] != u:
            raise NotAChain(f"{u} and {v} are incomparable")
    path = list(nodes[-1]) if nodes else []
    lengths = {len(u) for u in nodes}
    alpha = Lasso([(e,) for e in path], [(zero,)])
    beta = Lasso([(one,) if i + 1 in lengths else (zero,) for i in range(len(path))], [(zero,)])
    return ChainEncoding(alpha, beta)


# -- decision ------------------------------------------------------------------------


def _outer_exists(f):
    block = []
    while isinstance(f, Exists):
        block.append(f.var)
        f = f.body
    return block, f


def decide_chain_sentence(f, theory, witness=False, compiler=None, **options):
    """Truth of a chain sentence in the weak tree iteration of ``theory``.

    The outermost existential block is kept as free tracks, so a true
    sentence comes with a lasso; ``witness=True`` returns
    ``(verdict, {variable: ChainEncoding})``.
    """
    if f.free_vars:
        raise NotASentence(f"free chain variables {sorted(f.free_vars, key=var_key)}")
    compiler = compiler or MsoCompiler(theory, options)
    block, body = _outer_exists(f)
    seen = []
    for x in block:
        if x in seen:
            seen.remove(x)
        seen.append(x)
    block = [x for x in seen if x in body.free_vars]
    if not block:
        res = compiler.compile(chain_to_mso(body))
        verdict = bool(res) if isinstance(res, bool) else not buechi_is_empty(res[0])
        return (verdict, {}) if witness else verdict
    tracks = [t for x in block for t in track_names(x)]
    guard = conj([valid(*track_names(x)) for x in block])
    A = compile_mso(conj(guard, chain_to_mso(body)), theory, compiler=compiler, tracks=tracks)
    empty, lasso = buechi_is_empty(A, witness=True)
    if not witness:
        return not empty
    if empty:
        return False, {}
    encs = {}
    for x, (a, b) in zip(block, _pairs(split_lasso(lasso, [1] * len(tracks)))):
        encs[x] = ChainEncoding(a, b)
    return True, encs


def _pairs(items):
    it = iter(items)
    return list(zip(it, it))


def holds_on_encodings(f, theory, assignment, compiler=None):
    """Check an open chain formula on explicit encodings ``{var: ChainEncoding}``."""
    tracks = [t for x in sorted(assignment, key=var_key) for t in track_names(x)]
    A = compile_mso(chain_to_mso(f), theory, compiler=compiler, tracks=tracks)
    lasso = _zip([l for x in sorted(assignment, key=var_key)
                  for l in (assignment[x].alpha, assignment[x].beta)])
    return buechi_accepts_lasso(A, lasso, method="direct")


__all__ = [
    "Sibling", "star", "ChainParser", "parse_chain", "format_chain", "chain_to_mso",
    "chain_tracks", "chain_vars", "track_names", "ChainEncoding", "encode_chain",
    "decide_chain_sentence", "holds_on_encodings", "split_lasso", "CHAIN_ATOMS",
]
