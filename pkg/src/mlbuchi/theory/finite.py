"""Finite enumerated structures.

Every formula over variables ``V`` is evaluated to its *denotation*, an
integer bitmask over ``|M| ** len(V)`` assignments (first variable most
significant).  Decisions, projections and simplification are all read off
these masks; simplification re-synthesises a canonical formula by Shannon
expansion over the per-element singleton predicates, so two labels with
the same denotation become syntactically identical.
"""
from __future__ import annotations

import itertools

from ..errors import UnsupportedAtom
from ..formula import (
    FALSE, TRUE, And, Atom, Bottom, Const, Exists, Forall, Implies, Not, Or,
    Shift, Top, Var, conj, disj, fresh_name, neg, rename, var_key,
)
from .base import Theory


class FiniteStructure(Theory):
    """A finite relational structure with a singleton predicate per element.

    Parameters
    ----------
    name : str
    elements : sequence of element names
    relations : mapping ``name -> (arity, iterable of tuples)``, optional
    zero, one : designated elements making the structure admissible
    """

    kind = "finite"

    def __init__(self, name, elements, relations=None, zero=None, one=None):
        super().__init__(name)
        self.elements = tuple(str(e) for e in elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate element names")
        if not self.elements:
            raise ValueError("a structure needs at least one element")
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.relations = {}
        self._singleton = {}
        for e in self.elements:
            rel = self.singleton_name(e)
            self._singleton[e] = rel
            self._add(rel, 1, [(e,)])
        for rel, (arity, tuples) in (relations or {}).items():
            self.add_relation(rel, arity, tuples)
        if zero is not None or one is not None:
            self.designate(zero, one)

    @staticmethod
    def singleton_name(element):
        return f"R{element}"

    @property
    def is_finite(self):
        return True

    def _add(self, rel, arity, tuples):
        tuples = frozenset(tuple(self.coerce_element(x) for x in t) for t in tuples)
        if rel in self.relations and self.relations[rel] != tuples:
            raise ValueError(f"relation {rel!r} defined twice")
        if any(len(t) != arity for t in tuples):
            raise ValueError(f"relation {rel!r}: tuple arity differs from {arity}")
        self.relations[rel] = tuples
        self.signature[rel] = arity
        self.clear_cache()

    def add_relation(self, rel, arity, tuples=()):
        if rel == self.EQ:
            raise ValueError("equality is built in")
        self._add(rel, arity, tuples)

    def designate(self, zero, one):
        zero, one = self.coerce_element(zero), self.coerce_element(one)
        if zero == one:
            raise ValueError("designated 0 and 1 must differ")
        self.zero_element, self.one_element = zero, one
        self._add("P0", 1, [(zero,)])
        self._add("P1", 1, [(one,)])

    def coerce_element(self, value):
        if isinstance(value, str) and value in self._index:
            return value
        s = str(value)
        if s in self._index and not isinstance(value, bool):
            return s
        raise ValueError(f"{value!r} is not an element of {self.name}")

    def letter_formula(self, letter, variables):
        return conj([Atom(self._singleton[self.coerce_element(e)], (Var(v),))
                     for v, e in zip(variables, letter)])

    # -- denotations ----------------------------------------------------------
    def _size(self, k):
        return len(self.elements) ** k

    def _full(self, k):
        return (1 << self._size(k)) - 1

    def mask(self, formula, variables):
        """Denotation of ``formula`` over the ordered variable tuple."""
        variables = tuple(variables)
        return self._memo(("mask", formula, variables),
                          lambda: self._compute_mask(formula, variables))

    def _term_value(self, t, pos, values):
        if isinstance(t, Var):
            return self.elements[values[pos[t.name]]]
        if isinstance(t, Const):
            return self.coerce_element(t.value)
        raise UnsupportedAtom(f"term {t!r} is not supported by finite structures")

    def _compute_mask(self, f, V):
        k = len(V)
        if isinstance(f, Top):
            return self._full(k)
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, Atom):
            if any(isinstance(t, Shift) for t in f.args):
                raise UnsupportedAtom(f"arithmetic term in {f!r}")
            pos = {v: i for i, v in enumerate(V)}
            if f.rel == self.EQ:
                test = lambda vals: vals[0] == vals[1]
            else:
                table = self.relations[f.rel]
                test = table.__contains__
            m = 0
            for idx, values in enumerate(itertools.product(range(len(self.elements)), repeat=k)):
                if test(tuple(self._term_value(t, pos, values) for t in f.args)):
                    m |= 1 << idx
            return m
        if isinstance(f, Not):
            return self._full(k) ^ self.mask(f.arg, V)
        if isinstance(f, And):
            m = self._full(k)
            for a in f.args:
                m &= self.mask(a, V)
                if not m:
                    break
            return m
        if isinstance(f, Or):
            m = 0
            for a in f.args:
                m |= self.mask(a, V)
            return m
        if isinstance(f, Implies):
            return (self._full(k) ^ self.mask(f.lhs, V)) | self.mask(f.rhs, V)
        if isinstance(f, (Exists, Forall)):
            var, body = f.var, f.body
            if var in V:
                new = fresh_name(set(V) | body.free_vars, prefix="b")
                body, var = rename(body, {var: new}), new
            Vb = tuple(sorted(V + (var,), key=var_key))
            inner = self.mask(body, Vb)
            if isinstance(f, Forall):
                inner = self._full(k + 1) ^ inner
            out = self._exists_bits(inner, Vb.index(var), k + 1)
            if isinstance(f, Forall):
                out = self._full(k) ^ out
            return out
        raise TypeError(f"not a formula: {f!r}")

    def _exists_bits(self, m, p, k):
        """Project coordinate ``p`` out of a mask over ``k`` variables."""
        d = len(self.elements)
        block = d ** (k - 1 - p)
        low = (1 << block) - 1
        out = 0
        for hi in range(d ** p):
            chunk = 0
            base = hi * d
            for e in range(d):
                chunk |= (m >> ((base + e) * block)) & low
            out |= chunk << (hi * block)
        return out

    def canonical(self, m, variables):
        """Formula with denotation ``m`` over ``variables`` (Shannon expansion)."""
        variables = tuple(variables)
        return self._memo(("canon", m, variables), lambda: self._canon(m, variables))

    def _canon(self, m, V):
        k = len(V)
        if m == 0:
            return FALSE
        if m == self._full(k):
            return TRUE
        d = len(self.elements)
        block = self._size(k - 1)
        low = (1 << block) - 1
        cof = [(m >> (e * block)) & low for e in range(d)]
        rest = V[1:]
        if all(c == cof[0] for c in cof):
            return self.canonical(cof[0], rest)
        groups = {}
        for e, c in enumerate(cof):
            groups.setdefault(c, []).append(self.elements[e])
        parts = []
        for c, es in groups.items():
            if c:
                parts.append(conj(self._elem_pred(V[0], es), self.canonical(c, rest)))
        return disj(parts)

    def _elem_pred(self, v, es):
        x = Var(v)
        if len(es) == len(self.elements):
            return TRUE
        if len(es) == 1:
            return Atom(self._singleton[es[0]], (x,))
        others = [e for e in self.elements if e not in es]
        if len(others) == 1:
            return neg(Atom(self._singleton[others[0]], (x,)))
        return disj([Atom(self._singleton[e], (x,)) for e in es])

    # -- oracle primitives ---------------------------------------------------
    def _vars(self, formula):
        return tuple(sorted(formula.free_vars, key=var_key))

    def _decide(self, sentence):
        return self.mask(sentence, ()) == 1

    def _satisfiable(self, formula):
        return self.mask(formula, self._vars(formula)) != 0

    def _evaluate(self, formula, env):
        V = self._vars(formula)
        d = len(self.elements)
        idx = 0
        for v in V:
            idx = idx * d + self._index[env[v]]
        return (self.mask(formula, V) >> idx) & 1

    def _project(self, formula, var):
        V = tuple(v for v in self._vars(formula) if v != var)
        return self.canonical(self.mask(Exists(var, formula), V), V)

    def _simplify(self, formula):
        V = self._vars(formula)
        return self.canonical(self.mask(formula, V), V)

    def _witnesses(self, formula, variables, limit):
        V = tuple(sorted(set(variables) | formula.free_vars, key=var_key))
        m = self.mask(formula, V)
        d = len(self.elements)
        out = []
        while m and len(out) < limit:
            low = m & -m
            idx = low.bit_length() - 1
            m ^= low
            digits = []
            for _ in V:
                digits.append(idx % d)
                idx //= d
            digits.reverse()
            out.append({v: self.elements[i] for v, i in zip(V, digits)})
        return out

    def mintermize(self, formulas):
        formulas = list(formulas)
        fv = set()
        for f in formulas:
            fv |= f.free_vars
        V = tuple(sorted(fv, key=var_key))
        masks = [self.mask(f, V) for f in formulas]
        out = []

        def split(i, chosen, lits, current):
            self.stats["sat"] += 1
            if not current:
                return
            if i == len(formulas):
                out.append((frozenset(chosen), conj(lits)))
                return
            split(i + 1, chosen, lits + [neg(formulas[i])], current & ~masks[i])
            split(i + 1, chosen + [i + 1], lits + [formulas[i]], current & masks[i])

        split(0, [], [], self._full(len(V)))
        return out

    def minterm_masks(self, formulas, variables):
        """Like :meth:`mintermize` but returns ``(J, mask)`` over ``variables``."""
        masks = [self.mask(f, variables) for f in formulas]
        parts = [(frozenset(), self._full(len(variables)))]
        for i, m in enumerate(masks, start=1):
            nxt = []
            for J, cur in parts:
                out_part = cur & ~m
                in_part = cur & m
                if out_part:
                    nxt.append((J, out_part))
                if in_part:
                    nxt.append((J | {i}, in_part))
            parts = nxt
        return parts


def binary_structure(name="m2"):
    """The two-letter alphabet ``({0,1}, R0, R1)`` with 0/1 designated."""
    return FiniteStructure(name, ["0", "1"], zero="0", one="1")
