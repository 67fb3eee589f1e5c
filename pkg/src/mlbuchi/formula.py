"""First-order formulas over a structure's relational signature.

Formulas are immutable, hashable trees.  Element variables are referred to
by name (``x1``, ``x2``, ... label automaton letters; ``y1``, ... the
previous letter in strong automata).  The smart constructors :func:`conj`,
:func:`disj` and :func:`neg` fold constants and flatten nested connectives,
and should be preferred over building :class:`And` / :class:`Or` directly.
"""
from __future__ import annotations

import itertools
import re

__all__ = [
    "Term", "Var", "Const", "Shift", "Formula", "Top", "Bottom", "TRUE",
    "FALSE", "Atom", "Not", "And", "Or", "Implies", "Exists", "Forall",
    "conj", "disj", "neg", "implies", "exists", "forall", "free_vars",
    "substitute", "rename", "var_key", "xvar", "yvar", "relations",
    "fresh_name", "is_quantifier_free",
]


_VAR_RE = re.compile(r"^([A-Za-z_]*?)(\d*)$")


def var_key(name):
    """Sort key putting ``x2`` before ``x10`` and all ``x`` before ``y``."""
    m = _VAR_RE.match(name)
    prefix, digits = (m.group(1), m.group(2)) if m else (name, "")
    return (prefix, int(digits) if digits else -1, name)


def xvar(i):
    return Var(f"x{i}")


def yvar(i):
    return Var(f"y{i}")


class _Node:
    __slots__ = ("_hash",)

    def _key(self):
        raise NotImplementedError

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self):
        from .syntax import format_formula

        return f"{type(self).__name__}<{format_formula(self)}>"


# -- terms -----------------------------------------------------------------


class Term(_Node):
    __slots__ = ()


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name):
        object.__setattr__(self, "name", name)

    def _key(self):
        return (self.name,)


class Const(Term):
    """A structure element used as a constant (numeral or element name)."""

    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", value)

    def _key(self):
        return (type(self.value).__name__, self.value)


class Shift(Term):
    """``var + offset``; only meaningful in arithmetic structures."""

    __slots__ = ("var", "offset")

    def __init__(self, var, offset):
        if isinstance(var, str):
            var = Var(var)
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "offset", int(offset))

    def _key(self):
        return (self.var.name, self.offset)


def _term_vars(t):
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Shift):
        return {t.var.name}
    return set()


# -- formulas ----------------------------------------------------------------


class Formula(_Node):
    __slots__ = ("_fv",)

    @property
    def free_vars(self):
        try:
            return self._fv
        except AttributeError:
            fv = frozenset(self._free())
            object.__setattr__(self, "_fv", fv)
            return fv

    def _free(self):
        raise NotImplementedError

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)


class Top(Formula):
    __slots__ = ()

    def _key(self):
        return ()

    def _free(self):
        return ()


class Bottom(Formula):
    __slots__ = ()

    def _key(self):
        return ()

    def _free(self):
        return ()


TRUE = Top()
FALSE = Bottom()


class Atom(Formula):
    __slots__ = ("rel", "args")

    def __init__(self, rel, args):
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "args", tuple(args))

    def _key(self):
        return (self.rel, self.args)

    def _free(self):
        out = set()
        for t in self.args:
            out |= _term_vars(t)
        return out


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg):
        object.__setattr__(self, "arg", arg)

    def _key(self):
        return (self.arg,)

    def _free(self):
        return self.arg.free_vars


class _NAry(Formula):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def _key(self):
        return self.args

    def _free(self):
        out = set()
        for a in self.args:
            out |= a.free_vars
        return out


class And(_NAry):
    __slots__ = ()


class Or(_NAry):
    __slots__ = ()


class Implies(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)

    def _key(self):
        return (self.lhs, self.rhs)

    def _free(self):
        return self.lhs.free_vars | self.rhs.free_vars


class _Quant(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        if isinstance(var, Var):
            var = var.name
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _key(self):
        return (self.var, self.body)

    def _free(self):
        return self.body.free_vars - {self.var}


class Exists(_Quant):
    __slots__ = ()


class Forall(_Quant):
    __slots__ = ()


# -- smart constructors ----------------------------------------------------


def neg(f):
    if f is TRUE or isinstance(f, Top):
        return FALSE
    if f is FALSE or isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _flatten(kind, parts):
    out = []
    seen = set()
    for p in parts:
        items = p.args if isinstance(p, kind) else (p,)
        for q in items:
            if q not in seen:
                seen.add(q)
                out.append(q)
    return out


def conj(*parts):
    if len(parts) == 1 and not isinstance(parts[0], Formula):
        parts = tuple(parts[0])
    items = []
    for p in _flatten(And, parts):
        if isinstance(p, Bottom):
            return FALSE
        if not isinstance(p, Top):
            items.append(p)
    present = set(items)
    for p in items:
        if isinstance(p, Not) and p.arg in present:
            return FALSE
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(*parts):
    if len(parts) == 1 and not isinstance(parts[0], Formula):
        parts = tuple(parts[0])
    items = []
    for p in _flatten(Or, parts):
        if isinstance(p, Top):
            return TRUE
        if not isinstance(p, Bottom):
            items.append(p)
    present = set(items)
    for p in items:
        if isinstance(p, Not) and p.arg in present:
            return TRUE
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def implies(lhs, rhs):
    return disj(neg(lhs), rhs)


def exists(var, body):
    if isinstance(var, Var):
        var = var.name
    if var not in body.free_vars:
        return body
    return Exists(var, body)


def forall(var, body):
    if isinstance(var, Var):
        var = var.name
    if var not in body.free_vars:
        return body
    return Forall(var, body)


def free_vars(f):
    return f.free_vars


def is_quantifier_free(f):
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, _NAry):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.lhs) and is_quantifier_free(f.rhs)
    return True


def relations(f):
    """Set of ``(relation, arity)`` pairs used by atoms of ``f``."""
    out = set()

    def walk(g):
        if isinstance(g, Atom):
            out.add((g.rel, len(g.args)))
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, _NAry):
            for a in g.args:
                walk(a)
        elif isinstance(g, Implies):
            walk(g.lhs)
            walk(g.rhs)
        elif isinstance(g, _Quant):
            walk(g.body)

    walk(f)
    return out


def fresh_name(avoid, prefix="v"):
    for i in itertools.count(1):
        cand = f"{prefix}{i}"
        if cand not in avoid:
            return cand


def _subst_term(t, mapping):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Shift) and t.var.name in mapping:
        r = mapping[t.var.name]
        if isinstance(r, Var):
            return Shift(r, t.offset) if t.offset else r
        if isinstance(r, Shift):
            off = r.offset + t.offset
            return Shift(r.var, off) if off else r.var
        if isinstance(r, Const) and isinstance(r.value, int) and not isinstance(r.value, bool):
            return Const(r.value + t.offset)
        raise TypeError(f"cannot shift constant {r!r}")
    return t


def substitute(f, mapping):
    """Capture-avoiding substitution of terms for free variables.

    ``mapping`` sends variable names to :class:`Term` objects (or to
    variable names, which are wrapped in :class:`Var`).
    """
    mapping = {k: (Var(v) if isinstance(v, str) else v) for k, v in mapping.items()}
    mapping = {k: v for k, v in mapping.items() if k in f.free_vars}
    if not mapping:
        return f
    return _subst(f, mapping)


def _subst(f, mapping):
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, [_subst_term(t, mapping) for t in f.args])
    if isinstance(f, Not):
        return neg(_subst(f.arg, mapping))
    if isinstance(f, And):
        return conj([_subst(a, mapping) for a in f.args])
    if isinstance(f, Or):
        return disj([_subst(a, mapping) for a in f.args])
    if isinstance(f, Implies):
        return Implies(_subst(f.lhs, mapping), _subst(f.rhs, mapping))
    if isinstance(f, _Quant):
        inner = {k: v for k, v in mapping.items() if k != f.var and k in f.body.free_vars}
        if not inner:
            return f
        incoming = set()
        for t in inner.values():
            incoming |= _term_vars(t)
        var, body = f.var, f.body
        if var in incoming:
            new = fresh_name(incoming | body.free_vars | set(inner), prefix="v")
            body = _subst(body, {var: Var(new)})
            var = new
        return type(f)(var, _subst(body, inner))
    if hasattr(f, "_subst_vars"):
        return f._subst_vars(mapping)
    raise TypeError(f"not a formula: {f!r}")


def rename(f, mapping):
    """Rename free variables: ``mapping`` sends names to names."""
    return substitute(f, {k: Var(v) for k, v in mapping.items() if k != v})
