"""The naturals with successor, order and numerals.

Atoms are difference bounds ``s OP t`` with ``OP`` in ``<, <=, =`` over
terms ``x``, ``x+c`` and numerals, plus ``Suc(s, t)`` (``t = s + 1``) and
the bit predicates ``P0``/``P1`` (``= 0`` / ``= 1``).  Internally every
atom becomes a conjunction of constraints ``u - v <= c`` where ``u`` and
``v`` are variable names or ``None`` for the constant zero.  Existential
quantifiers are eliminated by Fourier-Motzkin on each DNF disjunct, which
is exact over the integers for difference constraints.
"""
from __future__ import annotations

import itertools

from ..errors import EliminationFailure, UnsupportedAtom
from ..formula import (
    FALSE, TRUE, And, Atom, Bottom, Const, Exists, Forall, Implies, Not, Or,
    Shift, Top, Var, conj, disj, neg, var_key,
)
from .base import Theory

ZERO = None
#: DNF size beyond which :meth:`NatOrderStructure.simplify` gives up
SIMPLIFY_LIMIT = 256


def _lin(t):
    """``(variable or ZERO, offset)`` for a term."""
    if isinstance(t, Var):
        return t.name, 0
    if isinstance(t, Shift):
        return t.var.name, t.offset
    if isinstance(t, Const):
        v = t.value
        if isinstance(v, str) and v.isdigit():
            v = int(v)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise UnsupportedAtom(f"{t.value!r} is not a natural number")
        return ZERO, v
    raise UnsupportedAtom(f"unsupported term {t!r}")


def _le(a, b, strict=False):
    """Constraint for ``a <= b`` (or ``a < b``) with linear terms ``a``, ``b``."""
    (u, cu), (v, cv) = a, b
    return (u, v, cv - cu - (1 if strict else 0))


def atom_constraints(atom):
    """The conjunction of difference constraints equivalent to ``atom``."""
    rel, args = atom.rel, atom.args
    if rel in ("<", "<=") and len(args) == 2:
        return [_le(_lin(args[0]), _lin(args[1]), strict=rel == "<")]
    if rel == "=" and len(args) == 2:
        a, b = _lin(args[0]), _lin(args[1])
        return [_le(a, b), _le(b, a)]
    if rel == "Suc" and len(args) == 2:
        (u, cu), (v, cv) = _lin(args[0]), _lin(args[1])
        a, b = (u, cu + 1), (v, cv)
        return [_le(a, b), _le(b, a)]
    if rel in ("P0", "P1") and len(args) == 1:
        a, b = _lin(args[0]), (ZERO, 0 if rel == "P0" else 1)
        return [_le(a, b), _le(b, a)]
    raise UnsupportedAtom(f"atom {rel}/{len(args)} is outside the difference-bound fragment")


def _negate(c):
    u, v, k = c
    return (v, u, -k - 1)


def _trivial(c):
    """``True``/``False`` for constraints with identical sides, else ``None``."""
    u, v, k = c
    if u == v:
        return k >= 0
    return None


def _key(c):
    u, v, k = c
    return ("" if u is None else u, "" if v is None else v, k)


def normalize(constraints):
    """Tightest constraint per variable pair; ``None`` if trivially false."""
    best = {}
    for c in constraints:
        t = _trivial(c)
        if t is True:
            continue
        if t is False:
            return None
        u, v, k = c
        if u is ZERO and k >= 0:
            continue  # -v <= k holds for every natural v
        if v is ZERO and u is not ZERO and k < 0:
            return None
        if (u, v) not in best or k < best[(u, v)]:
            best[(u, v)] = k
    return frozenset((u, v, k) for (u, v), k in best.items())


def consistent(constraints):
    """Bellman-Ford negative-cycle test with every variable ``>= 0``."""
    nodes = {ZERO}
    for u, v, _ in constraints:
        nodes.add(u)
        nodes.add(v)
    edges = list(constraints) + [(ZERO, x, 0) for x in nodes if x is not ZERO]
    # u - v <= k  is the edge v -> u with weight k
    dist = {x: 0 for x in nodes}
    for _ in range(len(nodes)):
        changed = False
        for u, v, k in edges:
            if dist[v] + k < dist[u]:
                dist[u] = dist[v] + k
                changed = True
        if not changed:
            return True
    return False


def least_solution(constraints, variables):
    """Componentwise least natural solution (assumes consistency)."""
    val = {x: 0 for x in variables}
    for u, v, _ in constraints:
        for x in (u, v):
            if x is not ZERO:
                val.setdefault(x, 0)
    val[ZERO] = 0
    for _ in range(len(val) + 1):
        changed = False
        for u, v, k in constraints:
            # v >= u - k
            need = val[u] - k
            if v is not ZERO and val[v] < need:
                val[v] = need
                changed = True
        if not changed:
            break
    del val[ZERO]
    return val


def fm_eliminate(constraints, var):
    """Fourier-Motzkin elimination of ``var``; ``None`` when unsatisfiable."""
    lowers, uppers, rest = [(ZERO, 0)], [], []
    for u, v, k in constraints:
        if v == var and u != var:
            lowers.append((u, k))       # var >= u - k
        elif u == var and v != var:
            uppers.append((v, k))       # var <= v + k
        elif u == var and v == var:
            if k < 0:
                return None
        else:
            rest.append((u, v, k))
    for (u, a), (w, b) in itertools.product(lowers, uppers):
        rest.append((u, w, a + b))
    return normalize(rest)


class NatOrderStructure(Theory):
    """``(N, 0, Suc, <, =)`` with exact quantifier elimination."""

    kind = "nat"

    def __init__(self, name="nat"):
        super().__init__(name)
        self.signature.update({"<": 2, "<=": 2, "Suc": 2, "P0": 1, "P1": 1})
        self.zero_element, self.one_element = 0, 1

    def coerce_element(self, value):
        if isinstance(value, bool):
            raise ValueError("booleans are not naturals")
        if isinstance(value, str):
            value = value.strip()
            if not value.isdigit():
                raise ValueError(f"{value!r} is not a natural number")
            value = int(value)
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"{value!r} is not a natural number")
        return value

    def letter_formula(self, letter, variables):
        return conj([Atom("=", (Var(v), Const(self.coerce_element(e))))
                     for v, e in zip(variables, letter)])

    # -- DNF machinery ---------------------------------------------------------
    def dnf(self, f):
        """List of normalized consistent constraint sets (quantifier free)."""
        return self._memo(("dnf", f), lambda: self._dnf(f, True))

    def _dnf(self, f, positive):
        if isinstance(f, Top):
            return [frozenset()] if positive else []
        if isinstance(f, Bottom):
            return [] if positive else [frozenset()]
        if isinstance(f, Atom):
            cs = atom_constraints(f)
            if positive:
                opts = [normalize(cs)]
            else:
                opts = [normalize([_negate(c)]) for c in cs]
            return _dedupe([o for o in opts if o is not None and consistent(o)])
        if isinstance(f, Not):
            return self._dnf(f.arg, not positive)
        if isinstance(f, Implies):
            return self._dnf(disj(neg(f.lhs), f.rhs), positive)
        if isinstance(f, (And, Or)):
            as_and = isinstance(f, And) == positive
            parts = [self.dnf(a) if positive else self._dnf(a, False) for a in f.args]
            if as_and:
                return _product(parts)
            return _dedupe([c for p in parts for c in p])
        if isinstance(f, (Exists, Forall)):
            return self._dnf(self.eliminate(f), positive)
        raise TypeError(f"not a formula: {f!r}")

    def eliminate(self, f):
        """A quantifier-free formula equivalent to ``f``."""
        return self._memo(("qe", f), lambda: self._eliminate(f))

    def _eliminate(self, f):
        if isinstance(f, (Top, Bottom, Atom)):
            return f
        if isinstance(f, Not):
            return neg(self.eliminate(f.arg))
        if isinstance(f, And):
            return conj([self.eliminate(a) for a in f.args])
        if isinstance(f, Or):
            return disj([self.eliminate(a) for a in f.args])
        if isinstance(f, Implies):
            return disj(neg(self.eliminate(f.lhs)), self.eliminate(f.rhs))
        if isinstance(f, Exists):
            return self._exists_qf(self.eliminate(f.body), f.var)
        if isinstance(f, Forall):
            return neg(self._exists_qf(neg(self.eliminate(f.body)), f.var))
        raise EliminationFailure(f"cannot eliminate quantifiers in {f!r}")

    def _exists_qf(self, body, var):
        out = []
        for cs in self.dnf(body):
            r = fm_eliminate(cs, var)
            if r is not None and consistent(r):
                out.append(r)
        return dnf_to_formula(_dedupe(out))

    # -- oracle primitives ---------------------------------------------------
    def _decide(self, sentence):
        return bool(self.dnf(sentence))

    def _satisfiable(self, formula):
        return bool(self.dnf(formula))

    def _evaluate(self, formula, env):
        return self._eval(formula, env)

    def _eval(self, f, env):
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            def val(x):
                return 0 if x is ZERO else env[x]
            return all(val(u) - val(v) <= k for u, v, k in atom_constraints(f))
        if isinstance(f, Not):
            return not self._eval(f.arg, env)
        if isinstance(f, And):
            return all(self._eval(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(self._eval(a, env) for a in f.args)
        if isinstance(f, Implies):
            return (not self._eval(f.lhs, env)) or self._eval(f.rhs, env)
        if isinstance(f, (Exists, Forall)):
            from ..formula import substitute
            closed = substitute(f, {v: Const(e) for v, e in env.items()})
            return self._decide(closed)
        raise TypeError(f"not a formula: {f!r}")

    def _project(self, formula, var):
        return self._simplify(self._exists_qf(self.eliminate(formula), var))

    def _simplify(self, formula):
        qf = self.eliminate(formula)
        try:
            dnf = _limited_dnf(self, qf)
        except _TooBig:
            return qf
        return dnf_to_formula(dnf)

    def _witnesses(self, formula, variables, limit):
        names = tuple(sorted(set(variables) | formula.free_vars, key=var_key))
        sols = []
        for cs in self.dnf(formula):
            sol = least_solution(cs, names)
            sols.append(tuple(sol[v] for v in names))
        sols = sorted(set(sols))[:limit]
        return [dict(zip(names, s)) for s in sols]

    def mintermize(self, formulas):
        """Binary splitting that carries each branch as a DNF."""
        formulas = list(formulas)
        pos = [self.dnf(f) for f in formulas]
        negs = [self.dnf(neg(f)) for f in formulas]
        out = []

        def split(i, chosen, lits, current):
            self.stats["sat"] += 1
            if not current:
                return
            if i == len(formulas):
                out.append((frozenset(chosen), conj(lits)))
                return
            split(i + 1, chosen, lits + [neg(formulas[i])], _product([current, negs[i]]))
            split(i + 1, chosen + [i + 1], lits + [formulas[i]], _product([current, pos[i]]))

        split(0, [], [], [frozenset()])
        return out


class _TooBig(Exception):
    pass


def _limited_dnf(theory, f):
    d = theory.dnf(f)
    if len(d) > SIMPLIFY_LIMIT:
        raise _TooBig
    return d


def _dedupe(sets):
    seen = []
    out = set()
    for s in sets:
        if s not in out:
            out.add(s)
            seen.append(s)
    return seen


def _product(parts):
    acc = [frozenset()]
    for p in parts:
        nxt = []
        for a in acc:
            for b in p:
                c = normalize(a | b)
                if c is not None and consistent(c):
                    nxt.append(c)
        acc = _dedupe(nxt)
        if not acc:
            return []
    return acc


def _term(x, off=0):
    if x is ZERO:
        return Const(off)
    return Shift(Var(x), off) if off else Var(x)


def constraints_to_formula(cs):
    """Readable conjunction for a constraint set (equalities recombined)."""
    cs = set(cs)
    atoms = []
    for c in sorted(cs, key=_key):
        if c not in cs:
            continue
        u, v, k = c
        mirror = (v, u, -k)
        if mirror in cs and mirror != c:
            cs.discard(mirror)
            cs.discard(c)
            atoms.append(_eq_atom(u, v, k))
            continue
        cs.discard(c)
        atoms.append(_le_atom(u, v, k))
    return conj(atoms)


def _eq_atom(u, v, k):
    # u = v + k
    if u is ZERO:
        u, v, k = v, u, -k
    if v is ZERO:
        return Atom("=", (Var(u), Const(k)))
    if k < 0:
        return Atom("=", (Shift(Var(u), -k), Var(v)))
    return Atom("=", (Var(u), _term(v, k)))


def _le_atom(u, v, k):
    # u <= v + k
    if u is ZERO:
        # v >= -k
        return Atom("<=", (Const(-k), Var(v))) if -k > 0 else TRUE
    if v is ZERO:
        return Atom("<=", (Var(u), Const(k))) if k >= 0 else FALSE
    if k == -1:
        return Atom("<", (Var(u), Var(v)))
    if k < 0:
        return Atom("<", (Shift(Var(u), -k - 1), Var(v)))
    return Atom("<=", (Var(u), _term(v, k)))


def dnf_to_formula(dnf):
    dnf = sorted(dnf, key=lambda cs: sorted(map(_key, cs)))
    return disj([constraints_to_formula(cs) for cs in dnf])
