"""Oracle contract for alphabet structures."""
from __future__ import annotations

import os
import threading
from collections import Counter

from ..errors import NotASentence, UnknownRelation, UnsupportedAtom
from ..formula import (
    FALSE, TRUE, Atom, Const, Exists, Formula, Shift, Var, conj, exists,
    neg, relations, var_key,
)


def cache_enabled():
    return os.environ.get("MLBUCHI_ORACLE_CACHE", "on").lower() not in ("off", "0", "no", "false")


class Theory:
    """Decidability oracle for a relational structure.

    Subclasses implement ``_decide``, ``_evaluate``, ``_project``,
    ``_witnesses`` and ``_simplify``; the public wrappers add input
    checks, memoisation and call accounting.  All caches are guarded by a
    lock so a theory may be shared between threads.
    """

    kind = "abstract"
    #: name of the equality relation; present in every signature
    EQ = "="

    def __init__(self, name):
        self.name = name
        self.signature = {self.EQ: 2}
        self.zero_element = None
        self.one_element = None
        self._lock = threading.RLock()
        self._cache = {}
        self.stats = Counter()

    # -- capability flags -------------------------------------------------
    supports_witness = True
    supports_constants = True

    @property
    def admissible(self):
        return self.zero_element is not None and self.one_element is not None

    @property
    def is_finite(self):
        return False

    # -- memoisation --------------------------------------------------------
    def _memo(self, key, compute):
        if not cache_enabled():
            self.stats["computed"] += 1
            return compute()
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        self.stats["computed"] += 1
        with self._lock:
            self._cache[key] = value
        return value

    def clear_cache(self):
        with self._lock:
            self._cache.clear()

    @property
    def oracle_calls(self):
        return self.stats["decide"] + self.stats["sat"]

    # -- validation ---------------------------------------------------------
    def check(self, formula):
        """Raise unless every atom of ``formula`` belongs to the signature."""
        for rel, arity in relations(formula):
            if rel not in self.signature:
                raise UnknownRelation(f"relation {rel!r} is not in the signature of {self.name}")
            if self.signature[rel] != arity:
                raise UnsupportedAtom(
                    f"relation {rel!r} has arity {self.signature[rel]}, used with {arity}")
        return formula

    # -- public oracle interface -------------------------------------------
    def decide(self, sentence):
        if not isinstance(sentence, Formula):
            raise TypeError("decide expects a Formula")
        if sentence.free_vars:
            raise NotASentence(f"free variables {sorted(sentence.free_vars)} remain")
        self.check(sentence)
        self.stats["decide"] += 1
        return self._memo(("decide", sentence), lambda: bool(self._decide(sentence)))

    def is_satisfiable(self, formula):
        """``decide`` of the existential closure of ``formula``."""
        self.stats["sat"] += 1
        return self._memo(("sat", formula), lambda: bool(self._satisfiable(formula)))

    def evaluate(self, formula, assignment):
        from ..errors import MissingBinding

        missing = formula.free_vars - set(assignment)
        if missing:
            raise MissingBinding(f"no value for {sorted(missing, key=var_key)}")
        self.check(formula)
        self.stats["evaluate"] += 1
        env = {v: self.coerce_element(assignment[v]) for v in formula.free_vars}
        return bool(self._evaluate(formula, env))

    def project(self, formula, var):
        if isinstance(var, Var):
            var = var.name
        if var not in formula.free_vars:
            return formula
        self.check(formula)
        return self._memo(("project", formula, var), lambda: self._project(formula, var))

    def simplify(self, formula):
        return self._memo(("simplify", formula), lambda: self._simplify(formula))

    def witness(self, formula, variables=None):
        """A satisfying assignment as ``{name: element}``, or ``None``."""
        found = self.witnesses(formula, variables, limit=1)
        return found[0] if found else None

    def witnesses(self, formula, variables=None, limit=1):
        if variables is None:
            variables = sorted(formula.free_vars, key=var_key)
        variables = tuple(variables)
        if not self.supports_witness:
            return []
        if not self.is_satisfiable(formula):
            return []
        return self._witnesses(formula, variables, limit)

    def mintermize(self, formulas):
        """Satisfiable minterms ``(J, psi_J)`` of ``formulas`` (1-based ``J``).

        Subsets are explored by binary splitting: the branch excluding
        formula ``i`` is visited before the branch including it, and a
        branch is abandoned as soon as its partial conjunction is
        unsatisfiable.
        """
        formulas = list(formulas)
        out = []

        def split(i, chosen, lits, current):
            if not self.is_satisfiable(current):
                return
            if i == len(formulas):
                out.append((frozenset(chosen), conj(lits)))
                return
            phi = formulas[i]
            split(i + 1, chosen, lits + [neg(phi)], conj(current, neg(phi)))
            split(i + 1, chosen + [i + 1], lits + [phi], conj(current, phi))

        split(0, [], [], TRUE)
        return out

    # -- elements & constants -----------------------------------------------
    def constant(self, element):
        """Term denoting ``element``."""
        from ..errors import ConstantsUnsupported

        if not self.supports_constants:
            raise ConstantsUnsupported(f"{self.name} has no constants")
        return Const(self.coerce_element(element))

    def coerce_element(self, value):
        return value

    def parse_element(self, text):
        return self.coerce_element(text)

    def format_element(self, element):
        return str(element)

    def letter_formula(self, letter, variables):
        """Formula true exactly at ``letter`` (a tuple) over ``variables``."""
        return conj([Atom(self.EQ, (Var(v), self.constant(e))) for v, e in zip(variables, letter)])

    # -- admissibility helpers ----------------------------------------------
    def one(self, term):
        """Formula "``term`` is the designated 1"; bit tracks use it."""
        self._require_admissible()
        return Atom("P1", (_as_term(term),))

    def zero(self, term):
        self._require_admissible()
        return Atom("P0", (_as_term(term),))

    def _require_admissible(self):
        from ..errors import NonAdmissibleTheory

        if not self.admissible:
            raise NonAdmissibleTheory(f"theory {self.name} has no designated 0/1 elements")

    # -- to be provided by subclasses ---------------------------------------
    def _decide(self, sentence):
        raise NotImplementedError

    def _satisfiable(self, formula):
        closed = formula
        for v in sorted(formula.free_vars, key=var_key):
            closed = exists(v, closed)
        return self._decide(closed)

    def _evaluate(self, formula, env):
        from ..formula import substitute

        return self._decide(substitute(formula, {v: Const(e) for v, e in env.items()}))

    def _project(self, formula, var):
        return Exists(var, formula)

    def _simplify(self, formula):
        return formula

    def _witnesses(self, formula, variables, limit):
        return []

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _as_term(t):
    if isinstance(t, str):
        return Var(t)
    return t


# -- module-level operations (public API mirrors the oracle contract) -------


def decide(theory, sentence):
    return theory.decide(sentence)


def evaluate(theory, formula, assignment):
    return theory.evaluate(formula, assignment)


def project(theory, formula, variable):
    return theory.project(formula, variable)


def mintermize(theory, formulas):
    return theory.mintermize(formulas)


def witness(theory, formula, variables=None):
    return theory.witness(formula, variables)


__all__ = [
    "Theory", "decide", "evaluate", "project", "mintermize", "witness",
    "cache_enabled", "TRUE", "FALSE", "Shift",
]
