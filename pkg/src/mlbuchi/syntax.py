"""Tokenizer, parser and pretty-printer for the formula surface syntax.

Grammar (loosest binding first)::

    formula := 'E' NAME '.' formula | 'A' NAME '.' formula | iff
    iff     := impl ('<->' impl)?
    impl    := or ('->' impl)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | quantifier | '(' formula ')' | 'true' | 'false' | atom
    atom    := NAME '(' term (',' term)* ')' | term REL term
    REL     := '=' | '!=' | '<' | '<=' | '>' | '>='
    term    := NAME [('+'|'-') NUM] | NUM | "'" element "'"

The same tokenizer and connective layer are reused by the MSO and chain
front ends in :mod:`mlbuchi.logic`.
"""
from __future__ import annotations

import re

from .errors import ParseError
from .formula import (
    Atom, Bottom, Const, Exists, Forall, Implies, Not, Or, And, Shift, Top,
    Var, conj, disj, neg, TRUE, FALSE,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>'[^']*')
  | (?P<op><->|->|<=|>=|!=|[&|~().,=<>{}:+\-\[\]*])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "index", "column")

    def __init__(self, kind, text, index, column):
        self.kind = kind
        self.text = text
        self.index = index
        self.column = column

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, #{self.index})"


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text,
                             len(tokens) + 1, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), len(tokens) + 1, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(tokens) + 1, len(text)))
    return tokens


class BaseParser:
    """Recursive-descent parser with the shared connective layer.

    Subclasses override :meth:`parse_atom` (and may override
    :meth:`make_quant` / :meth:`is_quantifier`).
    """

    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # token helpers
    @property
    def tok(self):
        return self.tokens[self.pos]

    def peek(self, k=1):
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self):
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def error(self, message, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", self.text, tok.index, tok.column)

    def expect(self, text):
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_name(self):
        if self.tok.kind != "name":
            self.error("expected a name")
        return self.advance().text

    def parse(self):
        f = self.parse_formula()
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")
        return f

    # connective layer
    def is_quantifier(self):
        return self.tok.text in ("E", "A") and self.tok.kind == "name" and self.peek().kind == "name"

    def parse_formula(self):
        if self.is_quantifier():
            return self.parse_quant()
        return self.parse_iff()

    def parse_quant(self):
        q = self.advance().text
        var = self.expect_name()
        self.expect(".")
        body = self.parse_formula()
        return self.make_quant(q, var, body)

    def make_quant(self, q, var, body):
        return Exists(var, body) if q == "E" else Forall(var, body)

    def make_not(self, f):
        return neg(f)

    def make_and(self, parts):
        return conj(parts)

    def make_or(self, parts):
        return disj(parts)

    def make_implies(self, a, b):
        return Implies(a, b)

    def make_iff(self, a, b):
        return self.make_and([self.make_implies(a, b), self.make_implies(b, a)])

    def parse_iff(self):
        lhs = self.parse_impl()
        if self.at("<->"):
            self.advance()
            rhs = self.parse_impl()
            return self.make_iff(lhs, rhs)
        return lhs

    def parse_impl(self):
        lhs = self.parse_or()
        if self.at("->"):
            self.advance()
            rhs = self.parse_impl_rhs()
            return self.make_implies(lhs, rhs)
        return lhs

    def parse_impl_rhs(self):
        if self.is_quantifier():
            return self.parse_quant()
        return self.parse_impl()

    def parse_or(self):
        parts = [self.parse_and()]
        while self.at("|"):
            self.advance()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else self.make_or(parts)

    def parse_and(self):
        parts = [self.parse_unary()]
        while self.at("&"):
            self.advance()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else self.make_and(parts)

    def parse_unary(self):
        if self.at("~"):
            self.advance()
            return self.make_not(self.parse_unary())
        if self.is_quantifier():
            return self.parse_quant()
        if self.at("("):
            self.advance()
            f = self.parse_formula()
            self.expect(")")
            return f
        return self.parse_atom()

    def parse_atom(self):
        raise NotImplementedError


_REL_OPS = ("=", "!=", "<", "<=", ">", ">=")


class FormulaParser(BaseParser):
    """Parser for first-order letter formulas (:class:`~mlbuchi.formula.Formula`)."""

    def parse_term(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(int(t.text))
        if t.kind == "quoted":
            self.advance()
            return Const(t.text[1:-1])
        if t.kind == "name":
            self.advance()
            var = Var(t.text)
            if self.at("+") or self.at("-"):
                sign = 1 if self.advance().text == "+" else -1
                if self.tok.kind != "num":
                    self.error("expected a numeral offset")
                off = sign * int(self.advance().text)
                return Shift(var, off) if off else var
            return var
        self.error("expected a term")

    def parse_atom(self):
        t = self.tok
        if t.kind == "name" and t.text == "true" and self.peek().text != "(":
            self.advance()
            return TRUE
        if t.kind == "name" and t.text == "false" and self.peek().text != "(":
            self.advance()
            return FALSE
        if t.kind == "name" and self.peek().text == "(":
            rel = self.advance().text
            self.expect("(")
            args = [self.parse_term()]
            while self.at(","):
                self.advance()
                args.append(self.parse_term())
            self.expect(")")
            return Atom(rel, args)
        lhs = self.parse_term()
        if not (self.tok.kind == "op" and self.tok.text in _REL_OPS):
            self.error("expected a relation operator")
        op = self.advance().text
        rhs = self.parse_term()
        if op == "!=":
            return neg(Atom("=", (lhs, rhs)))
        if op == ">":
            return Atom("<", (rhs, lhs))
        if op == ">=":
            return Atom("<=", (rhs, lhs))
        return Atom(op, (lhs, rhs))


def parse_formula(text):
    """Parse a first-order letter formula from its surface syntax."""
    return FormulaParser(text).parse()


# -- printing ----------------------------------------------------------------

_INFIX = {"=", "<", "<="}
_ELEMENT_RE = re.compile(r"^[A-Za-z0-9_]+$")


def format_term(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Shift):
        sign = "+" if t.offset >= 0 else "-"
        return f"{t.var.name}{sign}{abs(t.offset)}"
    if isinstance(t, Const):
        if isinstance(t.value, int) and not isinstance(t.value, bool):
            return str(t.value)
        return f"'{t.value}'"
    raise TypeError(f"not a term: {t!r}")


def _prec(f):
    if isinstance(f, (Exists, Forall)):
        return 0
    if isinstance(f, Implies):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    if isinstance(f, Not):
        return 4
    return 5


def format_formula(f):
    """Render ``f`` in the surface syntax accepted by :func:`parse_formula`."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        if f.rel in _INFIX and len(f.args) == 2:
            return f"{format_term(f.args[0])} {f.rel} {format_term(f.args[1])}"
        return f"{f.rel}({','.join(format_term(a) for a in f.args)})"
    if hasattr(f, "_surface"):
        return f._surface()
    return format_connectives(f, format_formula)


def format_connectives(f, recurse):
    """Shared printer for the connective layer; ``recurse`` renders children."""

    def wrap(child, need):
        s = recurse(child)
        return f"({s})" if _prec(child) < need else s

    if isinstance(f, Not):
        return "~" + wrap(f.arg, 5)
    if isinstance(f, And):
        return " & ".join(wrap(a, 4) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(wrap(a, 3) for a in f.args)
    if isinstance(f, Implies):
        rhs = recurse(f.rhs) if _prec(f.rhs) in (0, 1) else wrap(f.rhs, 1)
        return f"{wrap(f.lhs, 2)} -> {rhs}"
    if isinstance(f, Exists):
        return f"E {f.var}. {recurse(f.body)}"
    if isinstance(f, Forall):
        return f"A {f.var}. {recurse(f.body)}"
    raise TypeError(f"cannot format {f!r}")
