"""Text serialization of automata (``.aut`` files).

::

    buechi
    theory m2
    arity 1
    states 2
    initial 0
    accepting 1
    trans 0 0 true
    trans 0 1 R1(x1)

Strong automata use the header ``strong``; their initial transitions are
written ``init q <formula>`` and interior transitions may mention
``y1..yn``.  Output is canonical: transitions are sorted.
"""
from __future__ import annotations

from ..errors import ParseError, TheoryMismatch
from ..syntax import format_formula, parse_formula
from .buechi import SymbolicBuechi
from .nfa import SymbolicNFA

HEADERS = ("nfa", "buechi", "strong")


def format_aut(A):
    lines = [A.kind, f"theory {A.theory.name}", f"arity {A.arity}",
             f"states {A.n_states}", f"initial {A.initial}"]
    lines.append(" ".join(["accepting"] + [str(q) for q in sorted(A.accepting)]))
    for q, f in getattr(A, "initial_transitions", ()):
        lines.append(f"init {q} {format_formula(f)}")
    for p, f, q in A.transitions:
        lines.append(f"trans {p} {q} {format_formula(f)}")
    return "\n".join(lines) + "\n"


def parse_aut(text, theory=None):
    """Parse ``.aut`` text; the theory is looked up by name unless given."""
    from ..theory import builtin_theory

    fields = {}
    trans = []
    inits = []
    kind = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if kind is None:
            if line not in HEADERS:
                raise ParseError(f"line {lineno}: expected a header nfa|buechi|strong", text, lineno)
            kind = line
            continue
        head, _, rest = line.partition(" ")
        try:
            if head in ("theory",):
                fields[head] = rest.strip()
            elif head in ("arity", "states", "initial"):
                fields[head] = int(rest)
            elif head == "accepting":
                fields[head] = [int(x) for x in rest.split()]
            elif head == "trans":
                p, q, ftext = rest.split(None, 2)
                trans.append((int(p), parse_formula(ftext), int(q)))
            elif head == "init" and kind == "strong":
                q, ftext = rest.split(None, 1)
                inits.append((int(q), parse_formula(ftext)))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}", text, lineno, exc.column) from exc
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}", text, lineno) from exc
    for key in ("theory", "arity", "states", "initial"):
        if key not in fields:
            raise ParseError(f"missing '{key}' line", text, 0)
    if theory is None:
        try:
            theory = builtin_theory(fields["theory"])
        except KeyError as exc:
            raise TheoryMismatch(f"unknown theory {fields['theory']!r}; pass --theory") from exc
    elif theory.name != fields["theory"]:
        raise TheoryMismatch(f"file is over {fields['theory']!r}, got theory {theory.name!r}")
    for _, f, _ in trans:
        theory.check(f)
    args = (theory, fields["arity"], fields["states"], fields["initial"],
            fields.get("accepting", []))
    if kind == "nfa":
        return SymbolicNFA(*args, trans)
    if kind == "buechi":
        return SymbolicBuechi(*args, trans)
    from ..strong import StrongBuchi

    for _, f in inits:
        theory.check(f)
    return StrongBuchi(*args, inits, trans)


def read_aut(path, theory=None):
    with open(path, encoding="utf-8") as fh:
        return parse_aut(fh.read(), theory)


def write_aut(A, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_aut(A))
