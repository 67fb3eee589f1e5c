"""Reader and writer for line-oriented theory description files (``.thy``).

::

    theory m3
    kind finite
    elements a b c
    relation E arity 2
    tuple E a b
    designate0 a
    designate1 b

``kind nat`` selects :class:`NatOrderStructure` and takes no further lines.
Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

from ..errors import ParseError
from .finite import FiniteStructure, binary_structure
from .nat import NatOrderStructure


def parse_thy(text):
    name = kind = None
    elements = []
    relations = {}
    zero = one = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "theory" and len(rest) == 1:
            name = rest[0]
        elif head == "kind" and len(rest) == 1 and rest[0] in ("finite", "nat"):
            kind = rest[0]
        elif head == "elements" and rest:
            elements.extend(rest)
        elif head == "relation" and len(rest) == 3 and rest[1] == "arity":
            relations[rest[0]] = [int(rest[2]), []]
        elif head == "tuple" and rest and rest[0] in relations:
            relations[rest[0]][1].append(tuple(rest[1:]))
        elif head == "designate0" and len(rest) == 1:
            zero = rest[0]
        elif head == "designate1" and len(rest) == 1:
            one = rest[0]
        else:
            raise ParseError(f"line {lineno}: cannot read {line!r}", text, lineno, 0)
    if name is None or kind is None:
        raise ParseError("theory files need 'theory <name>' and 'kind finite|nat'", text, 0, 0)
    if kind == "nat":
        return NatOrderStructure(name)
    try:
        return FiniteStructure(name, elements, {r: tuple(v) for r, v in relations.items()},
                               zero=zero, one=one)
    except ValueError as exc:
        raise ParseError(str(exc), text, 0, 0) from exc


def read_thy(path):
    with open(path, encoding="utf-8") as fh:
        return parse_thy(fh.read())


def format_thy(theory):
    lines = [f"theory {theory.name}", f"kind {theory.kind}"]
    if theory.kind == "finite":
        lines.append("elements " + " ".join(theory.elements))
        auto = {theory.singleton_name(e) for e in theory.elements} | {"P0", "P1"}
        for rel in sorted(theory.relations):
            if rel in auto:
                continue
            lines.append(f"relation {rel} arity {theory.signature[rel]}")
            for t in sorted(theory.relations[rel]):
                lines.append(f"tuple {rel} " + " ".join(t))
        if theory.admissible:
            lines.append(f"designate0 {theory.zero_element}")
            lines.append(f"designate1 {theory.one_element}")
    return "\n".join(lines) + "\n"


_BUILTIN = {
    "m2": binary_structure,
    "nat": NatOrderStructure,
}


def builtin_theory(name):
    """Fresh instance of a shipped structure (``m2`` or ``nat``)."""
    try:
        return _BUILTIN[name](name) if name == "m2" else _BUILTIN[name]()
    except KeyError:
        raise KeyError(f"no built-in theory named {name!r}") from None
