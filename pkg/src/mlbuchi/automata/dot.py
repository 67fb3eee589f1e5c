"""Graphviz rendering.  Long labels are cut at 60 characters and listed in a legend."""
from __future__ import annotations

from ..syntax import format_formula

MAX_LABEL = 60


def _esc(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(A, name="A"):
    """Return ``(dot_source, legend_text)``."""
    legend = []
    lines = [f'digraph "{_esc(name)}" {{', "  rankdir=LR;", '  __start [shape=point];']
    for q in range(A.n_states):
        shape = "doublecircle" if q in A.accepting else "circle"
        lines.append(f'  s{q} [shape={shape}, label="{_esc(A.state_name(q))}"];')
    lines.append(f"  __start -> s{A.initial};")
    edges = [(p, f, q) for p, f, q in A.transitions]
    edges += [(A.initial, f, q) for q, f in getattr(A, "initial_transitions", ())]
    for p, f, q in edges:
        text = format_formula(f)
        if len(text) > MAX_LABEL:
            key = f"L{len(legend) + 1}"
            legend.append(f"{key}: {text}")
            text = text[:MAX_LABEL - len(key) - 4] + f"… [{key}]"
        lines.append(f'  s{p} -> s{q} [label="{_esc(text)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n", "\n".join(legend) + ("\n" if legend else "")


def write_dot(A, path, name="A"):
    """Write ``path`` and, if any label was cut, ``path + '.legend'``."""
    src, legend = to_dot(A, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(src)
    if legend:
        with open(path + ".legend", "w", encoding="utf-8") as fh:
            fh.write(legend)
    return path
