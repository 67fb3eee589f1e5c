"""Two-counter machines and their strong-automaton encoding over ``(ℕ, <, Suc)²``.

Machine files (``.2cm``) hold one numbered instruction per line::

    1 INC X1
    2 IFZ X2 4 3
    3 DEC X2
    4 STOP

``IFZ Xi a b`` jumps to ``a`` when register ``i`` is zero and to ``b``
otherwise.  ``INC`` and ``DEC`` fall through to the next line; ``DEC`` of
zero leaves zero.  The last instruction must be ``STOP``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedMachine
from .formula import Atom, Const, Shift, Var, conj, disj, neg
from .strong import StrongBuchi, strong_step
from .theory.nat import NatOrderStructure


@dataclass(frozen=True)
class Instr:
    op: str               # INC, DEC, IFZ, STOP
    reg: int = 0          # 1 or 2
    then: int = 0         # IFZ targets
    other: int = 0


class CounterMachine:
    def __init__(self, instructions):
        self.instructions = tuple(instructions)
        self._check()

    @property
    def k(self):
        return len(self.instructions)

    def __getitem__(self, label):
        return self.instructions[label - 1]

    def _check(self):
        k = len(self.instructions)
        if k == 0:
            raise MalformedMachine("empty machine")
        for i, ins in enumerate(self.instructions, start=1):
            if ins.op not in ("INC", "DEC", "IFZ", "STOP"):
                raise MalformedMachine(f"line {i}: unknown instruction {ins.op!r}")
            if ins.op != "STOP" and ins.reg not in (1, 2):
                raise MalformedMachine(f"line {i}: register must be X1 or X2")
            if ins.op == "IFZ" and not (1 <= ins.then <= k and 1 <= ins.other <= k):
                raise MalformedMachine(f"line {i}: jump target outside 1..{k}")
            if ins.op in ("INC", "DEC") and i == k:
                raise MalformedMachine(f"line {i}: falls off the end")
        if self.instructions[-1].op != "STOP":
            raise MalformedMachine("the last instruction must be STOP")

    def step(self, config):
        label, m, n = config
        ins = self[label]
        regs = [m, n]
        if ins.op == "STOP":
            return None
        if ins.op == "INC":
            regs[ins.reg - 1] += 1
            return (label + 1, *regs)
        if ins.op == "DEC":
            regs[ins.reg - 1] = max(0, regs[ins.reg - 1] - 1)
            return (label + 1, *regs)
        target = ins.then if regs[ins.reg - 1] == 0 else ins.other
        return (target, *regs)

    def run(self, max_steps=1000, start=(1, 0, 0)):
        """Configurations from ``start``; ``halted`` tells whether STOP was reached."""
        trace = [start]
        for _ in range(max_steps):
            nxt = self.step(trace[-1])
            if nxt is None:
                return trace, True
            trace.append(nxt)
        return trace, self[trace[-1][0]].op == "STOP"

    def __eq__(self, other):
        return isinstance(other, CounterMachine) and self.instructions == other.instructions

    def __repr__(self):
        return f"CounterMachine({format_2cm(self)!r})"


def parse_2cm(text):
    instrs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            label = int(parts[0])
        except ValueError:
            raise MalformedMachine(f"bad line {line!r}") from None
        if label != len(instrs) + 1:
            raise MalformedMachine(f"instruction {label} out of sequence")
        op = parts[1].upper() if len(parts) > 1 else ""

        def reg(tok):
            if tok.upper() not in ("X1", "X2"):
                raise MalformedMachine(f"line {label}: bad register {tok!r}")
            return int(tok[1])

        if op in ("INC", "DEC") and len(parts) == 3:
            instrs.append(Instr(op, reg(parts[2])))
        elif op == "IFZ" and len(parts) == 5:
            instrs.append(Instr(op, reg(parts[2]), int(parts[3]), int(parts[4])))
        elif op == "STOP" and len(parts) == 2:
            instrs.append(Instr("STOP"))
        else:
            raise MalformedMachine(f"line {label}: cannot read {line!r}")
    return CounterMachine(instrs)


def read_2cm(path):
    with open(path, encoding="utf-8") as fh:
        return parse_2cm(fh.read())


def format_2cm(machine):
    lines = []
    for i, ins in enumerate(machine.instructions, start=1):
        if ins.op == "STOP":
            lines.append(f"{i} STOP")
        elif ins.op == "IFZ":
            lines.append(f"{i} IFZ X{ins.reg} {ins.then} {ins.other}")
        else:
            lines.append(f"{i} {ins.op} X{ins.reg}")
    return "\n".join(lines) + "\n"


# -- encoding ------------------------------------------------------------------


def _x(i):
    return Var(f"x{i}")


def _y(i):
    return Var(f"y{i}")


def _eq(a, b):
    return Atom("=", (a, b))


def _keep(i):
    return _eq(_x(i), _y(i))


def compile_2cm(machine, theory=None):
    """Strong automaton over ``ℕ²`` for terminating runs from ``(1, 0, 0)``.

    State ``ℓ`` (1..k) means the letter just read holds the registers of a
    configuration at instruction ``ℓ``; state 0 is initial and ``k + 1`` an
    accepting sink entered after STOP by the padding letter ``(0, 0)``.
    """
    theory = theory or NatOrderStructure()
    k = machine.k
    zero = Const(0)
    pad = conj(_eq(_x(1), zero), _eq(_x(2), zero))
    trans = []
    for label, ins in enumerate(machine.instructions, start=1):
        if ins.op == "STOP":
            trans.append((label, pad, k + 1))
            continue
        r, o = ins.reg, 3 - ins.reg
        if ins.op == "INC":
            f = conj(_eq(_x(r), Shift(_y(r), 1)), _keep(o))
            trans.append((label, f, label + 1))
        elif ins.op == "DEC":
            dec = disj(conj(_eq(_y(r), zero), _eq(_x(r), zero)),
                       conj(neg(_eq(_y(r), zero)), _eq(Shift(_x(r), 1), _y(r))))
            trans.append((label, conj(dec, _keep(o)), label + 1))
        else:
            same = conj(_keep(1), _keep(2))
            trans.append((label, conj(_eq(_y(r), zero), same), ins.then))
            trans.append((label, conj(neg(_eq(_y(r), zero)), same), ins.other))
    trans.append((k + 1, pad, k + 1))
    return StrongBuchi(theory, 2, k + 2, 0, [k + 1], [(1, pad)], trans,
                       names=["start"] + [str(i) for i in range(1, k + 1)] + ["halt"])


def decode_witness(A, machine, lasso, max_len=None):
    """Recover the configurations ``(ℓ, m, n)`` spelled by an accepted lasso.

    The encoding is deterministic, so following the unique run until the
    halt state yields the trace.
    """
    k = machine.k
    limit = max_len or (len(lasso) + 2 * k + 2)
    trace = []
    state, prev = A.initial, None
    for i in range(limit):
        letter = lasso.letter(i)
        nxt = strong_step(A, state, letter, prev)
        if len(nxt) != 1:
            return None
        (state,) = nxt
        if state == k + 1:
            return trace
        trace.append((state, *letter))
        prev = letter
    return None


__all__ = [
    "Instr", "CounterMachine", "parse_2cm", "read_2cm", "format_2cm", "compile_2cm",
    "decode_witness",
]
