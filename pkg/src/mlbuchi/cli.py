"""Command-line interface: ``mlbuchi decide|auto|query``.

Exit status is 0 for a positive verdict (true, nonempty, accept,
included, witness found), 1 for its negation and 2 for errors.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from . import __version__
from .automata import (
    buechi_accepts_lasso, buechi_complement, buechi_equivalent, buechi_included,
    buechi_intersect, buechi_is_empty, buechi_project, buechi_union, concat, format_aut,
    format_lasso, nfa_accepts, nfa_complement, nfa_intersect, nfa_is_empty, nfa_project,
    nfa_union, omega_power, parse_aut, parse_lasso, write_dot,
)
from .automata.buechi import Lasso, SymbolicBuechi
from .automata.nfa import SymbolicNFA
from .errors import MLBuchiError
from .theory import builtin_theory, read_thy

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


# -- input helpers --------------------------------------------------------------


def load_theory(name):
    """A ``.thy`` path or the name of a built-in structure."""
    if name is None:
        return None
    if os.path.exists(name):
        return read_thy(name)
    try:
        return builtin_theory(name)
    except KeyError:
        raise CliError(f"no theory file or built-in theory named {name!r}") from None


def read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_aut(path, theory=None):
    text = read_text(path)
    if path.endswith(".2cm"):
        from .counter import compile_2cm, parse_2cm

        return compile_2cm(parse_2cm(text), theory)
    return parse_aut(text, theory)


def formula_text(arg):
    """Inline text, or ``@path`` / ``@-``; ``#`` starts a comment in files."""
    if arg.startswith("@"):
        return "\n".join(line.split("#", 1)[0] for line in read_text(arg[1:]).splitlines())
    return arg


class Report:
    """Collects the verdict and extra lines; renders text or JSON."""

    def __init__(self, args, theory=None):
        self.args = args
        self.theory = theory
        self.start = time.perf_counter()
        self.verdict = None
        self.positive = None
        self.lines = []
        self.data = {}

    def finish(self, verdict, positive, **data):
        self.verdict = verdict
        self.positive = positive
        self.data.update(data)
        return self

    def emit(self, out):
        if self.args.json:
            doc = {
                "command": self.args.command,
                "verdict": self.verdict,
                "value": self.positive,
                "witnesses": self.data.get("witnesses", {}),
                "timing": round(time.perf_counter() - self.start, 6),
                "oracle_calls": self.theory.oracle_calls if self.theory is not None else 0,
            }
            for key, value in self.data.items():
                if key != "witnesses":
                    doc[key] = value
            out.write(json.dumps(doc, sort_keys=True) + "\n")
        else:
            if self.verdict is not None:
                out.write(self.verdict + "\n")
            for line in self.lines:
                out.write(line + "\n")
        return EXIT_TRUE if self.positive else EXIT_FALSE


# -- decide -----------------------------------------------------------------------


def cmd_decide(args):
    theory = load_theory(args.theory)
    if theory is None:
        raise CliError("decide needs --theory")
    text = formula_text(args.formula)
    rep = Report(args, theory)
    options = {"jobs": args.jobs}
    if args.logic == "chain":
        from .logic.chain import decide_chain_sentence, parse_chain

        f = parse_chain(text)
        verdict, encs = decide_chain_sentence(f, theory, witness=True, **options)
        witnesses = {x: {"alpha": format_lasso(e.alpha), "beta": format_lasso(e.beta),
                         "finite": e.is_finite(theory),
                         "nodes": [list(map(str, u)) for u in e.nodes(theory)]}
                     for x, e in encs.items()}
        if args.witness:
            for x, w in witnesses.items():
                tail = "" if w["finite"] else " ..."
                nodes = " ".join("".join(u) if all(len(s) == 1 for s in u) else ".".join(u)
                                 for u in w["nodes"])
                rep.lines.append(f"{x}: alpha = {w['alpha']}  beta = {w['beta']}  chain = {{{nodes}{tail}}}")
    else:
        from .logic.mso import decide_mso, parse_mso

        f = parse_mso(text)
        verdict, lassos = decide_mso(f, theory, witness=True, **options)
        witnesses = {x: format_lasso(l) for x, l in lassos.items()}
        if args.witness:
            rep.lines.extend(f"{x}: lasso: {w}" for x, w in witnesses.items())
    return rep.finish("TRUE" if verdict else "FALSE", verdict,
                      witnesses=witnesses if args.witness else {})


# -- auto ---------------------------------------------------------------------------


def _kind(A):
    return "nfa" if isinstance(A, SymbolicNFA) else "buechi" if isinstance(A, SymbolicBuechi) else A.kind


def _expect(A, kinds, op):
    if _kind(A) not in kinds:
        raise CliError(f"{op} expects {' or '.join(kinds)} input, got {_kind(A)}")


def cmd_auto(args):
    theory = load_theory(args.theory)
    need = 2 if args.op in ("union", "intersect", "concat") else 1
    if len(args.inputs) != need:
        raise CliError(f"auto {args.op} takes {need} automaton file(s)")
    autos = [load_aut(p, theory) for p in args.inputs]
    theory = autos[0].theory
    A = autos[0]
    op = args.op
    if op in ("union", "intersect"):
        B = autos[1]
        if _kind(A) != _kind(B):
            raise CliError(f"cannot {op} {_kind(A)} with {_kind(B)}")
        _expect(A, ("nfa", "buechi"), op)
        table = {("union", "nfa"): nfa_union, ("union", "buechi"): buechi_union,
                 ("intersect", "nfa"): nfa_intersect, ("intersect", "buechi"): buechi_intersect}
        R = table[(op, _kind(A))](A, B)
    elif op == "complement":
        _expect(A, ("nfa", "buechi"), op)
        if _kind(A) == "nfa":
            R = nfa_complement(A)
        else:
            R = buechi_complement(A, ntp=args.ntp, jobs=args.jobs)
    elif op == "project":
        _expect(A, ("nfa", "buechi"), op)
        if args.component is None:
            raise CliError("project needs --component")
        R = nfa_project(A, args.component) if _kind(A) == "nfa" else buechi_project(A, args.component)
    elif op == "concat":
        _expect(A, ("nfa",), op)
        _expect(autos[1], ("buechi",), op)
        R = concat(A, autos[1])
    elif op == "omegapower":
        _expect(A, ("nfa",), op)
        R = omega_power(A)
    else:  # argparse restricts the choices
        raise CliError(f"unknown operation {op!r}")
    text = format_aut(R)
    rep = Report(args, theory)
    rep.finish("OK" if args.json else None, True, states=R.n_states, arity=R.arity, kind=R.kind)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif args.json:
        rep.data["automaton"] = text
    else:
        sys.stdout.write(text)
    if args.dot:
        write_dot(R, args.dot)
    return rep


# -- query --------------------------------------------------------------------------


def _random_lasso(theory, arity, rng, max_len=4):
    if getattr(theory, "is_finite", False):
        pool = list(theory.elements)
    else:
        pool = list(range(10))

    def letters(n):
        return [tuple(rng.choice(pool) for _ in range(arity)) for _ in range(n)]

    return Lasso(letters(rng.randint(0, max_len)), letters(rng.randint(1, max_len)))


def _member(A, lasso=None, word=None):
    if _kind(A) == "nfa":
        return nfa_accepts(A, word)
    if _kind(A) == "strong":
        from .strong import strong_accepts_lasso

        return strong_accepts_lasso(A, lasso)
    return buechi_accepts_lasso(A, lasso)


def _parse_word(text, theory):
    from .automata.buechi import parse_lasso as _pl

    if not text.strip():
        return ()
    return _pl("| " + text, theory).cycle


def cmd_query(args):
    theory = load_theory(args.theory)
    op = args.op
    need = 2 if op in ("incl", "equiv") else 1
    if len(args.inputs) != need:
        raise CliError(f"query {op} takes {need} automaton file(s)")
    autos = [load_aut(p, theory) for p in args.inputs]
    A = autos[0]
    theory = A.theory
    rep = Report(args, theory)
    if op == "empty":
        _expect(A, ("nfa", "buechi"), op)
        if _kind(A) == "nfa":
            empty, w = nfa_is_empty(A, witness=True)
            wit = None if empty else " ".join(_fmt_letter(x) for x in w)
            key = "word"
        else:
            empty, l = buechi_is_empty(A, witness=True)
            wit = None if empty else format_lasso(l)
            key = "lasso"
        if wit is not None:
            rep.lines.append(f"{key}: {wit}")
        return rep.finish("EMPTY" if empty else "NONEMPTY", not empty,
                          witnesses={} if wit is None else {key: wit})
    if op == "member":
        if args.random:
            rng = random.Random(args.seed)
            results = []
            for _ in range(args.random):
                l = _random_lasso(theory, A.arity, rng)
                ok = _member(A, lasso=l, word=l.stem + l.cycle)
                shown = format_lasso(l) if _kind(A) != "nfa" else " ".join(map(_fmt_letter, l.stem + l.cycle))
                results.append({"input": shown, "accept": ok})
                rep.lines.append(f"{'ACCEPT' if ok else 'REJECT'} {shown}")
            return rep.finish(None, True, samples=results)
        if _kind(A) == "nfa":
            if args.word is None:
                raise CliError("member on an nfa needs --word")
            ok = _member(A, word=_parse_word(args.word, theory))
        else:
            if args.lasso is None:
                raise CliError("member needs --lasso 'stem | cycle'")
            ok = _member(A, lasso=parse_lasso(args.lasso, theory))
        return rep.finish("ACCEPT" if ok else "REJECT", ok)
    if op in ("incl", "equiv"):
        B = autos[1]
        _expect(A, ("buechi",), op)
        _expect(B, ("buechi",), op)
        fn = buechi_included if op == "incl" else buechi_equivalent
        ok, l = fn(A, B, witness=True, ntp=args.ntp, jobs=args.jobs)
        wit = {} if ok or l is None else {"lasso": format_lasso(l)}
        if wit:
            rep.lines.append(f"lasso: {wit['lasso']}")
        yes = "INCLUDED" if op == "incl" else "EQUIVALENT"
        return rep.finish(yes if ok else "NOT", ok, witnesses=wit)
    if op == "strongsearch":
        from .strong import strong_bounded_nonemptiness

        _expect(A, ("strong",), op)
        res = strong_bounded_nonemptiness(A, args.bound, letters_per_transition=args.letters)
        if not res:
            return rep.finish("UNKNOWN", False, bound=args.bound, explored=res.explored)
        wit = {"lasso": format_lasso(res)}
        rep.lines.append(f"lasso: {wit['lasso']}")
        if args.inputs[0].endswith(".2cm"):
            from .counter import decode_witness, parse_2cm

            trace = decode_witness(A, parse_2cm(read_text(args.inputs[0])), res)
            if trace is not None:
                wit["trace"] = [list(c) for c in trace]
                rep.lines.append("trace: " + " ".join(f"({l},{m},{n})" for l, m, n in trace))
        return rep.finish("WITNESS", True, witnesses=wit, bound=args.bound)
    raise CliError(f"unknown query {op!r}")


def _fmt_letter(x):
    return str(x[0]) if len(x) == 1 else "(" + ",".join(map(str, x)) + ")"


# -- argument parsing --------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for NTP checks")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling options")
    common.add_argument("--theory", help="built-in theory name (m2, nat) or .thy file")

    p = argparse.ArgumentParser(prog="mlbuchi", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", parents=[common], help="decide a chain or MSO sentence")
    d.add_argument("--logic", choices=["chain", "mso"], default="chain")
    d.add_argument("--witness", action="store_true", help="print witnesses for the outer existentials")
    d.add_argument("formula", help="formula text, @file, or @- for stdin")
    d.set_defaults(func=cmd_decide)

    a = sub.add_parser("auto", parents=[common], help="automaton constructions")
    a.add_argument("op", choices=["union", "intersect", "complement", "project", "concat", "omegapower"])
    a.add_argument("inputs", nargs="+", help=".aut files ('-' for stdin)")
    a.add_argument("-o", "--output", help="output file (default stdout)")
    a.add_argument("--dot", help="also write a Graphviz rendering (plus a .legend file)")
    a.add_argument("--component", type=int, help="track removed by project (1-based)")
    a.add_argument("--ntp", choices=["graph", "automata"], default="graph")
    a.set_defaults(func=cmd_auto)

    q = sub.add_parser("query", parents=[common], help="emptiness, membership, inclusion")
    q.add_argument("op", choices=["empty", "member", "incl", "equiv", "strongsearch"])
    q.add_argument("inputs", nargs="+", help=".aut files ('-' for stdin; .2cm for strongsearch)")
    q.add_argument("--lasso", help="'stem | cycle' for member")
    q.add_argument("--word", help="space separated letters for member on an nfa")
    q.add_argument("--random", type=int, default=0, help="member: test N random inputs (uses --seed)")
    q.add_argument("--bound", type=int, default=20, help="strongsearch lasso length bound")
    q.add_argument("--letters", type=int, default=1, help="strongsearch letters tried per transition")
    q.add_argument("--witness", action="store_true", help="accepted for symmetry; witnesses are always printed")
    q.add_argument("--ntp", choices=["graph", "automata"], default="graph")
    q.set_defaults(func=cmd_query)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = args.func(args)
        return rep.emit(sys.stdout)
    except (MLBuchiError, CliError, OSError, ValueError, KeyError) as exc:
        msg = str(exc) or type(exc).__name__
        print(f"mlbuchi: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
