import os

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mlbuchi.automata import Lasso, buechi_accepts_lasso, buechi_is_empty, parse_aut
from mlbuchi.counter import CounterMachine, Instr, compile_2cm, decode_witness, format_2cm, parse_2cm, read_2cm
from mlbuchi.errors import ArityMismatch, MalformedMachine, NotFinite
from mlbuchi.strong import (
    StrongBuchi, Unknown, strong_accepts_lasso, strong_bounded_nonemptiness, strong_profile,
    strong_to_buechi_finite,
)
from mlbuchi.syntax import parse_formula as P
from mlbuchi.theory import NatOrderStructure, binary_structure

M2 = binary_structure()
NAT = NatOrderStructure()
FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def clone(theory):
    """Every letter equals the previous one."""
    return StrongBuchi(theory, 1, 2, 0, [1], [(1, P("true"))], [(1, P("x1 = y1"), 1)])


def increasing(theory, below=None):
    first = P("true") if below is None else P(f"x1 < {below}")
    step = P("y1 < x1") if below is None else P(f"y1 < x1 & x1 < {below}")
    return StrongBuchi(theory, 1, 2, 0, [1], [(1, first)], [(1, step, 1)])


def test_membership_examples():
    C = clone(M2)
    assert strong_accepts_lasso(C, Lasso(["1"], ["1"]))
    assert not strong_accepts_lasso(C, Lasso([], ["0", "1"]))
    assert not strong_accepts_lasso(C, Lasso(["0"], ["1"]))
    # 5 < 5 fails where the cycle meets itself
    assert not strong_accepts_lasso(increasing(NAT), Lasso([], [5]))
    assert strong_accepts_lasso(clone(NAT), Lasso([3], [3]))


def test_interior_labels_checked():
    with pytest.raises(ArityMismatch):
        StrongBuchi(M2, 1, 2, 0, [1], [(1, P("R1(y1)"))], [])
    with pytest.raises(ArityMismatch):
        strong_accepts_lasso(clone(M2), Lasso([], [("0", "0")]))


def test_membership_against_oracle():
    rng = oracles.seeded(5)
    for _ in range(15):
        A, E = oracles.random_strong(rng)
        for stem, cycle in oracles.lassos(oracles.M2, 2, 2):
            assert strong_accepts_lasso(A, oracles.as_lasso(stem, cycle)) == oracles.strong_member(E, stem, cycle)


# -- finite collapse ------------------------------------------------------------------


def test_clone_collapse():
    B = strong_to_buechi_finite(clone(M2))
    assert B.n_states == 5
    C = clone(M2)
    for stem, cycle in oracles.lassos(oracles.M2, 3, 3):
        l = oracles.as_lasso(stem, cycle)
        assert buechi_accepts_lasso(B, l) == strong_accepts_lasso(C, l)


def test_collapse_without_previous_letter():
    A = StrongBuchi(M2, 1, 3, 0, [2], [(1, P("true"))],
                    [(1, P("R1(x1)"), 2), (2, P("R0(x1)"), 1), (2, P("true"), 2)])
    plain = parse_aut("""buechi
theory m2
arity 1
states 3
initial 0
accepting 2
trans 0 1 true
trans 1 2 R1(x1)
trans 2 1 R0(x1)
trans 2 2 true
""", theory=M2)
    B = strong_to_buechi_finite(A)
    for stem, cycle in list(oracles.lassos(oracles.M2, 2, 2))[:10]:
        l = oracles.as_lasso(stem, cycle)
        assert buechi_accepts_lasso(B, l) == buechi_accepts_lasso(plain, l)


def test_collapse_needs_finite_theory():
    with pytest.raises(NotFinite):
        strong_to_buechi_finite(clone(NAT))


def test_collapse_emptiness_matches_search():
    rng = oracles.seeded(8)
    for _ in range(15):
        A, _ = oracles.random_strong(rng)
        found = strong_bounded_nonemptiness(A, 12, letters_per_transition=2)
        # over a two-letter theory every (state, previous letter) node is within reach of bound 12
        assert (not buechi_is_empty(strong_to_buechi_finite(A))) == bool(found)
        if found:
            assert strong_accepts_lasso(A, found)


# -- bounded search --------------------------------------------------------------------


def test_search_clone_over_nat():
    w = strong_bounded_nonemptiness(clone(NAT), 10)
    assert isinstance(w, Lasso)
    assert len(set(w.cycle)) == 1
    assert strong_accepts_lasso(clone(NAT), w)


def test_search_cannot_refute_empty_language():
    # one state and letters below 3: an increasing run has at most three
    # letters, so no cycle exists and the search only explores that much
    res = strong_bounded_nonemptiness(increasing(NAT, below=3), 50)
    assert isinstance(res, Unknown) and not res
    assert res.bound == 50 and res.explored <= 4


def test_search_zero_bound():
    res = strong_bounded_nonemptiness(clone(NAT), 0)
    assert isinstance(res, Unknown)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_search_monotone_in_bound(seed):
    rng = oracles.seeded(seed)
    A, _ = oracles.random_strong(rng)
    found_at = None
    for b in range(0, 9):
        res = strong_bounded_nonemptiness(A, b, letters_per_transition=2)
        if found_at is not None:
            assert isinstance(res, Lasso)
        if isinstance(res, Lasso):
            assert len(res.stem) + len(res.cycle) <= b
            assert strong_accepts_lasso(A, res)
            found_at = b if found_at is None else found_at


# -- strong profiles ---------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_profile_composition(seed):
    rng = oracles.seeded(seed)
    A, _ = oracles.random_strong(rng)
    stem = [rng.choice("01") for _ in range(rng.randint(0, 2))]
    cycle = [rng.choice("01") for _ in range(rng.randint(1, 3))]
    l = Lasso(stem, cycle)
    i = rng.randint(0, 3)
    j = rng.randint(i, 5)
    k = rng.randint(j + 1, 7)
    whole = strong_profile(A, l, i, k)
    composed = strong_profile(A, l, i, j) * strong_profile(A, l, j + 1, k)
    assert composed == whole
    assert composed.segment == (i, k)
    for p in range(A.n_states):
        assert whole.J[p] & ~whole.I[p] == 0


def test_profiles_compose_only_when_adjacent():
    A = clone(M2)
    l = Lasso([], ["0"])
    with pytest.raises(ValueError):
        strong_profile(A, l, 0, 1) * strong_profile(A, l, 3, 4)


def test_profile_of_clone_segment():
    A = clone(M2)
    l = Lasso(["0"], ["1"])
    # the 0 -> 1 change at position 1 kills the only interior loop
    assert strong_profile(A, l, 1, 1).I[1] == 0
    assert strong_profile(A, l, 2, 4).I[1] == 1 << 1


# -- two-counter machines ------------------------------------------------------------------


def replay(machine, trace):
    """The trace must be the machine's run from (1, 0, 0) up to STOP."""
    run, halted = machine.run(max_steps=len(trace) + 1)
    return halted and trace == run


def test_halting_machine():
    m = parse_2cm("1 INC X1\n2 STOP\n")
    A = compile_2cm(m)
    w = strong_bounded_nonemptiness(A, 10)
    assert isinstance(w, Lasso)
    assert decode_witness(A, m, w) == [(1, 0, 0), (2, 1, 0)]
    assert w.prefix(3) == ((0, 0), (1, 0), (0, 0)) and set(w.cycle) == {(0, 0)}


def test_diverging_machine():
    A = compile_2cm(read_2cm(os.path.join(FIXTURES, "loop.2cm")))
    assert isinstance(strong_bounded_nonemptiness(A, 100), Unknown)


def test_saturating_decrement():
    m = read_2cm(os.path.join(FIXTURES, "dec.2cm"))
    A = compile_2cm(m)
    w = strong_bounded_nonemptiness(A, 10)
    assert decode_witness(A, m, w) == [(1, 0, 0), (2, 0, 0)]
    assert m.step((1, 0, 0)) == (2, 0, 0)


def test_longer_machine_needs_larger_bound():
    m = read_2cm(os.path.join(FIXTURES, "count.2cm"))
    A = compile_2cm(m)
    # ten configurations plus the padding cycle
    assert isinstance(strong_bounded_nonemptiness(A, 10), Unknown)
    w = strong_bounded_nonemptiness(A, 11)
    assert len(w.stem) + len(w.cycle) == 11
    trace = decode_witness(A, m, w)
    assert replay(m, trace)
    assert trace[-1] == (7, 0, 2)


def test_every_machine_witness_replays():
    rng = oracles.seeded(21)
    checked = 0
    for _ in range(40):
        m = random_machine(rng)
        run, halted = m.run(max_steps=12)
        A = compile_2cm(m)
        w = strong_bounded_nonemptiness(A, 14)
        if isinstance(w, Lasso):
            checked += 1
            assert replay(m, decode_witness(A, m, w))
        else:
            # the search is complete for short runs: nothing halts within the bound
            assert not (halted and len(run) + 1 <= 14)
    assert checked >= 5


def random_machine(rng):
    k = rng.randint(2, 5)
    ins = []
    for i in range(1, k):
        op = rng.choice(["INC", "DEC", "IFZ"])
        if op == "IFZ":
            ins.append(Instr(op, rng.randint(1, 2), rng.randint(1, k), rng.randint(1, k)))
        elif i < k:
            ins.append(Instr(op, rng.randint(1, 2)))
    ins.append(Instr("STOP"))
    return CounterMachine(ins)


def test_compiled_machine_matches_fixture():
    m = read_2cm(os.path.join(FIXTURES, "inc.2cm"))
    A = compile_2cm(m)
    B = parse_aut(open(os.path.join(FIXTURES, "tcm.aut")).read())
    for l in [Lasso([(0, 0), (1, 0)], [(0, 0)]), Lasso([(0, 0), (2, 0)], [(0, 0)]), Lasso([], [(0, 0)])]:
        assert strong_accepts_lasso(A, l) == strong_accepts_lasso(B, l)


@pytest.mark.parametrize("text", [
    "",
    "1 INC X1\n",
    "1 INC X3\n2 STOP\n",
    "1 IFZ X1 1 9\n2 STOP\n",
    "2 STOP\n",
    "1 JMP 2\n2 STOP\n",
    "1 STOP\n2 INC X1\n",
])
def test_malformed_machines(text):
    with pytest.raises(MalformedMachine):
        parse_2cm(text)


def test_machine_round_trip():
    for name in ("count.2cm", "dec.2cm", "inc.2cm", "loop.2cm"):
        m = read_2cm(os.path.join(FIXTURES, name))
        assert parse_2cm(format_2cm(m)) == m
