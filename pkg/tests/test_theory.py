import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mlbuchi.errors import MissingBinding, NotASentence, UnknownRelation, UnsupportedAtom
from mlbuchi.formula import Const, FALSE, exists, free_vars, neg, substitute
from mlbuchi.syntax import format_formula, parse_formula as P
from mlbuchi.theory import (
    FiniteStructure, NatOrderStructure, binary_structure, decide, evaluate, format_thy,
    mintermize, parse_thy, project, witness,
)


@pytest.fixture(scope="module")
def m2():
    return binary_structure()


@pytest.fixture(scope="module")
def nat():
    return NatOrderStructure()


# -- decide ------------------------------------------------------------------------


def test_decide_examples(m2, nat):
    assert decide(m2, P("E x1. R1(x1)"))
    assert not decide(m2, P("E x1. R0(x1) & R1(x1)"))
    assert decide(nat, P("E x1. x1 < 3 & 1 < x1"))
    assert not decide(nat, P("E x1. x1 < 3 & 2 < x1"))


def test_decide_rejects_open_formulas(m2, nat):
    with pytest.raises(NotASentence):
        decide(m2, P("R1(x1)"))
    with pytest.raises(NotASentence):
        decide(nat, P("E x1. x1 < x2"))


def test_unsupported_atoms(m2, nat):
    with pytest.raises(UnsupportedAtom):
        decide(nat, P("E x1. Foo(x1)"))
    with pytest.raises(UnsupportedAtom):
        decide(m2, P("E x1. R7(x1)"))


def test_nested_quantifiers_nat(nat):
    # no largest natural, but a least one
    assert decide(nat, P("A x1. E x2. x1 < x2"))
    assert not decide(nat, P("E x1. A x2. x2 < x1"))
    assert decide(nat, P("E x1. A x2. x1 <= x2"))
    assert decide(nat, P("A x1. A x2. x1 < x2 -> x1 + 1 <= x2"))


# -- evaluate -----------------------------------------------------------------------


def test_evaluate_examples(m2, nat):
    assert evaluate(m2, P("R1(x1)"), {"x1": "1"})
    assert not evaluate(nat, P("x1 < x2"), {"x1": 2, "x2": 2})
    assert evaluate(nat, P("E y. Suc(x1, y) & y = 5"), {"x1": 4})
    assert not evaluate(nat, P("E y. Suc(x1, y) & y = 5"), {"x1": 3})


def test_evaluate_needs_bindings(m2, nat):
    with pytest.raises(MissingBinding):
        evaluate(m2, P("R1(x1) & R0(x2)"), {"x1": "1"})
    with pytest.raises(MissingBinding):
        evaluate(nat, P("x1 < x2"), {"x1": 1})


# -- project ------------------------------------------------------------------------


def test_project_examples(m2, nat):
    g = project(nat, P("x1 < x2 & x2 < 4"), "x2")
    # a witness for x2 is at most 3, so x1 in 0..10 covers both sides of the boundary
    for x1 in range(11):
        assert evaluate(nat, g, {"x1": x1}) == (x1 < 3)
    g = project(m2, P("R0(x1) & R1(x2)"), "x2")
    assert free_vars(g) == {"x1"}
    for a in oracles.M2:
        assert evaluate(m2, g, {"x1": a}) == (a == "0")
    assert project(nat, P("x2 < 0"), "x2") == FALSE


def test_project_absent_variable_is_identity(nat):
    f = P("x1 < 3")
    g = project(nat, f, "x2")
    assert all(evaluate(nat, g, {"x1": v}) == (v < 3) for v in range(6))


def test_nat_projection_is_quantifier_free(nat):
    g = project(nat, P("x1 < x2 & x2 < x3 + 2 & ~x2 = 4"), "x2")
    assert "E " not in format_formula(g)
    assert free_vars(g) <= {"x1", "x3"}


# -- mintermize ---------------------------------------------------------------------


def test_mintermize_examples(m2, nat):
    ms = mintermize(m2, [P("R1(x1)")])
    assert sorted(J for J, _ in ms) == [frozenset(), frozenset({1})]
    for J, psi in ms:
        assert evaluate(m2, psi, {"x1": "1"}) == (J == frozenset({1}))
    assert [(J, format_formula(f)) for J, f in mintermize(m2, [])] == [(frozenset(), "true")]
    ms = mintermize(nat, [P("x1 < 3"), P("x1 < 5")])
    assert len(ms) == 3
    assert frozenset({1}) not in {J for J, _ in ms}


def test_mintermize_many_labels_is_not_exponential(nat):
    # twelve nested bounds leave only thirteen consistent minterms
    labels = [P(f"x1 < {k}") for k in range(1, 13)]
    assert len(mintermize(nat, labels)) == 13


# -- witness ------------------------------------------------------------------------


def test_witness_examples(m2, nat):
    assert witness(m2, P("R0(x1)")) == {"x1": "0"}
    assert witness(nat, P("2 < x1 & x1 < 4")) == {"x1": 3}
    assert witness(nat, P("x1 < x1")) is None


def test_witness_lexicographically_least(nat):
    assert witness(nat, P("x1 > 5 & x2 = x1 + 2")) == {"x1": 6, "x2": 8}


# -- finite structures ---------------------------------------------------------------


def test_finite_structure_relations():
    T = FiniteStructure("tri", ["a", "b", "c"], relations={"Lt": (2, [("a", "b"), ("b", "c"), ("a", "c")])},
                        zero="a", one="b")
    assert T.admissible
    assert decide(T, P("A x1. E x2. Lt(x1, x2) | Rc(x1)"))
    assert not decide(T, P("E x1. Lt(x1, x1)"))
    assert decide(T, P("E x1. Ra(x1) & Lt(x1, x1)")) is False
    ms = T.mintermize([P("Lt(x1, x2)")])
    assert len(ms) == 2


def test_admissibility_requires_distinct_designations():
    with pytest.raises(ValueError):
        FiniteStructure("one", ["a", "b"], zero="a", one="a")
    assert not FiniteStructure("plain", ["a", "b"]).admissible


def test_thy_round_trip():
    text = """theory tri
kind finite
elements a b c
relation Lt arity 2
tuple Lt a b
tuple Lt b c
designate0 a
designate1 c
"""
    T = parse_thy(text)
    again = parse_thy(format_thy(T))
    assert format_thy(again) == format_thy(T)
    assert decide(again, P("E x1. E x2. E x3. Lt(x1, x2) & Lt(x2, x3) & Rc(x3)"))
    assert not decide(again, P("E x1. Lt(x1, x1)"))
    assert again.zero_element == "a" and again.one_element == "c"
    assert format_thy(parse_thy(format_thy(NatOrderStructure()))) == format_thy(NatOrderStructure())


# -- properties ----------------------------------------------------------------------

NAT_ATOMS = ["x1 < x2", "x2 < x1", "x1 = x2 + 1", "Suc(x1, x2)", "x1 = 0", "x2 < 4",
             "x1 <= x2 + 2", "x2 = 3", "P1(x1)", "x1 + 2 < x2"]

nat_formula = st.recursive(
    st.sampled_from(NAT_ATOMS),
    lambda inner: st.one_of(
        st.builds(lambda a: f"~({a})", inner),
        st.builds(lambda a, b: f"({a}) & ({b})", inner, inner),
        st.builds(lambda a, b: f"({a}) | ({b})", inner, inner),
    ),
    max_leaves=5,
).map(P)

M2_ATOMS = ["R0(x1)", "R1(x1)", "R0(x2)", "R1(x2)", "x1 = x2", "true", "false"]

m2_formula = st.recursive(
    st.sampled_from(M2_ATOMS),
    lambda inner: st.one_of(
        st.builds(lambda a: f"~({a})", inner),
        st.builds(lambda a, b: f"({a}) & ({b})", inner, inner),
        st.builds(lambda a, b: f"({a}) -> ({b})", inner, inner),
    ),
    max_leaves=6,
).map(P)


@settings(max_examples=60, deadline=None)
@given(st.lists(m2_formula, min_size=0, max_size=4))
def test_minterm_partition_m2(labels):
    m2 = binary_structure()
    ms = mintermize(m2, labels)
    for a, b in itertools.product(oracles.M2, repeat=2):
        env = {"x1": a, "x2": b}
        hits = [J for J, psi in ms if oracles.letter_holds(psi, env)]
        assert hits == [frozenset(j for j, f in enumerate(labels, 1) if oracles.letter_holds(f, env))]


@settings(max_examples=40, deadline=None)
@given(st.lists(nat_formula, min_size=1, max_size=3),
       st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=5, max_size=15))
def test_minterm_partition_nat(labels, samples):
    nat = NatOrderStructure()
    ms = mintermize(nat, labels)
    assert len({J for J, _ in ms}) == len(ms)
    for x1, x2 in samples:
        env = {"x1": x1, "x2": x2}
        hits = [J for J, psi in ms if oracles.letter_holds(psi, env)]
        assert hits == [frozenset(j for j, f in enumerate(labels, 1) if oracles.letter_holds(f, env))]


@settings(max_examples=60, deadline=None)
@given(m2_formula)
def test_projection_soundness_m2(f):
    m2 = binary_structure()
    g = project(m2, f, "x2")
    for a in oracles.M2:
        assert oracles.letter_holds(g, {"x1": a}) == any(
            oracles.letter_holds(f, {"x1": a, "x2": b}) for b in oracles.M2)


@settings(max_examples=60, deadline=None)
@given(nat_formula)
def test_projection_soundness_nat(f):
    # every constant and offset in the atoms is at most 4, so if some x2 works
    # for x1 <= 12 then one at most x1 + 6 <= 20 does
    nat = NatOrderStructure()
    g = project(nat, f, "x2")
    for x1 in range(13):
        assert oracles.letter_holds(g, {"x1": x1}) == any(
            oracles.letter_holds(f, {"x1": x1, "x2": x2}) for x2 in range(21))


@settings(max_examples=40, deadline=None)
@given(nat_formula, st.integers(0, 10))
def test_decide_evaluate_coherence_nat(f, x1):
    nat = NatOrderStructure()
    open_f = exists("x2", f)
    closed = substitute(open_f, {"x1": Const(x1)})
    assert nat.decide(closed) == nat.evaluate(open_f, {"x1": x1})
    assert nat.decide(neg(closed)) == (not nat.decide(closed))
    assert nat.decide(neg(neg(closed))) == nat.decide(closed)


@settings(max_examples=40, deadline=None)
@given(m2_formula, st.sampled_from(oracles.M2))
def test_decide_evaluate_coherence_m2(f, a):
    m2 = binary_structure()
    open_f = exists("x2", f)
    closed = substitute(open_f, {"x1": Const(a)})
    assert m2.decide(closed) == m2.evaluate(open_f, {"x1": a})
    assert m2.decide(neg(neg(closed))) == m2.decide(closed)


def test_cache_can_be_disabled(monkeypatch):
    f = P("E x1. x1 < 3 & 1 < x1")
    monkeypatch.setenv("MLBUCHI_ORACLE_CACHE", "off")
    off = NatOrderStructure()
    off.decide(f)
    off.decide(f)
    monkeypatch.setenv("MLBUCHI_ORACLE_CACHE", "on")
    on = NatOrderStructure()
    on.decide(f)
    on.decide(f)
    assert off.oracle_calls == on.oracle_calls == 2
    first = NatOrderStructure()
    first.decide(f)
    assert on.stats["computed"] == first.stats["computed"]
    assert off.stats["computed"] == 2 * first.stats["computed"]
