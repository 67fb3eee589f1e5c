import os

import pytest
from hypothesis import given, settings, strategies as st

import chain_corpus
import oracles
from mlbuchi.automata import Lasso, buechi_accepts_lasso, buechi_equivalent, buechi_is_empty, parse_aut
from mlbuchi.errors import NonAdmissibleTheory, NotAChain, NotASentence, ParseError, UnknownRelation
from mlbuchi.formula import Atom, Exists, Not, Var, neg
from mlbuchi.logic import (
    ChainEncoding, LetterPred, MsoCompiler, chain_to_mso, chain_tracks, compile_mso,
    decide_chain_sentence, decide_mso, encode_chain, format_chain, format_mso, formula_of,
    mso_tracks, parse_chain, parse_mso,
)
from mlbuchi.logic.chain import Sibling, holds_on_encodings
from mlbuchi.logic.mso import sing
from mlbuchi.theory import FiniteStructure, NatOrderStructure, binary_structure

M2 = binary_structure()
NAT = NatOrderStructure()
FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


# -- parsing -------------------------------------------------------------------------


def test_parse_examples():
    f = parse_chain("E X. Sing(X)")
    assert isinstance(f, Exists) and f.var == "X" and f.body == Atom("Sing", [Var("X")])
    g = parse_chain("E X. E Y. Succ(X,Y) & E(X,Y)")
    assert [a.rel for a in g.body.body.args] == ["Succ", "E"]


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_chain("E X Sing(X)")
    assert info.value.token == 3
    assert isinstance(info.value, SyntaxError)


def test_unknown_relations():
    with pytest.raises(UnknownRelation):
        parse_chain("E X. Foo(X)")
    with pytest.raises(UnknownRelation):
        parse_mso("E X. E(X, X)")


def test_sibling_syntax():
    f = parse_chain("E X. E Y. {X,Y: x1 < x2}")
    s = f.body.body
    assert isinstance(s, Sibling) and s.vars == ("X", "Y")
    assert parse_chain("E X. R1*(X)").body.rel == "R1*"


def test_round_trip_printing():
    for text, *_ in chain_corpus.M2 + chain_corpus.NAT:
        f = parse_chain(text)
        assert parse_chain(format_chain(f)) == f
    for text in ["E X. E Y. Sing(X) & Sub(X, {Y: x1 > 5})", "A X. Succ(X, Y) -> ~Pre(Y, X)",
                 "E T. Sub(T, {X1, X2: x1 = x2 | R1(x1)})"]:
        f = parse_mso(text)
        assert parse_mso(format_mso(f)) == f


CHAIN_ATOMS = ["Sing(X)", "Sing(Y)", "Sub(X,Y)", "Succ(X,Y)", "Pre(Y,X)", "E(X,Y)", "R1*(Y)",
               "{X,Y: x1 = x2}"]

chain_text = st.recursive(
    st.sampled_from(CHAIN_ATOMS),
    lambda inner: st.one_of(
        st.builds(lambda a: f"~({a})", inner),
        st.builds(lambda a, b: f"({a}) & ({b})", inner, inner),
        st.builds(lambda a, b: f"({a}) | ({b})", inner, inner),
        st.builds(lambda a, b: f"({a}) -> ({b})", inner, inner),
        st.builds(lambda q, a: f"{q} X. {a}", st.sampled_from("EA"), inner),
    ),
    max_leaves=5,
)


@settings(max_examples=80, deadline=None)
@given(chain_text)
def test_round_trip_generated(text):
    f = parse_chain(text)
    assert parse_chain(format_chain(f)) == f


# -- MSO compilation ----------------------------------------------------------------


def test_sing_track():
    A = compile_mso(parse_mso("Sing(X1)"), M2)
    assert A.arity == 1
    assert buechi_accepts_lasso(A, Lasso(["0", "1"], ["0"]))
    assert not buechi_accepts_lasso(A, Lasso([], ["0"]))
    assert not buechi_accepts_lasso(A, Lasso(["1"], ["1", "0"]))


def test_letter_predicate_automaton():
    f = parse_mso("Sub(X, {Y: R1(x1)})")
    A = compile_mso(f, M2)
    assert A.n_states == 1 and mso_tracks(f) == ("X", "Y")
    assert buechi_accepts_lasso(A, Lasso([("1", "1"), ("0", "0")], [("0", "1")]))
    assert not buechi_accepts_lasso(A, Lasso([("1", "0")], [("0", "1")]))


def test_set_atoms_against_bit_semantics():
    rng = oracles.seeded(31)
    atoms = {
        "Sub(X, Y)": lambda x, y: x <= y,
        "Succ(X, Y)": lambda x, y: len(x) == len(y) == 1 and min(y) == min(x) + 1,
        "Pre(X, Y)": lambda x, y: len(x) == len(y) == 1 and min(x) <= min(y),
    }
    for text, holds in atoms.items():
        A = compile_mso(parse_mso(text), M2)
        for _ in range(40):
            xs = [rng.choice("01") for _ in range(4)]
            ys = [rng.choice("01") for _ in range(4)]
            l = Lasso(list(zip(xs, ys)), [("0", "0")])
            x = {i for i, b in enumerate(xs) if b == "1"}
            y = {i for i, b in enumerate(ys) if b == "1"}
            assert buechi_accepts_lasso(A, l) == holds(x, y), (text, xs, ys)


def test_decide_mso_examples():
    assert decide_mso(parse_mso("E X. Sing(X)"), M2)
    assert not decide_mso(parse_mso("E X. Sing(X) & ~Sub(X, X)"), M2)
    assert decide_mso(parse_mso("A X. Sing(X) -> E Y. Succ(X, Y)"), M2)
    assert not decide_mso(parse_mso("E X. Sing(X) & A Y. Sing(Y) -> Pre(Y, X)"), M2)
    with pytest.raises(NotASentence):
        decide_mso(parse_mso("Sing(X)"), M2)


def test_decide_mso_fixture_with_witness():
    with open(os.path.join(FIXTURES, "exists_big.mlf")) as fh:
        text = "".join(line for line in fh if not line.startswith("#"))
    ok, w = decide_mso(parse_mso(text), NAT, witness=True)
    assert ok
    X, Y = w["X"], w["Y"]
    marked = [i for i in range(len(X) + 2) if X.letter(i) == (1,)]
    assert len(marked) == 1 and Y.letter(marked[0])[0] > 5


def test_closed_sentences_compile_to_dummy_track():
    assert not buechi_is_empty(compile_mso(parse_mso("E X. Sing(X)"), M2))
    assert buechi_is_empty(compile_mso(parse_mso("E X. Sing(X) & ~Sing(X)"), M2))


def test_non_admissible_theory():
    plain = FiniteStructure("plain", ["a", "b"])
    with pytest.raises(NonAdmissibleTheory):
        compile_mso(parse_mso("Sing(X)"), plain)


def test_explicit_track_order():
    f = parse_mso("Sub(X, Y)")
    A = compile_mso(f, M2, tracks=["Y", "Z", "X"])
    assert A.arity == 3
    assert buechi_accepts_lasso(A, Lasso([("1", "0", "1")], [("0", "1", "0")]))
    assert not buechi_accepts_lasso(A, Lasso([("0", "0", "1")], [("0", "1", "0")]))


def test_weak_option_gives_the_same_language():
    f = parse_mso("A X. Sing(X) -> E Y. Succ(X, Y) & Sub(Y, {Z: R1(x1)})")
    g = parse_mso("E T. Sing(T) & A S. Pre(T, S) -> Sub(S, {Z: R0(x1)})")
    for h in (f, g):
        body = h.body if isinstance(h, Exists) else h
        tracks = sorted(body.free_vars)
        auto = compile_mso(body, M2, tracks=tracks)
        off = compile_mso(body, M2, tracks=tracks, compiler=MsoCompiler(M2, weak="off"))
        assert buechi_equivalent(auto, off)


@pytest.mark.parametrize("seed", range(5))
def test_formula_of_round_trip(seed):
    rng = oracles.seeded(40 + seed)
    A, _ = oracles.random_automaton(rng, max_states=2, density=0.6)
    B = compile_mso(formula_of(A), M2, tracks=["X1"])
    assert buechi_equivalent(A, B)


def test_formula_of_fixture():
    A = parse_aut(open(os.path.join(FIXTURES, "inf1.aut")).read(), theory=M2)
    B = compile_mso(formula_of(A), M2, tracks=["X1"])
    assert buechi_equivalent(A, B)


# -- chain encodings ---------------------------------------------------------------------


def test_encode_chain_examples():
    e = encode_chain([], M2)
    assert e.alpha == Lasso([], ["0"]) and e.beta == Lasso([], ["0"])
    e = encode_chain([("1",), ("1", "0")], M2)
    assert e.alpha.prefix(4) == (("1",), ("0",), ("0",), ("0",))
    assert e.beta.prefix(4) == (("1",), ("1",), ("0",), ("0",))
    assert sorted(e.nodes(M2)) == [("1",), ("1", "0")]
    assert e.is_finite(M2)
    with pytest.raises(NotAChain):
        encode_chain([("0",), ("1",)], M2)
    with pytest.raises(NotAChain):
        encode_chain([()], M2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_encode_chain_round_trip(seed):
    rng = oracles.seeded(seed)
    c = oracles.random_chain(rng, oracles.M2, 4)
    assert set(encode_chain(sorted(c), M2).nodes(M2)) == c


def test_chain_translation_of_sing():
    f = chain_to_mso(parse_chain("Sing(X)"))
    assert f == sing("Z_X")
    assert chain_tracks(parse_chain("Sub(X, Y)")) == ("Y_X", "Z_X", "Y_Y", "Z_Y")


ATOM_KINDS = ["Sing(X)", "Sub(X,Y)", "Sub(Y,X)", "Succ(X,Y)", "Pre(X,Y)", "E(X,Y)",
              "R0*(X)", "R1*(Y)", "{X,Y: ~x1 = x2}", "{X,Y: x1 = x2}", "Sub(X,X)"]


@pytest.fixture(scope="module")
def compiler():
    return MsoCompiler(M2)


@pytest.mark.parametrize("atom", ATOM_KINDS)
def test_encoding_soundness(atom, compiler):
    """The compiled atom accepts encode_chain outputs exactly when the atom holds in the tree."""
    rng = oracles.seeded(sum(map(ord, atom)))
    f = parse_chain(atom)
    chains = [oracles.random_chain(rng, oracles.M2, 4) for _ in range(12)]
    # singletons and sibling pairs make the positive cases common enough
    singles = [frozenset([u]) for u in oracles.tree_nodes(oracles.M2, 3)]
    pool = chains + rng.sample(singles, 8)
    for cx in pool:
        for cy in rng.sample(pool, 6) + [cx]:
            env = {"X": cx, "Y": cy}
            assign = {"X": encode_chain(sorted(cx), M2), "Y": encode_chain(sorted(cy), M2)}
            expected = oracles.chain_atom(f, env)
            assert holds_on_encodings(f, M2, assign, compiler=compiler) == expected, (atom, cx, cy)


# -- decisions -----------------------------------------------------------------------------


def corpus(theory_name):
    return chain_corpus.M2 if theory_name == "m2" else chain_corpus.NAT


@pytest.mark.parametrize("entry", chain_corpus.M2 + chain_corpus.NAT, ids=lambda e: e[0])
def test_semantics_bridge(entry):
    text, truth, elements, depths, note = entry
    f = parse_chain(text)
    theory = M2 if elements == ("0", "1") else NAT
    assert decide_chain_sentence(f, theory) == truth, note
    if depths is not None:
        assert oracles.bounded_truth(f, list(elements), depths) == truth, note


def test_infinite_chain_sentence_is_invisible_to_finite_cuts():
    text, truth, elements, depths, _ = chain_corpus.M2[-1]
    assert depths is None and truth
    f = parse_chain(text)
    assert not oracles.bounded_truth(f, list(elements), (3,))
    ok, encs = decide_chain_sentence(f, M2, witness=True)
    assert ok and not encs["X"].is_finite(M2)


@pytest.mark.parametrize("entry", chain_corpus.M2 + chain_corpus.NAT, ids=lambda e: e[0])
def test_negation_coherence(entry):
    text, _, elements, _, _ = entry
    theory = M2 if elements == ("0", "1") else NAT
    f = parse_chain(text)
    assert decide_chain_sentence(f, theory) != decide_chain_sentence(neg(f), theory)


def test_decide_examples():
    assert decide_chain_sentence(parse_chain("E X. Sing(X)"), M2)
    assert not decide_chain_sentence(parse_chain("E X. E Y. Succ(X,Y) & E(X,Y)"), M2)
    assert decide_chain_sentence(parse_chain("E X. E Y. Sing(X) & Sing(Y) & E(X,Y)"), M2)
    assert decide_chain_sentence(parse_chain("A X. Sub(X,X)"), M2)


def test_sibling_witness_over_nat():
    f = parse_chain("E X. E Y. Sing(X) & Sing(Y) & E(X,Y) & {X,Y: x1 < x2}")
    ok, encs = decide_chain_sentence(f, NAT, witness=True)
    assert ok
    (x,), (y,) = encs["X"].nodes(NAT), encs["Y"].nodes(NAT)
    assert len(x) == len(y) and x[:-1] == y[:-1] and x[-1] < y[-1]
    assert holds_on_encodings(f.body.body, NAT, encs)


def test_decide_rejects_open_formulas():
    with pytest.raises(NotASentence):
        decide_chain_sentence(parse_chain("Sing(X)"), M2)


def test_strict_and_guarded_translations_agree():
    for text, truth, elements, _, _ in chain_corpus.M2[:6]:
        f = parse_chain(text)
        body = f
        while isinstance(body, Exists):
            body = body.body
        if not body.free_vars:
            continue
        tracks = chain_tracks(body)
        A = compile_mso(chain_to_mso(body), M2, tracks=tracks)
        B = compile_mso(chain_to_mso(body, strict=True), M2, tracks=tracks)
        assert buechi_equivalent(A, B), text


@pytest.mark.parametrize("atom", ["Succ(X,Y)", "Pre(X,Y)", "E(X,Y)", "{X,Y: ~x1 = x2}", "{X,Y: R1(x1) & R0(x2)}"])
def test_node_atoms_on_all_singleton_pairs(atom, compiler):
    f = parse_chain(atom)
    nodes = oracles.tree_nodes(oracles.M2, 3)
    for u in nodes:
        for v in nodes:
            env = {"X": frozenset([u]), "Y": frozenset([v])}
            assign = {"X": encode_chain([u], M2), "Y": encode_chain([v], M2)}
            assert holds_on_encodings(f, M2, assign, compiler=compiler) == oracles.chain_atom(f, env), (atom, u, v)
