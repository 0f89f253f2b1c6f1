import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from relsyl.errors import ParseError
from relsyl.syntax import (All, AllOf, AllOrSome, EmptyMeet, Fragment, Not, Noun, Some, SomeOf,
                           fragment_of, goal_comment, parse_sentence, parse_term, parse_theory,
                           print_sentence, print_term, print_theory, sorted_terms, subterms,
                           term_closure, term_closure_plus, tokenize,
                           vocabulary)

from conftest import sentences, terms

P = parse_sentence


def test_parse_theory_one_sentence():
    th = parse_theory("nouns: p q\nverbs: r\nall (r all p) q")
    assert th.sentences == (All(AllOf("r", Noun("p")), Noun("q")),)
    assert th.nouns == {"p", "q"} and th.verbs == {"r"}


def test_parse_alpha_of_gamma_n():
    th = parse_theory("nouns: a b\nverbs: r1 r2\nsome (r1 all (r1 all a)) (r1 all (r1 all a))")
    u = AllOf("r1", AllOf("r1", Noun("a")))
    assert th.sentences == (Some(u, u),)


def test_undeclared_identifier_is_reported():
    with pytest.raises(ParseError) as e:
        parse_theory("nouns: p\nall p q")
    assert "q" in str(e.value) and e.value.line == 2


def test_infer_mode_collects_vocabulary():
    th = parse_theory("all (r all p) q\nsome q p", infer=True)
    assert th.nouns == {"p", "q"} and th.verbs == {"r"}


def test_noun_and_verb_clash_rejected():
    with pytest.raises(ParseError):
        parse_theory("nouns: p\nverbs: p\n")
    with pytest.raises(ParseError):
        parse_theory("all (p all q) p", infer=True)


@pytest.mark.parametrize("text", ["all p", "some p q q", "all (r all) p", "all (not) p",
                                  "[ ]", "< p", "all p q or", "foo p q", "all (r every p) q"])
def test_malformed_sentences(text):
    with pytest.raises(ParseError):
        parse_sentence(text)


def test_reserved_sigil_rejected_in_user_text():
    with pytest.raises(ParseError):
        parse_sentence("all @p q")
    assert parse_sentence("all @p q", allow_reserved=True).lhs == Noun("@p")


def test_printing_examples():
    assert print_sentence(All(Noun("p"), AllOf("r", Noun("q")))) == "all p (r all q)"
    assert print_sentence(EmptyMeet([Noun("p"), Not(Noun("q"))])) == "[ p (not q) ]"
    assert print_sentence(AllOrSome(*map(Noun, "abxy"))) == "all a b or some x y"


def test_comments_and_goal_line():
    text = "# goal: some a a\nnouns: a\n# note\nsome a a  # trailing\n"
    assert goal_comment(text) == "some a a"
    assert len(parse_theory(text)) == 1


def test_duplicate_sentences_dropped_with_warning():
    with pytest.warns(UserWarning):
        th = parse_theory("nouns: p\nall p p\nall p p")
    assert len(th) == 1


def test_tokenize_positions():
    toks = tokenize("all (r all p) q")
    assert [t.text for t in toks] == ["all", "(", "r", "all", "p", ")", "q"]
    assert toks[2].col == 6


@settings(max_examples=300, deadline=None)
@given(sentences(4))
def test_parse_print_round_trip(s):
    assert parse_sentence(print_sentence(s)) == s


@settings(max_examples=200, deadline=None)
@given(terms(4))
def test_term_round_trip(t):
    assert parse_term(print_term(t)) == t


def test_term_closure_examples():
    delta = [P("all x y"), P("all y z"), P("all (r all z) (r all x)")]
    assert term_closure(delta) == {Noun("x"), Noun("y"), Noun("z"),
                                   AllOf("r", Noun("z")), AllOf("r", Noun("x"))}
    assert term_closure([]) == frozenset()
    got = term_closure([P("some p (r some (not q))")])
    assert got == {Noun("p"), Noun("q"), Not(Noun("q")), SomeOf("r", Not(Noun("q")))}


def test_term_closure_plus_examples():
    delta = [P("all x y"), P("all y z"), P("all (r all z) (r all x)")]
    assert term_closure_plus(delta) == term_closure(delta) | {AllOf("r", Noun("y")),
                                                             AllOf("r", AllOf("r", Noun("z"))),
                                                             AllOf("r", AllOf("r", Noun("x")))}
    assert term_closure_plus([P("all p q")]) == term_closure([P("all p q")])
    assert term_closure_plus([P("all p (r all p)")]) == {
        Noun("p"), AllOf("r", Noun("p")), AllOf("r", AllOf("r", Noun("p")))}


@settings(max_examples=200, deadline=None)
@given(st.lists(sentences(3), max_size=3))
def test_closure_properties(delta):
    T = term_closure(delta)
    for t in T:
        assert set(subterms(t)) <= T
    Tp = term_closure_plus(delta)
    Ts = term_closure_plus(delta, with_some=True)
    nv = len(vocabulary(delta)[1])
    assert T <= Tp <= Ts
    assert len(Tp) <= len(T) * (1 + nv)
    assert len(Ts) <= len(T) * (1 + 2 * nv)


def test_sorted_terms_is_deterministic():
    ts = [Noun("q"), AllOf("r", Noun("p")), Noun("p")]
    assert sorted_terms(ts) == sorted_terms(reversed(ts))


@pytest.mark.parametrize("text,frag", [
    ("all p q", Fragment.L1), ("some p q", Fragment.L2),
    ("all p q or some p p", Fragment.L2Plus), ("all p (r some q)", Fragment.L3),
    ("some p (r some q)", Fragment.L3Half), ("all p (not q)", Fragment.L4),
    ("some p (not q)", Fragment.L4Half), ("[ p q ]", Fragment.L4Plus),
    ("< p q >", Fragment.L4HalfPlus), ("all (not p) (r some q)", Fragment.L5),
    ("some (not p) (r some q)", Fragment.L5Half)])
def test_fragment_of(text, frag):
    assert fragment_of([parse_sentence(text)]) is frag


@settings(max_examples=200, deadline=None)
@given(st.lists(sentences(2), min_size=1, max_size=3), sentences(2))
def test_fragment_monotone(delta, extra):
    try:
        before = fragment_of(delta)
        after = fragment_of(delta + [extra])
    except ValueError:
        return
    assert before <= after


def test_theory_round_trip_through_text():
    th = parse_theory("nouns: p q\nverbs: r\nall (r all p) q\n[ p (not q) ]\nall p q or some q q")
    assert parse_theory(print_theory(th)) == th
