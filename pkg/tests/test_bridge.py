import random

import pytest
from hypothesis import given, settings, strategies as st

from relsyl.bridge import (AllOfLit, NounBar, SomeOfLit, eval_rstar, expand_model, flatten,
                           fresh_name, is_rstar_countermodel, name_map_to_json,
                           parse_rstar_sentence, parse_rstar_theory, print_rstar_sentence,
                           satisfies_rstar, star_term, star_translate)
from relsyl.corpus import random_problem
from relsyl.errors import FragmentError, ParseError
from relsyl.semantics import (Countermodel, FiniteModel, eval_term, is_countermodel,
                              oracle_consequence, random_model, restrict_model, satisfies)
from relsyl.syntax import Noun, parse_sentence, parse_term, vocabulary

P = parse_sentence
R = parse_rstar_sentence

FLAT_TERMS = [Noun("p"), Noun("q"), NounBar("p"), NounBar("q")] + [
    ctor("r", n, bar) for ctor in (AllOfLit, SomeOfLit) for n in ("p", "q")
    for bar in (False, True)]


def test_star_examples():
    assert star_translate(R("all (~r all p) q")) == P("all (not (r some p)) q")
    assert star_translate(R("some p q")) == P("some p q")
    assert star_translate(R("all (not p) (~r some q)")) == P("all (not p) (not (r all q))")


def test_flat_parse_errors():
    with pytest.raises(ParseError):
        R("all (r all (r all p)) q")
    with pytest.raises(ParseError):
        R("all @p q")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_star_preserves_denotation(seed):
    m = random_model(["p", "q"], ["r"], 3, seed)
    for t in FLAT_TERMS:
        assert eval_rstar(m, t) == eval_term(m, star_term(t))


def test_flatten_examples():
    g, phi, x = flatten([], P("all p p"))
    assert [print_rstar_sentence(s) for s in g] == ["all @p p", "all p @p"]
    assert print_rstar_sentence(phi) == "all @p @p"
    g, phi, x = flatten([], P("all (r all p) q"))
    assert "all @0.r.all.p.1 (r all @p)" in [print_rstar_sentence(s) for s in g]
    assert print_rstar_sentence(phi) == "all @0.r.all.p.1 @q"


def test_flatten_rejects_boolean_sentences():
    with pytest.raises(FragmentError):
        flatten([], P("all p q or some p p"))


def test_fresh_names_are_deterministic():
    t = parse_term("(not (r some p))")
    assert fresh_name(t) == fresh_name(parse_term("(not (r some p))"))
    _, _, x1 = flatten([P("all p (r all q)")], P("some p q"))
    _, _, x2 = flatten([P("all p (r all q)")], P("some p q"))
    assert name_map_to_json(x1) == name_map_to_json(x2)


def test_expand_empty_model():
    g, phi, x = flatten([P("all (not p) (r some q)")], P("all p q"))
    em = expand_model(FiniteModel((), {"p": frozenset(), "q": frozenset()}, {"r": frozenset()}), x)
    assert all(satisfies_rstar(em, s) for s in g)
    assert satisfies_rstar(em, phi)


def test_flat_print_parse_round_trip():
    g, phi, _ = flatten([P("all (not p) (r some (not q))"), P("some p (r all q)")], P("all p q"))
    text = "\n".join(print_rstar_sentence(s) for s in g + [phi])
    assert parse_rstar_theory(text) == g + [phi]


def test_expanded_models_satisfy_bridge_sentences():
    rng = random.Random(3)
    for k in range(40):
        g, phi = random_problem(rng, "L5Half", max_nouns=2, max_verbs=1, depth=2,
                                max_sentences=2)
        gs, phis, x = flatten(g, phi)
        for j in range(5):
            m = random_model(["p", "q"], ["r"], 3, 100 * k + j)
            em = expand_model(m, x)
            n_bridge = len(gs) - sum(1 for s in g)
            assert all(satisfies_rstar(em, s) for s in gs[:n_bridge])
            for s in g:
                renamed = type(s)(Noun(x[s.lhs]), Noun(x[s.rhs]))
                assert satisfies_rstar(em, renamed) == satisfies(m, s)
            assert satisfies_rstar(em, phis) == satisfies(m, phi)


def test_countermodels_transfer_both_ways():
    rng = random.Random(0)
    seen = 0
    for _ in range(60):
        g, phi = random_problem(rng, "L5Half", max_nouns=2, max_verbs=1, depth=2,
                                max_sentences=2)
        gs, phis, x = flatten(g, phi)
        r = oracle_consequence(g, phi, 2)
        if isinstance(r, Countermodel):
            seen += 1
            assert is_rstar_countermodel(expand_model(r.model, x), gs, phis)
        flat = oracle_consequence([star_translate(s) for s in gs], star_translate(phis), 2,
                                  backend="sat")
        assert isinstance(flat, Countermodel) == isinstance(r, Countermodel)
        if isinstance(flat, Countermodel):
            nouns, verbs = vocabulary(list(g) + [phi])
            back = restrict_model(flat.model, set(nouns), set(verbs))
            assert is_countermodel(back, list(g), phi)
    assert seen > 0
