import random
import time

import pytest

from relsyl.audit import fuzz_rule, round_trip
from relsyl.clausal import (canonical, decide_clausal, decide_l5, default_depth, embed_l45,
                            embed_problem, rel_expand, resolve)
from relsyl.corpus import CnfInstance, encode_3sat, random_problem
from relsyl.deciders import NO, UNKNOWN, YES, check_verdict, decide
from relsyl.errors import FragmentError
from relsyl.semantics import model_to_json, satisfies
from relsyl.syntax import Noun, parse_sentence

P = parse_sentence


def C(text):
    return canonical(P(text))


def T(*xs):
    return [P(x) for x in xs]


def test_embedding():
    assert embed_l45(P("all p q")) == C("[ p (not q) ]")
    assert embed_l45(P("some p q")) == C("< p q >")
    assert embed_l45(P("all p p")) == C("[ p (not p) ]")
    with pytest.raises(FragmentError):
        embed_l45(P("all p q or some p p"))


def test_canonical_sorts_and_dedups():
    assert canonical(P("[ q p q ]")) == P("[ p q ]")
    prem, goal = embed_problem(T("all p q", "[ p (not q) ]"), P("some p p"))
    assert prem == (C("[ p (not q) ]"),) and goal == P("< p >")


def test_resolve_examples():
    assert resolve(P("[ p (not q) ]"), P("[ q (not s) ]"), Noun("q")) == C("[ p (not s) ]")
    with pytest.raises(ValueError):
        resolve(P("[ p ]"), P("[ (not p) ]"), Noun("p"))
    assert resolve(P("[ p q ]"), P("[ (not p) q ]"), Noun("p")) == C("[ q ]")


def test_rel_expand_examples():
    assert rel_expand(P("[ (not x) y ]"), "r") == [C("[ (r all x) (not (r all y)) ]")]
    assert rel_expand(P("[ x ]"), "r") == [C("[ (not (r all x)) ]")]
    # with a negated positive literal the rule still applies, once per choice
    assert len(rel_expand(P("[ (not x) (not y) ]"), "r")) == 2
    with pytest.raises(ValueError):
        rel_expand(P("[ x y ]"), "r")


def timed(gamma, goal, **kw):
    t = time.perf_counter()
    v = decide_clausal(gamma, goal, **kw)
    return v, time.perf_counter() - t


def test_derived_barbara():
    g, phi = T("[ p (not q) ]", "[ q (not s) ]"), P("[ p (not s) ]")
    v, dt = timed(g, phi, D=2, m=2)
    assert v.answer == YES and check_verdict(g, phi, v).accepted and dt < 1
    assert "RES" in v.certificate.rules_used()


def test_raa_example():
    g, phi = T("< p q >"), P("< p p >")
    v, _ = timed(g, phi)
    assert v.answer == YES and check_verdict(g, phi, v).accepted
    assert v.certificate.rule == "RAA"


def test_derived_darii_and_anti():
    for g, phi in [(T("some x y", "all y z"), P("some x z")),
                   (T("all x y"), P("all (r all y) (r all x)"))]:
        v, dt = timed(g, phi)
        assert v.answer == YES and check_verdict(g, phi, v).accepted and dt < 1


def test_no_with_one_point_model():
    v = decide_clausal([], P("[ p ]"), m=1)
    assert v.answer == NO and v.certificate.size == 1
    assert v.certificate.nouns["p"] == {v.certificate.domain[0]}


def test_l5_examples():
    assert decide_l5([], P("all x x")).answer == YES
    g = T("all p (not p)")
    v = decide_l5(g, P("some q q"))
    assert v.answer == NO and check_verdict(g, P("some q q"), v).accepted
    assert not satisfies(v.certificate, P("some q q"))


def test_unsat_3sat_encoding_never_no():
    F = CnfInstance(("P",), ((("P", True),) * 3, (("P", False),) * 3))
    g, phi = encode_3sat(F)
    v = decide(g, phi)
    assert v.answer in (YES, UNKNOWN)
    assert check_verdict(g, phi, v).accepted


def test_default_depth():
    prem, goal = embed_problem(T("all (r all p) q"), P("all p q"))
    assert default_depth(prem, goal) == 3


def test_rejects_other_fragments():
    with pytest.raises(FragmentError):
        decide_clausal(T("all p (r some q)"), P("all p q"))


def test_unknown_reports_bounds():
    g = T("all (not u) (r all y)", "all (not u) (r all (not y))", "all (r all z) w", "some q q")
    v = decide_clausal(g, P("all q (not q)"), m=0, clause_cap=50)
    assert v.answer in (YES, NO, UNKNOWN)
    if v.answer == UNKNOWN:
        assert v.certificate is None and "depth_bound" in v.stats


@pytest.mark.parametrize("name", ["RES", "REL", "STRUCTURAL", "CLAXIOM", "EFQ", "RAA"])
def test_clausal_rules_sound(name):
    assert fuzz_rule(name, 300, seed=2).ok


def test_subsumption_semantics():
    rng = random.Random(0)
    from relsyl.semantics import random_model
    c1, c2 = P("[ p ]"), P("[ p (not q) ]")
    for k in range(50):
        m = random_model(["p", "q"], [], 3, rng.random())
        if satisfies(m, c1):
            assert satisfies(m, c2)


def test_round_trip_on_random_l4_instances():
    rng = random.Random(4)
    for _ in range(60):
        g, phi = random_problem(rng, "L4HalfPlus", max_nouns=2, max_verbs=1, depth=1,
                                max_sentences=3)
        v = decide_clausal(g, phi, clause_cap=500)
        ok, why = round_trip(g, phi, v)
        assert ok, why
        if v.answer == NO:
            assert model_to_json(v.certificate)["domain"] is not None
