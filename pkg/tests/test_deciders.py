import random

import pytest

from relsyl.corpus import encode_one_in_three, gen_delta_ni, gen_gamma_n, OneInThreeInstance
from relsyl.corpus import random_problem
from relsyl.deciders import (NO, UNKNOWN, YES, CaseCertificate, Verdict, assemble_cases_proof,
                             build_pair_model, build_pair_model_restricted, check_case_certificate,
                             check_verdict, decide, decide_l1, decide_l2plus, decide_l3,
                             decide_l35, determines_existentials, verdict_from_json)
from relsyl.errors import FragmentError
from relsyl.proofs import check_proof
from relsyl.semantics import satisfies, satisfies_all
from relsyl.syntax import Fragment, Noun, Some, parse_sentence, term_closure

P = parse_sentence


def T(*xs):
    return [P(x) for x in xs]


def verified(gamma, phi, v):
    rep = check_verdict(gamma, phi, v)
    assert rep.accepted, rep.reason
    return v


def test_l1_examples():
    g = T("all x y", "all y z")
    assert verified(g, P("all (r all z) (r all x)"),
                    decide_l1(g, P("all (r all z) (r all x)"))).answer == YES
    v = decide_l1([], P("all p p"))
    assert v.answer == YES and v.certificate.rule == "AXIOM"
    assert verified(T("all p q"), P("all q p"), decide_l1(T("all p q"), P("all q p"))).answer == NO


def test_l1_rejects_other_fragments():
    with pytest.raises(FragmentError):
        decide_l1(T("some p q"), P("all p q"))


def test_l2plus_gamma_n():
    g = gen_gamma_n(2)
    assert verified(g, P("some a a"), decide_l2plus(g, P("some a a"))).answer == YES
    d = gen_delta_ni(2, 1)
    assert verified(d, P("some a a"), decide_l2plus(d, P("some a a"))).answer == NO


def test_l2plus_cases_example():
    g = T("some c d", "all a x", "all a y", "all (r all a) x", "all (r all a) y")
    assert verified(g, P("some x y"), decide_l2plus(g, P("some x y"))).answer == YES


def test_l2plus_conservative_for_all_goals():
    g = T("all x y", "all y z")
    v = decide_l2plus(g, P("all (r all z) (r all x)"))
    assert v.answer == YES
    assert v.certificate.rules_used() <= {"AXIOM", "BARBARA", "ANTI", "PREMISE"}


def test_l35_examples():
    g = T("some p p", "all p (r some q)")
    assert verified(g, P("some q q"), decide_l35(g, P("some q q"))).answer == YES
    g = T("all p (r some q)")
    v = verified(g, P("some q q"), decide_l35(g, P("some q q")))
    assert v.answer == NO and v.certificate.size <= 1
    assert verified([], P("some p p"), decide_l35([], P("some p p"))).answer == NO


def test_l3_examples():
    g, phi = encode_one_in_three(OneInThreeInstance(("U", "V", "W"), (("U", "V", "W"),)))
    assert verified(g, phi, decide_l3(g, phi, probe=1)).answer == NO
    assert verified([], P("all p p"), decide_l3([], P("all p p"))).answer == YES
    g = T("all p q", "all q s")
    v = verified(g, P("all p s"), decide_l3(g, P("all p s")))
    assert v.answer == YES and "BARBARA" in v.certificate.rules_used()


def test_l3_case_certificate_and_assembly():
    g, phi = T("all p (r all p)"), P("all p (r some p)")
    v = verified(g, phi, decide_l3(g, phi))
    assert v.answer == YES and isinstance(v.certificate, CaseCertificate)
    assert len(v.certificate.branches) >= 2
    tree = assemble_cases_proof(g, phi, v.certificate)
    assert tree.conclusion == phi and check_proof(g, tree, "L3Rules").accepted


def test_l35_case_assembly():
    g, phi = T("all p (r all p)"), P("all p (r some p)")
    v = verified(g, phi, decide_l35(g, phi))
    assert v.answer == YES
    if isinstance(v.certificate, CaseCertificate):
        tree = assemble_cases_proof(g, phi, v.certificate)
        assert check_proof(g, tree, "L35Rules").accepted


def test_case_certificate_tampering_detected():
    g, phi = T("all p (r all p)"), P("all p (r some p)")
    cert = decide_l3(g, phi).certificate
    short = CaseCertificate(cert.flavor, cert.terms, cert.verbs, cert.branches[:-1])
    assert not check_case_certificate(g, phi, short).accepted


def test_pair_models():
    m = build_pair_model([], [Noun("p")])
    assert m.domain == ("{p}",) and m.nouns["p"] == {"{p}"}
    m = build_pair_model(T("all x y"), [Noun("x"), Noun("y")])
    assert "{x}" in m.nouns["y"]
    assert build_pair_model_restricted([], [Noun("p")]).size == 0


def test_truth_lemma_on_random_theories():
    rng = random.Random(5)
    for _ in range(30):
        g, phi = random_problem(rng, "L2", depth=1, max_sentences=3)
        Tm = sorted(term_closure(list(g) + [phi]), key=str)
        m = build_pair_model(g, Tm)
        assert all(satisfies(m, s) for s in g if not isinstance(s, Some))
        assert all(satisfies(m, Some(x, y)) for x in Tm for y in Tm)
        ok, _ = determines_existentials(g, Tm)
        if ok:
            mr = build_pair_model_restricted(g, Tm)
            assert all(satisfies(mr, s) for s in g if isinstance(s, Some))


def test_determines_existentials_examples():
    Tm = [Noun("p"), Noun("q")]
    assert determines_existentials(T("some p p", "some q q"), Tm)[0]
    ok, witness = determines_existentials(T("all p q"), Tm, verbs=["r"])
    assert not ok and witness is not None
    empty = T("all p q", "all q p", "all p (r all p)", "all q (r all p)",
              "all p (r all q)", "all q (r all q)")
    assert determines_existentials(empty, Tm)[0]


def test_dispatch_and_override():
    assert decide([], P("all p p")).answer == YES
    assert decide(T("some p q"), P("some q q")).answer == YES
    with pytest.raises(FragmentError):
        decide(T("some p q"), P("some q q"), fragment=Fragment.L1)


def test_verdict_json_round_trip():
    g = gen_gamma_n(2)
    for v in (decide(g, P("some a a")), decide(gen_delta_ni(2, 1), P("some a a"))):
        back = verdict_from_json(v.to_json())
        assert back.answer == v.answer
        target = g if v.answer == YES else gen_delta_ni(2, 1)
        assert check_verdict(target, P("some a a"), back).accepted


def test_check_verdict_rejects_wrong_certificates():
    g = T("all p q")
    assert not check_verdict(g, P("all q p"), Verdict(YES, None)).accepted
    yes = decide_l1(T("all p q", "all q s"), P("all p s"))
    assert not check_verdict(g, P("all p s"), yes).accepted
    no = decide_l1(g, P("all q p"))
    assert not check_verdict(T("all q p"), P("all q p"), no).accepted
    assert not check_verdict(g, P("all q p"), Verdict(UNKNOWN, None, {})).accepted
    assert check_verdict(g, P("all q p"), Verdict(UNKNOWN, None, {"bound": 1})).accepted


def test_countermodels_satisfy_theory():
    for n in range(1, 4):
        for i in range(1, n + 1):
            d = gen_delta_ni(n, i)
            v = decide(d, P("some a a"))
            assert v.answer == NO and satisfies_all(v.certificate, d)
