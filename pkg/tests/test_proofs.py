import pytest

from relsyl.audit import fuzz_rule
from relsyl.corpus import gen_gamma_n
from relsyl.proofs import (ANTI, BARBARA, DARII, ProofNode, all_prefix, anti_image, anti_proof,
                           check_chains_instance, check_proof, hyp, match_instance, premise,
                           proof_from_json, proof_to_json, rule, validate_chain)
from relsyl.syntax import All, Noun, parse_sentence

P = parse_sentence
N = Noun


def node(text, rule_name, *children, discharged=()):
    return ProofNode(P(text), rule_name, children, discharged)


def test_match_instance_examples():
    s = match_instance(BARBARA, [P("all x y"), P("all y z")], P("all x z"))
    assert s == {"x": N("x"), "y": N("y"), "z": N("z")}
    assert match_instance(ANTI, [P("all x y")], P("all (r all y) (r all x)")) is not None
    assert match_instance(DARII, [P("some x y"), P("all y z")], P("all x z")) is None


def test_premises_matched_in_any_order():
    assert match_instance(BARBARA, [P("all y z"), P("all x y")], P("all x z")) is not None


def cases_example():
    """some x y from the five premises, splitting on whether a is empty."""
    theory = [P(s) for s in ("some c d", "all a x", "all a y", "all (r all a) x",
                             "all (r all a) y")]
    h1 = hyp(P("some a a"))
    ax = node("some a x", "DARII", h1, premise(P("all a x")))
    xa = node("some x a", "SOME2", ax)
    left = node("some x y", "DARII", xa, premise(P("all a y")))
    h2 = hyp(P("all c (r all a)"))
    cc = node("some c c", "SOME1", premise(P("some c d")))
    cra = node("some c (r all a)", "DARII", cc, h2)
    rac = node("some (r all a) c", "SOME2", cra)
    rara = node("some (r all a) (r all a)", "SOME1", rac)
    rax = node("some (r all a) x", "DARII", rara, premise(P("all (r all a) x")))
    xra = node("some x (r all a)", "SOME2", rax)
    right = node("some x y", "DARII", xra, premise(P("all (r all a) y")))
    root = ProofNode(P("some x y"), "CASES", (left, right),
                     (P("some a a"), P("all c (r all a)")))
    return theory, root


def test_cases_example_accepted():
    theory, root = cases_example()
    assert check_proof(theory, root, "L2Cases").accepted


def test_cases_example_needs_the_discharge_rule():
    theory, root = cases_example()
    rep = check_proof(theory, root, "Base0")
    assert not rep.accepted and "CASES" in rep.reason


def test_undischarged_hypothesis_rejected():
    theory, root = cases_example()
    left = root.children[0]
    rep = check_proof(theory, left, "L2Cases")
    assert not rep.accepted and "undischarged" in rep.reason


def test_dangling_premise_rejected():
    root = node("all x z", "BARBARA", premise(P("all x y")), premise(P("all y z")))
    rep = check_proof([P("all x y")], root, "L1Core")
    assert not rep.accepted and rep.path == (1,)


def test_rule_outside_rule_set_rejected():
    root = node("some x x", "SOME1", premise(P("some x y")))
    assert not check_proof([P("some x y")], root, "L1Core").accepted
    assert check_proof([P("some x y")], root, "Base0").accepted


def test_raa_with_different_withdrawn_sentences_rejected():
    ys = P("[ p ]")
    good = ProofNode(P("< p >"), "RAA", (premise(P("< q >")), premise(P("[ q ]"))),
                     (ys, ys))
    theory = [P("< q >"), P("[ q ]")]
    assert check_proof(theory, good, "ClausalRules").accepted
    bad = ProofNode(P("< p >"), "RAA", (premise(P("< q >")), premise(P("[ q ]"))),
                    (ys, P("[ s ]")))
    assert not check_proof(theory, bad, "ClausalRules").accepted


def test_withdrawal_is_per_subproof():
    # some a a is withdrawn on the left only, so its use on the right stays open
    h = hyp(P("some a a"))
    node_ = ProofNode(P("some a a"), "CASES", (h, h), (P("some a a"), P("all b (r all a)")))
    rep = check_proof([], node_, "L2Cases")
    assert not rep.accepted and "undischarged" in rep.reason


def gamma_chains(n):
    gamma = list(gen_gamma_n(n))
    u = all_prefix(["r1", "r1"], N("a"))
    c1 = [P("all a a")]
    c2 = [All(u, u)] + gamma[1:]
    return gamma, c1, c2


def test_chain_of_gamma_n():
    gamma, _, c2 = gamma_chains(3)
    ch = validate_chain(c2)
    assert ch.start == all_prefix(["r1", "r1"], N("a")) and ch.end == N("a")
    assert {N("a")} in ch.missing_link_choices()


def test_chain_examples():
    assert validate_chain([P("all a b")]).alternatives == ()
    ch = validate_chain([P("all a z"), P("all (r all t) b")])
    assert ch.alternatives == (frozenset({N("t")}),)
    with pytest.raises(ValueError):
        validate_chain([P("all a z"), P("all t b")])


def test_chains_instance_over_gamma_n():
    for n in range(1, 5):
        gamma, c1, c2 = gamma_chains(n)
        alpha = gamma[0]
        assert check_chains_instance(P("some a a"), alpha, [c1, c2]) is None
        leaf = lambda s: premise(s) if s in gamma else ProofNode(s, "AXIOM")  # noqa: E731
        root = ProofNode(P("some a a"), "CHAINS",
                         (premise(alpha),) + tuple(leaf(s) for s in c1 + c2),
                         chains=(c1, c2))
        assert check_proof(gamma, root, "L2Chains").accepted


def test_chain_system_first_chain_with_link_rejected():
    gamma, c1, c2 = gamma_chains(2)
    why = check_chains_instance(P("some a a"), gamma[0], [c2, c1])
    assert why is not None and "missing link" in why


def test_chains_needs_chain_from_b():
    why = check_chains_instance(P("some x y"), P("some a b"), [[P("all a x")]])
    assert why is not None


def test_anti_image_examples():
    psi = P("all u v")
    assert anti_image([], psi) == psi
    assert anti_image(["r"], psi) == P("all (r all v) (r all u)")
    assert anti_image(["r", "s"], psi) == P("all (r all (s all u)) (r all (s all v))")


@pytest.mark.parametrize("rvec", [[], ["r"], ["r", "s"], ["r", "r", "s"]])
def test_anti_proof_checks(rvec):
    psi = P("all u v")
    pr = anti_proof(rvec, premise(psi))
    assert pr.conclusion == anti_image(rvec, psi)
    assert check_proof([psi], pr, "L1Core").accepted


def test_clausal_rule_checks():
    res = ProofNode(P("[ p (not s) ]"), "RES", (premise(P("[ p (not q) ]")),
                                                  premise(P("[ q (not s) ]"))))
    assert check_proof([P("[ p (not q) ]"), P("[ q (not s) ]")], res, "ClausalRules").accepted
    ax = ProofNode(P("[ p (not p) ]"), "CLAXIOM")
    assert check_proof([], ax, "ClausalRules").accepted
    bad_ax = ProofNode(P("[ p (not q) ]"), "CLAXIOM")
    assert not check_proof([], bad_ax, "ClausalRules").accepted
    rel = ProofNode(P("[ (r all x) (not (r all y)) ]"), "REL", (premise(P("[ (not x) y ]")),))
    assert check_proof([P("[ (not x) y ]")], rel, "ClausalRules").accepted
    st = ProofNode(P("[ p q ]"), "STRUCTURAL", (premise(P("[ p ]")),))
    assert check_proof([P("[ p ]")], st, "ClausalRules").accepted
    efq = ProofNode(P("[ s ]"), "EFQ", (premise(P("< p >")), premise(P("[ p ]"))))
    assert check_proof([P("< p >"), P("[ p ]")], efq, "ClausalRules").accepted


def test_proof_json_round_trip():
    theory, root = cases_example()
    back = proof_from_json(proof_to_json(root))
    assert check_proof(theory, back, "L2Cases").accepted
    assert back.conclusion == root.conclusion and back.size() == root.size()


def test_proof_json_keeps_chains():
    gamma, c1, c2 = gamma_chains(2)
    root = ProofNode(P("some a a"), "CHAINS",
                     (premise(gamma[0]), premise(c1[0])) + tuple(premise(s) for s in c2),
                     chains=(c1, c2))
    back = proof_from_json(proof_to_json(root))
    assert back.chains == root.chains


def test_fuzzer_catches_an_unsound_rule():
    assert fuzz_rule(rule("CONVERSE", ["all x y"], "all y x"), 200).violations


@pytest.mark.parametrize("name", ["BARBARA", "ANTI", "DARII", "CASES", "RAA", "RES", "REL",
                                  "CHAINS", "MIX", "NEWNEWDARII"])
def test_rules_sound_on_random_models(name):
    rep = fuzz_rule(name, 100, seed=1)
    assert rep.trials == 100 and rep.ok
