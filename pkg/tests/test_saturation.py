import random

import pytest

from relsyl.corpus import random_problem
from relsyl.errors import BudgetError
from relsyl.proofs import check_proof
from relsyl.saturation import (branch_universe, extract_proof, g1, g2plus, saturate,
                               universe_from)
from relsyl.syntax import term_closure, term_closure_plus, parse_sentence

P = parse_sentence
EX = [P("all x y"), P("all y z"), P("all (r all z) (r all x)")]


def test_g1_membership():
    U = g1(EX)
    assert P("all (r all z) (r all y)") in U
    assert P("all (r all y) (r all x)") not in U
    assert len(g1([])) == 0


def test_g1_size_is_product():
    T, Tp = term_closure(EX), term_closure_plus(EX)
    assert len(g1(EX)) == len(T) * len(Tp)


def test_g2plus_membership_and_size():
    U = g2plus([P("all p q")])
    assert P("some p q") in U and P("all p q or some p p") in U
    assert len(g2plus([])) == 0
    T, Tp = term_closure(EX), term_closure_plus(EX)
    assert len(g2plus(EX)) == len(T) * len(Tp) + len(T) ** 2 + len(T) ** 3 * len(Tp)


def test_anti_after_barbara():
    gamma = [P("all x y"), P("all y z")]
    phi = P("all (r all z) (r all x)")
    res = saturate(gamma, "L1Core", g1(gamma + [phi]))
    assert phi in res
    pr = extract_proof(res.derivation_of, phi)
    assert check_proof(gamma, pr, "L1Core").accepted
    assert pr.rule == "ANTI" and pr.children[0].rule == "BARBARA"


def test_axiom_instances_for_every_term():
    U = g1([P("all p (r all q)")])
    res = saturate([], "L1Core", U)
    for t in U.domains[(type(P("all p p")), 0)]:
        assert P(f"all {t} {t}") in res


def test_some_via_some2_some1():
    gamma = [P("some p q")]
    phi = P("some q q")
    res = saturate(gamma, "Base0", g2plus(gamma + [phi]))
    assert phi in res
    assert check_proof(gamma, extract_proof(res.derivation_of, phi), "Base0").accepted


def test_budget_error_on_oversized_universe():
    with pytest.raises(BudgetError):
        saturate([P("all p q")], "L1Core", g1([P("all p q")]), cap=1)


@pytest.mark.parametrize("frag,rules,make", [
    ("L1", "L1Core", g1), ("L2", "Base0", g1), ("L2Plus", "L2PlusRules", g2plus),
    ("L3", "L3Rules", branch_universe)])
def test_saturation_contracts(frag, rules, make):
    rng = random.Random(frag)
    for _ in range(25):
        gamma, phi = random_problem(rng, frag, depth=1, max_sentences=3)
        delta = list(gamma) + [phi]
        U = make(delta)
        res = saturate(gamma, rules, U)
        assert res.rounds <= U.bound() + 1
        assert all(s in U for s in res.derived)
        assert {s for s in gamma if s in U} <= res.derived
        again = saturate(res.derived, rules, U)
        assert again.derived == res.derived
        bigger = saturate(list(gamma) + [phi], rules, U)
        assert res.derived <= bigger.derived
        for s in list(res.derived)[:10]:
            assert check_proof(gamma, extract_proof(res.derivation_of, s), rules).accepted


def test_explicit_universe():
    U = universe_from([P("all p q"), P("all q s"), P("all p s")])
    res = saturate([P("all p q"), P("all q s")], "L1Core", U)
    assert P("all p s") in res and len(res.derived) == 3
