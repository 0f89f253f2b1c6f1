import itertools
import random

import pytest

from relsyl.corpus import (CnfInstance, OneInThreeInstance, all_3sat, all_one_in_three,
                           brute_sat, encode_3sat, encode_one_in_three, fixture_models,
                           gen_delta_ni, gen_gamma_n, m4_subcase, one_in_three_check,
                           parse_dimacs, random_problem, svec_term)
from relsyl.errors import ParseError
from relsyl.semantics import Countermodel, eval_term, oracle_consequence, satisfies_all
from relsyl.syntax import Fragment, fragment_of, parse_sentence, parse_term, print_sentence

P = parse_sentence


def test_gamma_n_shape():
    g = gen_gamma_n(2)
    assert [print_sentence(s) for s in g] == [
        "some (r1 all (r1 all a)) (r1 all (r1 all a))",
        "all (r1 all b) (r2 all (r2 all a))",
        "all (r2 all b) a"]
    assert list(gen_delta_ni(2, 2)) == list(g)[:2]
    for n in range(1, 6):
        assert len(gen_gamma_n(n)) == n + 1
    with pytest.raises(ValueError):
        gen_delta_ni(2, 3)


@pytest.mark.parametrize("n", range(1, 6))
def test_fixtures_satisfy_their_theories(n):
    g = gen_gamma_n(n)
    assert satisfies_all(fixture_models(n, "M1"), g)
    assert satisfies_all(fixture_models(n, "M2"), g)
    for i in range(1, n + 1):
        m3 = fixture_models(n, "M3", i=i)
        assert satisfies_all(m3, gen_delta_ni(n, i))
        assert not satisfies_all(m3, g)


def test_m4_subcases():
    assert m4_subcase(["r2", "r2"]) == "4a"
    assert m4_subcase(["r1", "r2", "r2", "r1"]) == "4b"
    assert m4_subcase(["r2", "r1", "r1", "r1"]) == "4c"
    with pytest.raises(ValueError):
        m4_subcase(["r1", "r1"])
    with pytest.raises(ValueError):
        fixture_models(3, "M4", svec=["r2", "r2"], subcase="4b")


@pytest.mark.parametrize("n", range(2, 5))
def test_m4_denotations(n):
    verbs = [f"r{j}" for j in range(1, n + 1)]
    for k in (2, 4):
        for sv in itertools.product(verbs, repeat=k):
            if sv == ("r1", "r1"):
                continue
            m = fixture_models(n, "M4", svec=sv)
            assert satisfies_all(m, gen_gamma_n(n))
            assert eval_term(m, svec_term(sv)) == frozenset()
            assert eval_term(m, parse_term("(r1 all a)")) == {"x"}
            assert eval_term(m, parse_term("(r1 all (r1 all a))")) == {"y"}


def test_one_in_three_single_clause_counts():
    S = OneInThreeInstance(("U", "V", "W"), (("U", "V", "W"),))
    g, phi = encode_one_in_three(S)
    assert len(g) == 12 and phi == P("all start finish")
    assert len(g.nouns - {"u", "v", "w"}) == 4
    assert len(g.verbs) == 9
    assert fragment_of(list(g) + [phi]) is Fragment.L3


def test_one_in_three_check_examples():
    S = OneInThreeInstance(("U", "V", "W"), (("U", "V", "W"),))
    f = one_in_three_check(S)
    assert sum(f.values()) == 1
    assert one_in_three_check(OneInThreeInstance((), ())) == {}
    with pytest.raises(ValueError):
        OneInThreeInstance(("U", "V"), (("U", "V", "V"),))


def test_one_in_three_enumeration_size():
    assert len(all_one_in_three()) == 1 + 4 + 6


def test_3sat_encoding_example():
    F = CnfInstance(("P", "Q", "S"), ((("P", True), ("Q", True), ("S", False)),))
    g, phi = encode_3sat(F)
    sents = list(g)
    assert sents[0] == P("all (not p) (r1 all y1)")
    assert sents[2] == P("all (r1 all z1) (not s)")
    assert phi == P("all q0 (not q0)")
    assert fragment_of(sents + [phi]) is Fragment.L4


def test_brute_sat_examples():
    F = CnfInstance(("P",), ((("P", True),) * 3, (("P", False),) * 3))
    assert brute_sat(F) is None
    assert brute_sat(CnfInstance((), ())) == {}


def test_3sat_reduction_small_sample():
    rng = random.Random(0)
    sample = rng.sample(all_3sat(), 150)
    for F in sample:
        g, phi = encode_3sat(F)
        r = oracle_consequence(g, phi, 1, min_size=1, backend="sat")
        assert isinstance(r, Countermodel) == (brute_sat(F) is not None)


def test_parse_dimacs():
    F = parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n")
    assert F.variables == ("x1", "x2", "x3")
    assert F.clauses[0] == (("x1", True), ("x2", False), ("x3", True))
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 2 1\n1 2 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("1 2 3\n")


@pytest.mark.parametrize("frag", ["L1", "L2", "L2Plus", "L3", "L3Half", "L4", "L4Half",
                                  "L4HalfPlus", "L5Half"])
def test_random_problems_stay_in_fragment(frag):
    rng = random.Random(frag)
    for _ in range(40):
        g, phi = random_problem(rng, frag)
        assert fragment_of(list(g) + [phi]) <= Fragment(frag)
        assert len(g) <= 4 and len(g.nouns) <= 3 and len(g.verbs) <= 2
