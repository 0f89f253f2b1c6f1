import hypothesis.strategies as st
import pytest

from relsyl.syntax import (All, AllOf, AllOrSome, EmptyMeet, NonemptyMeet, Not, Noun, Some,
                           SomeOf, parse_sentence)

NOUNS = ("p", "q", "s")
VERBS = ("r", "u")


def terms(max_depth: int = 4, nouns=NOUNS, verbs=VERBS, ctors=("all", "some", "not")):
    leaf = st.sampled_from(nouns).map(Noun)

    def extend(inner):
        opts = []
        if "all" in ctors:
            opts.append(st.builds(AllOf, st.sampled_from(verbs), inner))
        if "some" in ctors:
            opts.append(st.builds(SomeOf, st.sampled_from(verbs), inner))
        if "not" in ctors:
            opts.append(st.builds(Not, inner))
        return st.one_of(*opts)

    return st.recursive(leaf, extend, max_leaves=max_depth + 1).filter(
        lambda t: _depth(t) <= max_depth)


def _depth(t) -> int:
    d = 0
    while not isinstance(t, Noun):
        d, t = d + 1, t.body
    return d


def sentences(max_depth: int = 4, **kw):
    t = terms(max_depth, **kw)
    lits = st.lists(t, min_size=1, max_size=3)
    return st.one_of(
        st.builds(All, t, t),
        st.builds(Some, t, t),
        st.builds(AllOrSome, t, t, t, t),
        lits.map(EmptyMeet),
        lits.map(NonemptyMeet),
    )


@pytest.fixture
def P():
    return parse_sentence


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
