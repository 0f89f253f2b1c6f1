"""Instance families, fixture models, SAT reductions and random generators."""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BudgetError, ParseError
from .proofs import all_prefix
from .semantics import FiniteModel
from .syntax import (KEYWORDS, All, AllOf, AllOrSome, EmptyMeet, NonemptyMeet, Not, Noun, Some,
                     SomeOf, Theory)

BRUTE_FORCE_LIMIT = 20


# ---------------------------------------------------------------------------
# the Gamma_n / Delta_n,i family


def _verbs(n: int) -> list:
    return [f"r{i}" for i in range(1, n + 1)]


def _gamma_sentences(n: int) -> list:
    if n < 1:
        raise ValueError("n must be a positive integer")
    a, b = Noun("a"), Noun("b")
    rr = lambda i, t: AllOf(f"r{i}", t)  # noqa: E731
    out = [Some(rr(1, rr(1, a)), rr(1, rr(1, a)))]
    for i in range(1, n):
        out.append(All(rr(i, b), rr(i + 1, rr(i + 1, a))))
    out.append(All(rr(n, b), a))
    return out


def gen_gamma_n(n: int) -> Theory:
    """alpha, phi_1 .. phi_{n-1}, omega over nouns a, b and verbs r1 .. rn."""
    return Theory(frozenset({"a", "b"}), frozenset(_verbs(n)), tuple(_gamma_sentences(n)))


def gen_delta_ni(n: int, i: int) -> Theory:
    """Gamma_n without phi_i (i < n) or without omega (i = n)."""
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    s = _gamma_sentences(n)
    del s[i]
    return Theory(frozenset({"a", "b"}), frozenset(_verbs(n)), tuple(s))


# ---------------------------------------------------------------------------
# fixture models


def m4_subcase(svec: Sequence[str]) -> str:
    """Which of 4a/4b/4c covers (svec all a); svec has even nonzero length, not (r1, r1)."""
    k = len(svec)
    if k == 0 or k % 2 or tuple(svec) == ("r1", "r1"):
        raise ValueError("svec must have even nonzero length and differ from (r1, r1)")
    if svec[-1] != "r1":
        return "4a"
    if svec[-2] != "r1":
        return "4b"
    return "4c"


def fixture_models(n: int, which: str, i: Optional[int] = None,
                   svec: Optional[Sequence[str]] = None,
                   subcase: Optional[str] = None) -> FiniteModel:
    """The explicit models M1, M2, M3(i) and M4(svec) over a, b, r1 .. rn."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    verbs = _verbs(n)
    none = {r: () for r in verbs}
    if which == "M1":
        return FiniteModel(("*",), {"a": ["*"], "b": ["*"]}, none)
    if which == "M2":
        return FiniteModel(("*",), {"a": ["*"], "b": []}, none)
    if which == "M3":
        if i is None or not 1 <= i <= n:
            raise ValueError("M3 needs 1 <= i <= n")
        rel = {f"r{j}": ([("*", "*")] if j <= i else []) for j in range(1, n + 1)}
        return FiniteModel(("*",), {"a": [], "b": ["*"]}, rel)
    if which == "M4":
        if svec is None:
            raise ValueError("M4 needs svec")
        svec = tuple(svec)
        if any(s not in verbs for s in svec):
            raise ValueError(f"svec uses verbs outside r1 .. r{n}")
        found = m4_subcase(svec)
        if subcase is not None and subcase != found:
            raise ValueError(f"svec {svec} falls under subcase {found}, not {subcase}")
        rel = {r: set() for r in verbs}
        rel["r1"] |= {("x", "w"), ("y", "x")}
        if found == "4a":
            rel[svec[-1]].add(("z", "w"))
        elif found == "4c":
            rel[svec[-3]].add(("z", "y"))
        return FiniteModel(("w", "x", "y", "z"), {"a": ["w"], "b": ["w", "x", "y", "z"]},
                           {r: sorted(v) for r, v in rel.items()})
    raise ValueError(f"unknown fixture {which!r}")


def svec_term(svec: Sequence[str], noun: str = "a"):
    """(s1 all (s2 all ... (sk all noun)))."""
    return all_prefix(tuple(svec), Noun(noun))


# ---------------------------------------------------------------------------
# one-in-three positive 3-SAT


def _noun_name(var: str) -> str:
    name = str(var).lower()
    if not re.fullmatch(r"[a-z][a-z0-9_]*", name) or name in KEYWORDS:
        raise ValueError(f"variable {var!r} does not give a usable noun name")
    return name


@dataclass(frozen=True)
class OneInThreeInstance:
    variables: tuple
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        names = [_noun_name(v) for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variables must have distinct lowercase names")
        for c in self.clauses:
            if len(c) != 3 or len(set(c)) != 3:
                raise ValueError(f"clause {c} needs three distinct variables")
            if not set(c) <= set(self.variables):
                raise ValueError(f"clause {c} uses undeclared variables")


def _reserved_o3(name: str) -> bool:
    return (name in ("start", "finish") or re.fullmatch(r"[yz]_c\d+", name) is not None
            or re.fullmatch(r"(r[123]_c\d+|r_.*|rp_.*)", name) is not None)


def encode_one_in_three(S: OneInThreeInstance) -> tuple:
    """(theory, goal) with goal ``all start finish``; the theory entails the goal
    iff S has no 1-valued assignment.

    Clause k (1-based) uses nouns y_ck, z_ck and verbs r1_ck, r2_ck, r3_ck.  The
    two sentences for a co-occurring pair share the verbs r_p_q and rp_p_q
    (p, q in sorted order).
    """
    noun = {v: _noun_name(v) for v in S.variables}
    for v, name in noun.items():
        if _reserved_o3(name):
            raise ValueError(f"variable {v!r} clashes with a generated name")
    start, finish = Noun("start"), Noun("finish")
    out = []
    pairs = set()
    for k, (u, v, w) in enumerate(S.clauses, start=1):
        y, z = Noun(f"y_c{k}"), Noun(f"z_c{k}")
        r1, r2, r3 = f"r1_c{k}", f"r2_c{k}", f"r3_c{k}"
        U, V, W = (Noun(noun[x]) for x in (u, v, w))
        out += [All(start, AllOf(r1, U)), All(SomeOf(r1, U), y),
                All(y, AllOf(r2, V)), All(SomeOf(r2, V), z),
                All(z, AllOf(r3, W)), All(SomeOf(r3, W), finish)]
        for p, q in itertools.permutations((u, v, w), 2):
            pairs.add((noun[p], noun[q]))
    for p, q in sorted(pairs):
        a, b = sorted((p, q))
        out.append(All(AllOf(f"r_{a}_{b}", Noun(p)), SomeOf(f"rp_{a}_{b}", Noun(q))))
    theory = Theory.of(out, nouns={"start", "finish"} | set(noun.values()))
    return theory, All(start, finish)


def one_in_three_check(S: OneInThreeInstance) -> Optional[dict]:
    """A 1-valued assignment (exactly one true variable per clause), or None."""
    if len(S.variables) > BRUTE_FORCE_LIMIT:
        raise BudgetError(f"more than {BRUTE_FORCE_LIMIT} variables")
    for bits in itertools.product((True, False), repeat=len(S.variables)):
        f = dict(zip(S.variables, bits))
        if all(sum(f[x] for x in c) == 1 for c in S.clauses):
            return f
    return None


def all_one_in_three(max_vars: int = 4, max_clauses: int = 2) -> list:
    """Every instance over variables U1 .. U<max_vars> with at most max_clauses
    distinct clauses (clause order and order inside clauses are immaterial)."""
    variables = tuple(f"U{j}" for j in range(1, max_vars + 1))
    triples = list(itertools.combinations(variables, 3))
    out = []
    for k in range(max_clauses + 1):
        for cs in itertools.combinations(triples, k):
            out.append(OneInThreeInstance(variables, cs))
    return out


# ---------------------------------------------------------------------------
# 3-SAT


@dataclass(frozen=True)
class CnfInstance:
    """Clauses of three literals; a literal is (variable, positive)."""

    variables: tuple
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses",
                           tuple(tuple((v, bool(s)) for v, s in c) for c in self.clauses))
        names = [_noun_name(v) for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variables must have distinct lowercase names")
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have three literals")
            if any(v not in self.variables for v, _ in c):
                raise ValueError(f"clause {c} uses undeclared variables")


def parse_dimacs(text: str) -> CnfInstance:
    """DIMACS CNF with exactly three literals per clause; variable k is named xk."""
    nums, declared = [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("header must read: p cnf <vars> <clauses>", lineno)
            declared = int(parts[2])
            continue
        try:
            nums.extend((int(tok), lineno) for tok in line.split())
        except ValueError:
            raise ParseError(f"not an integer literal in {line!r}", lineno) from None
    clauses, cur = [], []
    for k, lineno in nums:
        if k == 0:
            if len(cur) != 3:
                raise ParseError(f"clause has {len(cur)} literals, need 3", lineno)
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(k)
    if cur:
        raise ParseError("last clause is not terminated by 0", nums[-1][1])
    top = max([abs(k) for c in clauses for k in c] + [declared or 0])
    variables = tuple(f"x{j}" for j in range(1, top + 1))
    return CnfInstance(variables, tuple(tuple((f"x{abs(k)}", k > 0) for k in c)
                                        for c in clauses))


def _fresh(base: str, taken: set) -> str:
    name, j = base, 0
    while name in taken:
        name = f"{base}{j}"
        j += 1
    return name


def encode_3sat(F: CnfInstance) -> tuple:
    """(theory, goal): the goal ``all q (not q)`` follows iff F is unsatisfiable.

    Clause i uses nouns y<i>, z<i> and verb r<i>.  The goal noun is q unless a
    variable already uses that name, in which case the first free q0, q1, ...
    """
    noun = {v: _noun_name(v) for v in F.variables}
    taken = set(noun.values())
    for name in taken:
        if re.fullmatch(r"[yzr]\d+", name):
            raise ValueError(f"variable name {name!r} clashes with a generated name")

    def lit(v, positive):
        t = Noun(noun[v])
        return t if positive else Not(t)

    out = []
    for i, ((u, su), (v, sv), (w, sw)) in enumerate(F.clauses, start=1):
        r, y, z = f"r{i}", Noun(f"y{i}"), Noun(f"z{i}")
        out += [All(Not(lit(u, su)), AllOf(r, y)),
                All(Not(lit(v, sv)), AllOf(r, Not(y))),
                All(AllOf(r, z), lit(w, sw))]
    q = Noun(_fresh("q", taken))
    return Theory.of(out, nouns=taken), All(q, Not(q))


def brute_sat(F: CnfInstance) -> Optional[dict]:
    """A satisfying assignment by truth-table search, or None when unsatisfiable."""
    if len(F.variables) > BRUTE_FORCE_LIMIT:
        raise BudgetError(f"more than {BRUTE_FORCE_LIMIT} variables")
    for bits in itertools.product((False, True), repeat=len(F.variables)):
        f = dict(zip(F.variables, bits))
        if all(any(f[v] == s for v, s in c) for c in F.clauses):
            return f
    return None


def all_3sat(max_vars: int = 3, max_clauses: int = 2) -> list:
    """Every CNF over P1 .. P<max_vars> with at most max_clauses clauses, each a
    multiset of three literals (clause order immaterial, repeats allowed)."""
    variables = tuple(f"P{j}" for j in range(1, max_vars + 1))
    lits = [(v, s) for v in variables for s in (True, False)]
    clauses = list(itertools.combinations_with_replacement(lits, 3))
    out = []
    for k in range(max_clauses + 1):
        for cs in itertools.combinations_with_replacement(clauses, k):
            out.append(CnfInstance(variables, cs))
    return out


# ---------------------------------------------------------------------------
# random problems


NOUN_POOL = ("p", "q", "s")
VERB_POOL = ("r", "u")

_FRAGMENT_SHAPES = {
    # term constructors, sentence kinds
    "L1": ((AllOf,), ("all",)),
    "L2": ((AllOf,), ("all", "some")),
    "L2Plus": ((AllOf,), ("all", "some", "aos")),
    "L3": ((AllOf, SomeOf), ("all",)),
    "L3Half": ((AllOf, SomeOf), ("all", "some")),
    "L4": ((AllOf, Not), ("all",)),
    "L4Half": ((AllOf, Not), ("all", "some")),
    "L4HalfPlus": ((AllOf, Not), ("all", "some", "empty", "nonempty")),
    "L5Half": ((AllOf, SomeOf, Not), ("all", "some")),
}


def all_l1_terms(nouns=("p", "q"), verbs=("r",), depth: int = 1) -> list:
    """Every L1 term (nouns and ``(r all t)``) up to the given depth."""
    terms = [Noun(n) for n in nouns]
    layer = terms
    for _ in range(depth):
        layer = [AllOf(r, t) for r in verbs for t in layer]
        terms = terms + layer
    return terms


def all_l1(nouns=("p", "q"), verbs=("r",), depth: int = 1, max_sentences: int = 2) -> list:
    """Every (theory, goal) pair of L1 over the vocabulary, theories as sets."""
    terms = all_l1_terms(nouns, verbs, depth)
    sentences = [All(a, b) for a in terms for b in terms]
    out = []
    for k in range(max_sentences + 1):
        for gamma in itertools.combinations(sentences, k):
            out.extend((Theory.of(list(gamma)), phi) for phi in sentences)
    return out


def random_term(rng: random.Random, nouns, verbs, depth: int, ctors):
    if depth == 0 or rng.random() < 0.45:
        return Noun(rng.choice(nouns))
    c = rng.choice(ctors)
    body = random_term(rng, nouns, verbs, depth - 1, ctors)
    return Not(body) if c is Not else c(rng.choice(verbs), body)


def random_sentence(rng: random.Random, fragment: str, nouns, verbs, depth: int = 2):
    ctors, kinds = _FRAGMENT_SHAPES[fragment]
    t = lambda: random_term(rng, nouns, verbs, depth, ctors)  # noqa: E731
    k = rng.choice(kinds)
    if k == "all":
        return All(t(), t())
    if k == "some":
        return Some(t(), t())
    if k == "aos":
        return AllOrSome(t(), t(), t(), t())
    terms = [t() for _ in range(rng.randint(1, 3))]
    return EmptyMeet(terms) if k == "empty" else NonemptyMeet(terms)


def random_problem(rng: random.Random, fragment: str, max_nouns: int = 3, max_verbs: int = 2,
                   depth: int = 2, max_sentences: int = 4) -> tuple:
    """(theory, goal) within the given bounds; the goal has a fragment-appropriate shape."""
    nouns = NOUN_POOL[:rng.randint(1, max_nouns)]
    verbs = VERB_POOL[:rng.randint(1, max_verbs)]
    sentences = [random_sentence(rng, fragment, nouns, verbs, depth)
                 for _ in range(rng.randint(0, max_sentences))]
    sentences = list(dict.fromkeys(sentences))
    goal = random_sentence(rng, fragment, nouns, verbs, depth)
    return Theory.of(sentences), goal
