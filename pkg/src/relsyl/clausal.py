"""The clausal system for bracket sentences: embedding, bounded proof search
with RES/REL/STRUCTURAL, and bounded countermodel search.

Clauses are ``EmptyMeet``/``NonemptyMeet`` sentences whose terms are kept
sorted and duplicate-free.  The search works on literal frozensets; the
complement of a literal is purely syntactic (``x`` against ``(not x)``).
"""

from __future__ import annotations

import heapq
import itertools
import time
from typing import Iterable, Optional

from .deciders import NO, UNKNOWN, YES, Verdict, _sentences
from .errors import FragmentError
from .proofs import ProofNode, hyp, premise, rel_results
from .semantics import is_countermodel, sat_model
from .syntax import (All, AllOf, EmptyMeet, Fragment, NonemptyMeet, Not, Some, SomeOf,
                     fragment_of, sentence_depth, sorted_terms, term_closure, term_depth,
                     vocabulary)

DEFAULT_MODEL_BOUND = 3
DEFAULT_CLAUSE_CAP = 5000


# ---------------------------------------------------------------------------
# clauses


def empty_meet(terms: Iterable) -> EmptyMeet:
    return EmptyMeet(tuple(sorted_terms(set(terms))))


def nonempty_meet(terms: Iterable) -> NonemptyMeet:
    return NonemptyMeet(tuple(sorted_terms(set(terms))))


def canonical(s):
    """Sorted, duplicate-free form of a bracket sentence."""
    if isinstance(s, EmptyMeet):
        return empty_meet(s.terms)
    if isinstance(s, NonemptyMeet):
        return nonempty_meet(s.terms)
    raise TypeError(f"not a clause: {s!r}")


def embed_l45(s):
    """all x y becomes [x, (not y)]; some x y becomes <x, y>."""
    if isinstance(s, All):
        return empty_meet((s.lhs, Not(s.rhs)))
    if isinstance(s, Some):
        return nonempty_meet((s.lhs, s.rhs))
    raise FragmentError(f"only all/some sentences embed as clauses, not {s}")


def _embed(s):
    if isinstance(s, (EmptyMeet, NonemptyMeet)):
        return canonical(s)
    return embed_l45(s)


def embed_problem(sentences, phi) -> tuple:
    """(premises, goal) of the clausal translation, premises deduplicated in order."""
    out = []
    for s in _sentences(sentences):
        c = _embed(s)
        if c not in out:
            out.append(c)
    return tuple(out), _embed(phi)


def resolve(c1: EmptyMeet, c2: EmptyMeet, pivot) -> EmptyMeet:
    """RES on ``pivot`` against ``(not pivot)``, whichever clause holds which."""
    a, b = frozenset(c1.terms), frozenset(c2.terms)
    if pivot in b and Not(pivot) in a:
        a, b = b, a
    if pivot not in a or Not(pivot) not in b:
        raise ValueError("one clause must hold the pivot and the other its negation")
    rest = (a - {pivot}) | (b - {Not(pivot)})
    if not rest:
        raise ValueError("resolving two unit clauses leaves no literal")
    return empty_meet(rest)


def rel_expand(c: EmptyMeet, r: str) -> list:
    """REL images of c, one per choice of the single positive literal."""
    out = [empty_meet(lits) for lits in rel_results(frozenset(c.terms), r)]
    if not out:
        raise ValueError("REL needs all literals but one to be negations")
    return sorted(out, key=str)


# ---------------------------------------------------------------------------
# bounded search over bracket clauses


def _lit_depth(lits) -> int:
    return max(term_depth(t) for t in lits)


class _Search:
    """Given-clause saturation with forward subsumption.

    ``origin`` maps each kept literal set to how it was obtained, which is
    enough to rebuild a proof DAG.  A pair of complementary unit clauses
    (``conflict``) makes every bracket sentence derivable.
    """

    def __init__(self, depth: int, verbs, extra_terms, clause_cap: int, rel_some: bool):
        self.D = depth
        self.verbs = sorted(verbs)
        self.extra = sorted_terms(extra_terms)
        self.cap = clause_cap
        self.rel_some = rel_some
        self.origin = {}
        self.worked = []
        self.by_lit = {}
        self.queue = []
        self.counter = itertools.count()
        self.conflict = None
        self.capped = False
        self.given = 0

    def _subsumed(self, lits) -> bool:
        if len(lits) <= 10:
            items = list(lits)
            for k in range(1, len(items) + 1):
                for sub in itertools.combinations(items, k):
                    if frozenset(sub) in self.origin:
                        return True
            return False
        return any(c <= lits for c in self.origin)

    def add(self, lits: frozenset, how) -> None:
        if self.conflict is not None or self.capped:
            return
        if _lit_depth(lits) > self.D or self._subsumed(lits):
            return
        if len(self.origin) >= self.cap:
            self.capped = True
            return
        self.origin[lits] = how
        key = (len(lits), _lit_depth(lits), next(self.counter))
        heapq.heappush(self.queue, (key, lits))

    def _resolve_with(self, g: frozenset) -> None:
        for x in sorted_terms(g):
            for w in list(self.by_lit.get(Not(x), ())):
                self._res(g, w, x)
            if isinstance(x, Not):
                for w in list(self.by_lit.get(x.body, ())):
                    self._res(w, g, x.body)

    def _res(self, a: frozenset, b: frozenset, pivot) -> None:
        rest = (a - {pivot}) | (b - {Not(pivot)})
        if not rest:
            if len(a) == 1 and len(b) == 1 and self.conflict is None:
                self.conflict = (a, b)
            return
        self.add(frozenset(rest), ("RES", a, b))

    def _rel(self, g: frozenset) -> None:
        if not self.rel_some and any(isinstance(t, SomeOf) for t in g):
            return
        all_negative = all(isinstance(t, Not) for t in g)
        for r in self.verbs:
            for lits in rel_results(g, r):
                self.add(lits, ("REL", g, r))
            if all_negative:
                for y in self.extra:
                    if y in g:
                        continue
                    w = g | {y}
                    for lits in rel_results(w, r):
                        if Not(AllOf(r, y)) in lits:
                            self.add(lits, ("RELW", g, y, r))

    def run(self, targets, deadline: Optional[float] = None) -> Optional[frozenset]:
        """Saturate until some target is subsumed; returns that target or None."""
        while True:
            hit = self.reached(targets)
            if hit is not None:
                return hit
            if not self.queue or self.capped:
                return None
            if deadline is not None and time.perf_counter() > deadline:
                self.capped = True
                return None
            _, g = heapq.heappop(self.queue)
            self.given += 1
            self.worked.append(g)
            for x in g:
                self.by_lit.setdefault(x, []).append(g)
            self._resolve_with(g)
            self._rel(g)

    def reached(self, targets) -> Optional[frozenset]:
        for t in targets:
            if self.conflict is not None or self.subsumer(t) is not None:
                return t
        return None

    def subsumer(self, target: frozenset) -> Optional[frozenset]:
        if target in self.origin:
            return target
        items = sorted_terms(target)
        if len(items) <= 10:
            for k in range(1, len(items) + 1):
                for sub in itertools.combinations(items, k):
                    fs = frozenset(sub)
                    if fs in self.origin:
                        return fs
            return None
        return next((c for c in self.origin if c <= target), None)


class _Builder:
    """Rebuilds proof DAGs from the search log."""

    def __init__(self, search: _Search):
        self.s = search
        self.memo = {}

    def clause(self, lits: frozenset) -> ProofNode:
        hit = self.memo.get(lits)
        if hit is not None:
            return hit
        how = self.s.origin[lits]
        c = empty_meet(lits)
        kind = how[0]
        if kind == "PREMISE":
            node = premise(how[1])
        elif kind == "HYP":
            node = hyp(how[1])
        elif kind == "CLAXIOM":
            node = ProofNode(c, "CLAXIOM")
        elif kind == "RES":
            node = ProofNode(c, "RES", (self.clause(how[1]), self.clause(how[2])))
        elif kind == "REL":
            node = ProofNode(c, "REL", (self.clause(how[1]),))
        else:
            _, g, y, _r = how
            weak = ProofNode(empty_meet(g | {y}), "STRUCTURAL", (self.clause(g),))
            node = ProofNode(c, "REL", (weak,))
        self.memo[lits] = node
        return node

    def weaken(self, node: ProofNode, lits: frozenset, target: frozenset) -> ProofNode:
        if lits == target:
            return node
        return ProofNode(empty_meet(target), "STRUCTURAL", (node,))

    def target(self, target: frozenset) -> ProofNode:
        """A proof of [target] from a subsuming clause or the unit conflict."""
        sub = self.s.subsumer(target)
        if sub is not None:
            return self.weaken(self.clause(sub), sub, target)
        a, b = self.s.conflict
        (x,) = a
        left = self.weaken(self.clause(a), a, a | target)
        right = self.weaken(self.clause(b), b, b | target)
        return ProofNode(empty_meet(target), "RES", (left, right))


# ---------------------------------------------------------------------------
# deciders


def default_depth(premises, goal) -> int:
    return max(sentence_depth(s) for s in list(premises) + [goal]) + 2


def _countermodel(sentences, phi, m: int):
    nouns, verbs = vocabulary(sentences + [phi])
    for size in range(m + 1):
        found = sat_model(sentences, [phi], size, nouns, verbs)
        if found is not None and is_countermodel(found, sentences, phi):
            return found, size
    return None, None


def _search_proof(premises, goal, D: int, clause_cap: int, rel_some: bool,
                  deadline: Optional[float]):
    """A ClausalRules proof of goal from premises, or (None, stats)."""
    brackets = [c for c in premises if isinstance(c, EmptyMeet)]
    angles = [c for c in premises if isinstance(c, NonemptyMeet)]
    _, verbs = vocabulary(list(premises) + [goal])
    T = term_closure(list(premises) + [goal])
    search = _Search(D, verbs, T, clause_cap, rel_some)
    for c in brackets:
        search.add(frozenset(c.terms), ("PREMISE", c))
    withdrawn = None
    if isinstance(goal, NonemptyMeet):
        withdrawn = empty_meet(goal.terms)
        search.add(frozenset(withdrawn.terms), ("HYP", withdrawn))
    for t in sorted_terms(T):
        search.add(frozenset({t, Not(t)}), ("CLAXIOM",))
    targets = [frozenset(c.terms) for c in angles]
    if isinstance(goal, EmptyMeet):
        targets = [frozenset(goal.terms)] + targets
    hit = search.run(targets, deadline)
    stats = {"depth_bound": D, "clauses": len(search.origin), "given": search.given,
             "saturated": not search.queue and not search.capped,
             "unit_conflict": search.conflict is not None}
    if hit is None:
        return None, stats
    build = _Builder(search)
    body = build.target(hit)
    if isinstance(goal, EmptyMeet):
        if hit == frozenset(goal.terms):
            return body, stats
        y = nonempty_meet(hit)
        return ProofNode(goal, "EFQ", (premise(y), body)), stats
    y = nonempty_meet(hit)
    return ProofNode(goal, "RAA", (premise(y), body), (withdrawn, withdrawn)), stats


def _decide(gamma, phi, D, m, clause_cap, time_limit, rel_some) -> Verdict:
    start = time.perf_counter()
    sentences = _sentences(gamma)
    premises, goal = embed_problem(sentences, phi)
    if D is None:
        D = default_depth(premises, goal)
    if D < 1 or m < 0:
        raise ValueError("depth bound must be positive and model bound non-negative")
    deadline = None if time_limit is None else start + time_limit
    # small SAT calls are far cheaper than a saturation that cannot succeed
    model, size = _countermodel(sentences, phi, m)
    if model is not None:
        stats = {"model_bound": m, "model_size": size, "elapsed": time.perf_counter() - start}
        return Verdict(NO, model, stats)
    proof, stats = _search_proof(premises, goal, D, clause_cap, rel_some, deadline)
    stats["model_bound"] = m
    stats["elapsed"] = time.perf_counter() - start
    if proof is not None:
        return Verdict(YES, proof, stats, "ClausalRules", premises, goal)
    return Verdict(UNKNOWN, None, stats)


def _check_shapes(sentences, phi, who: str) -> None:
    for s in sentences + [phi]:
        if not isinstance(s, (All, Some, EmptyMeet, NonemptyMeet)):
            raise FragmentError(f"{who} handles all/some and bracket sentences, not {s}")


def decide_clausal(gamma, phi, D: Optional[int] = None, m: int = DEFAULT_MODEL_BOUND,
                   clause_cap: int = DEFAULT_CLAUSE_CAP,
                   time_limit: Optional[float] = None) -> Verdict:
    """Bounded countermodel search and bounded proof search; UNKNOWN if both fail.

    Proofs are over the clausal translation (``Verdict.premises``/``goal``);
    countermodels refute the input problem directly.
    """
    sentences = _sentences(gamma)
    _check_shapes(sentences, phi, "decide_clausal")
    found = fragment_of(sentences + [phi])
    if not found <= Fragment.L4HalfPlus:
        raise FragmentError(f"decide_clausal handles L4.5+ and its subfragments, not {found.value}")
    return _decide(sentences, phi, D, m, clause_cap, time_limit, rel_some=True)


def decide_l5(gamma, phi, D: Optional[int] = None, m: int = DEFAULT_MODEL_BOUND,
              clause_cap: int = DEFAULT_CLAUSE_CAP,
              time_limit: Optional[float] = None) -> Verdict:
    """Incomplete: (r some x) literals are opaque to REL; YES and NO stay certified."""
    sentences = _sentences(gamma)
    _check_shapes(sentences, phi, "decide_l5")
    return _decide(sentences, phi, D, m, clause_cap, time_limit, rel_some=False)
