"""Finite models, evaluation, and bounded countermodel search.

Two search backends are provided.  ``enumerate`` walks every model of each
domain size in a fixed order (vectorised with numpy bitmasks) and is the
reference oracle.  ``sat`` encodes "some model of size m satisfies Gamma and
refutes phi" as a propositional formula and hands it to a SAT solver; it is
exhaustive as well but scales to sizes the enumerator cannot reach.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import BudgetError, InternalError
from .syntax import (All, AllOf, AllOrSome, EmptyMeet, NonemptyMeet, Not, Noun,
                     Some, SomeOf, Theory, vocabulary)

DEFAULT_CAP = 1 << 24


@dataclass(frozen=True, eq=False)
class FiniteModel:
    """A finite domain with a subset per noun and a relation per verb."""

    domain: tuple
    nouns: Mapping
    verbs: Mapping

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        dom = set(self.domain)
        if len(dom) != len(self.domain):
            raise ValueError("repeated domain element")
        nouns = {p: frozenset(ext) for p, ext in self.nouns.items()}
        verbs = {r: frozenset(tuple(pair) for pair in rel) for r, rel in self.verbs.items()}
        for p, ext in nouns.items():
            if not ext <= dom:
                raise ValueError(f"noun {p} interpreted outside the domain")
        for r, rel in verbs.items():
            for a, b in rel:
                if a not in dom or b not in dom:
                    raise ValueError(f"verb {r} relates elements outside the domain")
        object.__setattr__(self, "nouns", nouns)
        object.__setattr__(self, "verbs", verbs)

    def __eq__(self, other):
        if not isinstance(other, FiniteModel):
            return NotImplemented
        return (self.domain == other.domain and self.nouns == other.nouns
                and self.verbs == other.verbs)

    def __hash__(self):
        return hash((self.domain, frozenset(self.nouns.items()), frozenset(self.verbs.items())))

    @functools.cached_property
    def successors(self) -> dict:
        out = {}
        for r, rel in self.verbs.items():
            succ = {a: set() for a in self.domain}
            for a, b in rel:
                succ[a].add(b)
            out[r] = {a: frozenset(bs) for a, bs in succ.items()}
        return out

    @property
    def size(self) -> int:
        return len(self.domain)


def empty_model(nouns: Iterable = (), verbs: Iterable = ()) -> FiniteModel:
    return FiniteModel((), {p: () for p in nouns}, {r: () for r in verbs})


def restrict_model(m: FiniteModel, nouns: Iterable, verbs: Iterable) -> FiniteModel:
    """The reduct of m to the given vocabulary."""
    return FiniteModel(m.domain, {p: m.nouns[p] for p in nouns},
                       {r: m.verbs[r] for r in verbs})


def eval_term(m: FiniteModel, t, _memo: Optional[dict] = None) -> frozenset:
    """The denotation of a term in a model."""
    memo = {} if _memo is None else _memo
    hit = memo.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Noun):
        try:
            out = m.nouns[t.name]
        except KeyError:
            raise KeyError(f"unknown noun {t.name!r}") from None
    elif isinstance(t, Not):
        out = frozenset(m.domain) - eval_term(m, t.body, memo)
    elif isinstance(t, (AllOf, SomeOf)):
        try:
            succ = m.successors[t.verb]
        except KeyError:
            raise KeyError(f"unknown verb {t.verb!r}") from None
        body = eval_term(m, t.body, memo)
        if isinstance(t, AllOf):
            out = frozenset(a for a in m.domain if body <= succ[a])
        else:
            out = frozenset(a for a in m.domain if not body.isdisjoint(succ[a]))
    else:
        raise TypeError(f"not a term: {t!r}")
    memo[t] = out
    return out


def satisfies(m: FiniteModel, s, _memo: Optional[dict] = None) -> bool:
    memo = {} if _memo is None else _memo
    ev = lambda t: eval_term(m, t, memo)  # noqa: E731
    if isinstance(s, All):
        return ev(s.lhs) <= ev(s.rhs)
    if isinstance(s, Some):
        return not ev(s.lhs).isdisjoint(ev(s.rhs))
    if isinstance(s, AllOrSome):
        return ev(s.a) <= ev(s.b) or not ev(s.x).isdisjoint(ev(s.y))
    if isinstance(s, (EmptyMeet, NonemptyMeet)):
        meet = frozenset(m.domain)
        for t in s.terms:
            meet = meet & ev(t)
        return (not meet) if isinstance(s, EmptyMeet) else bool(meet)
    raise TypeError(f"not a sentence: {s!r}")


def satisfies_all(m: FiniteModel, sentences: Iterable) -> bool:
    memo = {}
    return all(satisfies(m, s, memo) for s in sentences)


def is_countermodel(m: FiniteModel, gamma: Iterable, phi) -> bool:
    memo = {}
    return all(satisfies(m, s, memo) for s in gamma) and not satisfies(m, phi, memo)


# ---------------------------------------------------------------------------
# JSON


def model_to_json(m: FiniteModel) -> dict:
    order = {a: i for i, a in enumerate(m.domain)}
    return {
        "domain": list(m.domain),
        "nouns": {p: sorted(ext, key=order.__getitem__) for p, ext in sorted(m.nouns.items())},
        "verbs": {r: [list(pair) for pair in sorted(rel, key=lambda ab: (order[ab[0]], order[ab[1]]))]
                  for r, rel in sorted(m.verbs.items())},
    }


def model_from_json(data: dict) -> FiniteModel:
    return FiniteModel(tuple(data["domain"]),
                       {p: list(ext) for p, ext in data.get("nouns", {}).items()},
                       {r: [tuple(pair) for pair in rel] for r, rel in data.get("verbs", {}).items()})


# ---------------------------------------------------------------------------
# random models


def random_model(nouns: Iterable, verbs: Iterable, max_domain: int, seed,
                 min_domain: int = 0) -> FiniteModel:
    """A pseudo-random model, reproducible from the seed."""
    rng = random.Random(seed)
    size = rng.randint(min_domain, max_domain)
    domain = tuple(range(size))
    n_ext = {}
    for p in sorted(nouns):
        dens = rng.choice((0.3, 0.5, 0.7))
        n_ext[p] = [a for a in domain if rng.random() < dens]
    v_ext = {}
    for r in sorted(verbs):
        dens = rng.choice((0.2, 0.5, 0.8))
        v_ext[r] = [(a, b) for a in domain for b in domain if rng.random() < dens]
    return FiniteModel(domain, n_ext, v_ext)


# ---------------------------------------------------------------------------
# consequence oracle


@dataclass(frozen=True)
class Countermodel:
    model: FiniteModel


@dataclass(frozen=True)
class NoCounterexampleUpTo:
    max_size: int


def _sentences_of(gamma) -> list:
    return list(gamma.sentences) if isinstance(gamma, Theory) else list(gamma)


def oracle_consequence(gamma, phi, max_size: int, cap: int = DEFAULT_CAP,
                       min_size: int = 0, backend: str = "enumerate"):
    """Search for a model of gamma refuting phi with domain size min_size..max_size.

    Returns ``Countermodel(m)`` or ``NoCounterexampleUpTo(max_size)``.  The
    ``enumerate`` backend reports the first countermodel in a fixed order:
    sizes ascending, then the interpretation index with noun fields (sorted
    by name) most significant, followed by verb fields.  ``auto`` uses the
    enumerator when the candidate count fits the cap and SAT otherwise.
    """
    sentences = _sentences_of(gamma)
    nouns, verbs = vocabulary(sentences + [phi])
    nouns, verbs = sorted(nouns), sorted(verbs)
    total = sum(1 << (m * len(nouns) + m * m * len(verbs)) for m in range(min_size, max_size + 1))
    if backend == "auto":
        backend = "enumerate" if total <= cap else "sat"
    if backend == "enumerate":
        if total > cap:
            raise BudgetError(f"{total} candidate models exceed the cap {cap}")
        for m in range(min_size, max_size + 1):
            found = _enumerate_size(sentences, phi, nouns, verbs, m)
            if found is not None:
                return Countermodel(_verified(found, sentences, phi))
        return NoCounterexampleUpTo(max_size)
    if backend == "sat":
        for m in range(min_size, max_size + 1):
            found = sat_model(sentences, [phi], m, nouns, verbs)
            if found is not None:
                return Countermodel(_verified(found, sentences, phi))
        return NoCounterexampleUpTo(max_size)
    raise ValueError(f"unknown backend {backend!r}")


def _verified(m: FiniteModel, sentences, phi) -> FiniteModel:
    if not is_countermodel(m, sentences, phi):
        raise InternalError("oracle countermodel failed its second check")
    return m


def _enumerate_size(sentences, phi, nouns, verbs, m: int, chunk: int = 1 << 16):
    widths = [m] * len(nouns) + [m * m] * len(verbs)
    shifts = []
    acc = 0
    for w in reversed(widths):
        shifts.append(acc)
        acc += w
    shifts.reverse()
    total = 1 << acc
    full = (1 << m) - 1
    dtype = np.uint64
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=dtype)
        fields = [(idx >> dtype(s)) & dtype((1 << w) - 1) for s, w in zip(shifts, widths)]
        env_n = dict(zip(nouns, fields[:len(nouns)]))
        env_v = dict(zip(verbs, fields[len(nouns):]))
        memo = {}

        def ev(t):
            hit = memo.get(t)
            if hit is not None:
                return hit
            if isinstance(t, Noun):
                out = env_n[t.name]
            elif isinstance(t, Not):
                out = ~ev(t.body) & dtype(full)
            else:
                body = ev(t.body)
                rel = env_v[t.verb]
                out = np.zeros_like(idx)
                for a in range(m):
                    succ = (rel >> dtype(a * m)) & dtype(full)
                    if isinstance(t, AllOf):
                        bit = (body & ~succ & dtype(full)) == 0
                    else:
                        bit = (body & succ) != 0
                    out |= bit.astype(dtype) << dtype(a)
            memo[t] = out
            return out

        def holds(s):
            if isinstance(s, All):
                return (ev(s.lhs) & ~ev(s.rhs) & dtype(full)) == 0
            if isinstance(s, Some):
                return (ev(s.lhs) & ev(s.rhs)) != 0
            if isinstance(s, AllOrSome):
                return ((ev(s.a) & ~ev(s.b) & dtype(full)) == 0) | ((ev(s.x) & ev(s.y)) != 0)
            meet = np.full_like(idx, full)
            for t in s.terms:
                meet &= ev(t)
            return meet == 0 if isinstance(s, EmptyMeet) else meet != 0

        ok = ~holds(phi)
        for s in sentences:
            if not ok.any():
                break
            ok &= holds(s)
        hits = np.flatnonzero(ok)
        if hits.size:
            i = int(idx[hits[0]])
            return _decode(i, nouns, verbs, m, shifts, widths)
    return None


def _decode(i: int, nouns, verbs, m: int, shifts, widths) -> FiniteModel:
    vals = [(i >> s) & ((1 << w) - 1) for s, w in zip(shifts, widths)]
    domain = tuple(range(m))
    n_ext = {p: [a for a in domain if v >> a & 1] for p, v in zip(nouns, vals)}
    v_ext = {r: [(a, b) for a in domain for b in domain if v >> (a * m + b) & 1]
             for r, v in zip(verbs, vals[len(nouns):])}
    return FiniteModel(domain, n_ext, v_ext)


# ---------------------------------------------------------------------------
# SAT-based bounded model finding


class _Encoder:
    """Tseitin encoding of term membership over a fixed domain size."""

    def __init__(self, m: int):
        from pysat.formula import IDPool
        self.m = m
        self.pool = IDPool()
        self.clauses = []
        self.cache = {}
        true = self.pool.id(("const", True))
        self.clauses.append([true])
        self.true = true

    def noun(self, p, a):
        return self.pool.id(("noun", p, a))

    def rel(self, r, a, b):
        return self.pool.id(("verb", r, a, b))

    def _and(self, lits):
        lits = list(lits)
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        v = self.pool.id(("and", tuple(lits)))
        for x in lits:
            self.clauses.append([-v, x])
        self.clauses.append([v] + [-x for x in lits])
        return v

    def _or(self, lits):
        return -self._and([-x for x in lits])

    def mem(self, t, a):
        key = (t, a)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if isinstance(t, Noun):
            out = self.noun(t.name, a)
        elif isinstance(t, Not):
            out = -self.mem(t.body, a)
        elif isinstance(t, AllOf):
            out = self._and(self._or([-self.mem(t.body, b), self.rel(t.verb, a, b)])
                            for b in range(self.m))
        else:
            out = self._or(self._and([self.mem(t.body, b), self.rel(t.verb, a, b)])
                           for b in range(self.m))
        self.cache[key] = out
        return out

    def holds(self, s):
        dom = range(self.m)
        if isinstance(s, All):
            return self._and(self._or([-self.mem(s.lhs, a), self.mem(s.rhs, a)]) for a in dom)
        if isinstance(s, Some):
            return self._or(self._and([self.mem(s.lhs, a), self.mem(s.rhs, a)]) for a in dom)
        if isinstance(s, AllOrSome):
            return self._or([self.holds(All(s.a, s.b)), self.holds(Some(s.x, s.y))])
        meet = self._or(self._and([self.mem(t, a) for t in s.terms]) for a in dom)
        return -meet if isinstance(s, EmptyMeet) else meet


def sat_model(true_sentences, false_sentences, m: int, nouns=None, verbs=None):
    """A model of size m making the first list true and the second false, or None."""
    from pysat.solvers import Solver
    true_sentences = list(true_sentences)
    false_sentences = list(false_sentences)
    if nouns is None or verbs is None:
        nouns, verbs = vocabulary(true_sentences + false_sentences)
    if m == 0:
        cand = empty_model(nouns, verbs)
        ok = satisfies_all(cand, true_sentences) and not any(
            satisfies(cand, s) for s in false_sentences)
        return cand if ok else None
    enc = _Encoder(m)
    for s in true_sentences:
        enc.clauses.append([enc.holds(s)])
    for s in false_sentences:
        enc.clauses.append([-enc.holds(s)])
    with Solver(name="minisat22", bootstrap_with=enc.clauses) as solver:
        if not solver.solve():
            return None
        pos = {v for v in solver.get_model() if v > 0}
    domain = tuple(range(m))
    n_ext = {p: [a for a in domain if enc.noun(p, a) in pos] for p in sorted(nouns)}
    v_ext = {r: [(a, b) for a in domain for b in domain if enc.rel(r, a, b) in pos]
             for r in sorted(verbs)}
    return FiniteModel(domain, n_ext, v_ext)
