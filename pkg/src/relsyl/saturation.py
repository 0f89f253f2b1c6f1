"""Bounded forward chaining over a finite sentence universe.

``saturate`` computes the least set X* with X0 = Gamma ∩ A and
X(n+1) = X(n) ∪ {conclusions in A of rule instances with premises in X(n)},
recording for every sentence the first derivation found.  Derivations are
ordered by round, then rule name, then the printed premises.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import BudgetError
from .proofs import (ProofNode, RuleTemplate, Var, _args, _pattern_vars,
                     _vkey, instantiate, instantiate_term, match_term, ruleset)
from .syntax import (All, AllOf, AllOrSome, Some, SomeOf, print_sentence,
                     term_closure, term_closure_plus, vocabulary)

DEFAULT_UNIVERSE_CAP = 50_000_000


# ---------------------------------------------------------------------------
# universes


@dataclass
class SentenceUniverse:
    """A finite set of sentences, described by membership rather than listed.

    ``domains`` maps (sentence kind, argument position) to the terms allowed
    there; ``contains`` may impose further conditions.
    """

    origin: str
    terms: frozenset
    verbs: frozenset
    domains: dict
    extra: Optional[Callable] = None
    aos_pairs: Optional[frozenset] = None
    # Facts for which ``inert(s)`` holds only ever matter as the premise
    # listed in ``inert_roles``; the engine skips them elsewhere.
    inert: Optional[Callable] = None
    inert_roles: frozenset = frozenset()

    def __contains__(self, s) -> bool:
        kind = type(s)
        args = _args(s) if kind in (All, Some, AllOrSome) else None
        if args is None:
            return False
        for pos, t in enumerate(args):
            dom = self.domains.get((kind, pos))
            if dom is None or t not in dom:
                return False
        return self.extra is None or self.extra(s)

    def kinds(self) -> set:
        return {k for k, _ in self.domains}

    def members(self):
        for kind in sorted(self.kinds(), key=lambda k: k.__name__):
            arity = 4 if kind is AllOrSome else 2
            doms = [sorted(self.domains[(kind, i)], key=str) for i in range(arity)]
            for args in itertools.product(*doms):
                s = kind(*args)
                if self.extra is None or self.extra(s):
                    yield s

    def __len__(self) -> int:
        if self.extra is None:
            total = 0
            for kind in self.kinds():
                arity = 4 if kind is AllOrSome else 2
                n = 1
                for i in range(arity):
                    n *= len(self.domains[(kind, i)])
                total += n
            return total
        return sum(1 for _ in self.members())

    def bound(self) -> int:
        """An upper bound on the size, computed without enumerating."""
        total = 0
        for kind in self.kinds():
            arity = 4 if kind is AllOrSome else 2
            n = 1
            for i in range(arity):
                n *= len(self.domains[(kind, i)])
            total += n
        return total


def _closures(delta) -> tuple:
    delta = list(delta)
    T = term_closure(delta)
    Tp = term_closure_plus(delta)
    _, verbs = vocabulary(delta)
    return T, Tp, verbs


def g1(delta: Iterable) -> SentenceUniverse:
    """All sentences (all u v) with u in T(delta) and v in T+(delta)."""
    T, Tp, verbs = _closures(delta)
    return SentenceUniverse("g1", Tp, verbs, {(All, 0): T, (All, 1): Tp})


def g2plus(delta: Iterable, focus: Optional[Iterable] = None) -> SentenceUniverse:
    """Families (i)-(iii): all u v (u in T, v in T+), some u v (u, v in T),
    and all x y or some u v (x, u, v in T, y in T+).

    With ``focus`` (a set of pairs (u, v)), family (iii) is cut down to the
    disjunct pairs in focus plus the instances of EMPTY1/EMPTY2, which are
    the only disjunctive sentences the completeness argument for a goal with
    those pairs ever uses.
    """
    T, Tp, verbs = _closures(delta)
    doms = {(All, 0): T, (All, 1): Tp, (Some, 0): T, (Some, 1): T,
            (AllOrSome, 0): T, (AllOrSome, 1): Tp, (AllOrSome, 2): T, (AllOrSome, 3): T}
    if focus is None:
        return SentenceUniverse("g2plus", Tp, verbs, doms)
    pairs = frozenset(p for p in focus if p[0] in T and p[1] in T)

    def extra(s):
        if type(s) is not AllOrSome:
            return True
        if (s.x, s.y) in pairs:
            return True
        if s.x != s.y:
            return False
        # EMPTY1: all a b or some a a;  EMPTY2: all b (r all a) or some a a
        return s.a == s.x or (isinstance(s.b, AllOf) and s.b.body == s.x)

    def inert(s):
        # a disjunction on a pair outside the focus is an EMPTY1/EMPTY2
        # instance, derived in the first round; the only rule that can turn
        # it into something new is NEWNEWDARII, through its first premise
        return type(s) is AllOrSome and (s.x, s.y) not in pairs

    diag = frozenset((t, t) for t in T)
    return SentenceUniverse("g2plus-focused", Tp, verbs, doms, extra, pairs | diag,
                            inert, frozenset({("NEWNEWDARII", 0)}))


def extend_terms(T: Iterable, verbs: Iterable, slack: int = 1, with_some: bool = True) -> frozenset:
    out = set(T)
    layer = set(T)
    for _ in range(slack):
        new = set()
        for w in layer:
            for r in verbs:
                new.add(AllOf(r, w))
                if with_some:
                    new.add(SomeOf(r, w))
        new -= out
        out |= new
        layer = new
    return frozenset(out)


def branch_universe(delta: Iterable, slack: int = 1, some_sentences: bool = True,
                    verbs: Optional[Iterable] = None) -> SentenceUniverse:
    """All/Some sentences over T(delta) extended ``slack`` times by one
    (r all _) or (r some _) constructor per verb."""
    delta = list(delta)
    T = term_closure(delta)
    if verbs is None:
        _, verbs = vocabulary(delta)
    verbs = frozenset(verbs)
    Ts = extend_terms(T, verbs, slack)
    doms = {(All, 0): Ts, (All, 1): Ts}
    if some_sentences:
        doms.update({(Some, 0): Ts, (Some, 1): Ts})
    return SentenceUniverse(f"branch(d={slack})", Ts, verbs, doms)


def universe_from(sentences: Iterable, origin: str = "explicit") -> SentenceUniverse:
    """A universe consisting of exactly the given sentences."""
    members = frozenset(sentences)
    doms = {}
    for s in members:
        for pos, t in enumerate(_args(s)):
            doms.setdefault((type(s), pos), set()).add(t)
    doms = {k: frozenset(v) for k, v in doms.items()}
    terms = frozenset(itertools.chain.from_iterable(doms.values()))
    _, verbs = vocabulary(members) if members else (frozenset(), frozenset())
    return SentenceUniverse(origin, terms, verbs, doms, members.__contains__)


# ---------------------------------------------------------------------------
# engine


@dataclass
class SaturationResult:
    derived: frozenset
    derivation_of: dict
    rounds: int
    round_of: dict
    universe_size: int
    stats: dict = field(default_factory=dict)

    def __contains__(self, s):
        return s in self.derived


_FIELDS = {All: ("lhs", "rhs"), Some: ("lhs", "rhs"), AllOrSome: ("a", "b", "x", "y")}


def compile_pattern(pattern):
    """A fast matcher equivalent to ``match_sentence(pattern, s, subst)``."""
    kind = type(pattern)
    fields = _FIELDS[kind]
    lines = ["def m(s, subst):",
             f"    if type(s) is not {kind.__name__}:",
             "        return None"]
    lines += [f"    a{i} = s.{f}" for i, f in enumerate(fields)]
    first_pos = {}
    for i, a in enumerate(_args(pattern)):
        if isinstance(a, Var):
            if a.name in first_pos:
                lines.append(f"    if a{i} != a{first_pos[a.name]}:")
                lines.append("        return None")
            else:
                first_pos[a.name] = i
                lines.append(f"    v = subst.get({a.name!r})")
                lines.append(f"    if v is not None and v != a{i}:")
                lines.append("        return None")
    lines.append("    out = dict(subst)")
    for name, i in first_pos.items():
        lines.append(f"    out[{name!r}] = a{i}")
    for i, a in enumerate(_args(pattern)):
        if not isinstance(a, Var):
            lines.append(f"    if not match_term(P{i}, a{i}, out):")
            lines.append("        return None")
    lines.append("    return out")
    env = {"All": All, "Some": Some, "AllOrSome": AllOrSome, "match_term": match_term}
    env.update({f"P{i}": a for i, a in enumerate(_args(pattern))})
    exec("\n".join(lines), env)
    return env["m"]


def _repeated_pair(pattern):
    """The first pair of top-level positions holding the same variable."""
    args = _args(pattern)
    for i in range(len(args)):
        for j in range(i + 1, len(args)):
            if isinstance(args[i], Var) and args[i] == args[j]:
                return (i, j)
    return None


class _Rule:
    """A rule template with precomputed join information."""

    def __init__(self, tmpl: RuleTemplate):
        self.tmpl = tmpl
        self.name = tmpl.name
        self.premises = tmpl.premises
        self.matchers = [compile_pattern(p) for p in tmpl.premises]
        self.eqs = [_repeated_pair(p) for p in tmpl.premises]
        bound_t, bound_v = set(), set()
        for p in tmpl.premises:
            for a in _args(p):
                _pattern_vars(a, bound_t, bound_v)
        ct, cv = set(), set()
        for a in _args(tmpl.conclusion):
            _pattern_vars(a, ct, cv)
        self.free_terms = sorted(ct - bound_t)
        self.free_verbs = sorted(cv - bound_v)
        # top-level position of each free term variable in the conclusion
        self.free_pos = {}
        for pos, a in enumerate(_args(tmpl.conclusion)):
            if isinstance(a, Var) and a.name in self.free_terms:
                self.free_pos.setdefault(a.name, pos)


# proper nonempty subsets of argument positions, used as index keys
_SUBSETS = {n: [c for k in range(1, n) for c in itertools.combinations(range(n), k)]
            for n in (2, 4)}
_ALL_SUBSETS = {n: [c for k in range(0, n + 1) for c in itertools.combinations(range(n), k)]
                for n in (2, 4)}


_printed = functools.lru_cache(maxsize=1 << 16)(print_sentence)


def _derivation_key(rule_name: str, premises: tuple) -> tuple:
    return (rule_name, tuple(_printed(p) for p in premises))


class Saturator:
    """Incremental saturation state; ``copy`` gives an independent branch."""

    def __init__(self, rules, universe: SentenceUniverse, cap: int = DEFAULT_UNIVERSE_CAP):
        rs = rules if isinstance(rules, (list, tuple)) else ruleset(rules).saturation_rules()
        self.rules = [_Rule(r) for r in sorted(rs, key=lambda r: r.name)]
        self.universe = universe
        bound = universe.bound()
        if bound > cap:
            raise BudgetError(f"universe bound {bound} exceeds cap {cap}")
        self.derived = {}
        self.round_of = {}
        self.by_kind = {}
        self.by_arg = {}
        # inert facts live apart, indexed lazily per access shape
        self.inert_facts = []
        self.inert_idx = {}
        self.rounds = 0
        self.started = False
        self.instances = 0
        self._verb_tables = {}

    def copy(self) -> "Saturator":
        new = Saturator.__new__(Saturator)
        new.rules = self.rules
        new.universe = self.universe
        new.derived = dict(self.derived)
        new.round_of = dict(self.round_of)
        new.by_kind = {k: list(v) for k, v in self.by_kind.items()}
        new.by_arg = {k: list(v) for k, v in self.by_arg.items()}
        new.inert_facts = list(self.inert_facts)
        new.inert_idx = {shape: {k: list(v) for k, v in idx.items()}
                         for shape, idx in self.inert_idx.items()}
        new.rounds = self.rounds
        new.started = self.started
        new.instances = self.instances
        new._verb_tables = self._verb_tables
        return new

    # -- indexing

    def _index(self, s) -> None:
        inert = self.universe.inert
        if inert is not None and inert(s):
            self.inert_facts.append(s)
            for shape, idx in self.inert_idx.items():
                self._add_shaped(shape, idx, s)
            return
        kind = type(s)
        self.by_kind.setdefault(kind, []).append(s)
        args = _args(s)
        for positions in _SUBSETS[len(args)]:
            key = (kind, positions, tuple(args[i] for i in positions))
            self.by_arg.setdefault(key, []).append(s)
        # facts with two equal arguments, for patterns with a repeated variable
        n = len(args)
        for i in range(n):
            for j in range(i + 1, n):
                if args[i] == args[j]:
                    for positions in _ALL_SUBSETS[n]:
                        key = (kind, (i, j), positions, tuple(args[k] for k in positions))
                        self.by_arg.setdefault(key, []).append(s)

    @staticmethod
    def _add_shaped(shape, idx, s) -> None:
        kind, eq, positions = shape
        if type(s) is not kind:
            return
        args = _args(s)
        if eq is not None and args[eq[0]] != args[eq[1]]:
            return
        idx.setdefault(tuple(args[i] for i in positions), []).append(s)

    def _inert_candidates(self, kind, eq, positions, values):
        shape = (kind, eq, positions)
        idx = self.inert_idx.get(shape)
        if idx is None:
            idx = self.inert_idx[shape] = {}
            for s in self.inert_facts:
                self._add_shaped(shape, idx, s)
        return idx.get(values, ())

    # -- matching

    def _candidates(self, pattern, subst, eq=None, with_inert=False):
        kind = type(pattern)
        positions, values = [], []
        for pos, a in enumerate(_args(pattern)):
            t = instantiate_term(a, subst)
            if t is not None:
                positions.append(pos)
                values.append(t)
        if with_inert and self.inert_facts:
            extra = self._inert_candidates(kind, eq, tuple(positions), tuple(values))
            if extra:
                return list(self._candidates(pattern, subst, eq)) + extra
        if eq is not None:
            return self.by_arg.get((kind, eq, tuple(positions), tuple(values)), ())
        if not positions:
            return self.by_kind.get(kind, ())
        return self.by_arg.get((kind, tuple(positions), tuple(values)), ())

    def _join(self, rule, skip: int, subst: dict, chosen: list, out: list, idx: int = 0):
        premises = rule.premises
        if idx == len(premises):
            out.append((subst, tuple(chosen)))
            return
        if idx == skip:
            self._join(rule, skip, subst, chosen, out, idx + 1)
            return
        pattern = premises[idx]
        matcher = rule.matchers[idx]
        ground = instantiate(pattern, subst)
        if ground is not None:
            if ground in self.derived:
                chosen[idx] = ground
                self._join(rule, skip, subst, chosen, out, idx + 1)
            return
        with_inert = (rule.name, idx) in self.universe.inert_roles
        for s in self._candidates(pattern, subst, rule.eqs[idx], with_inert):
            sub2 = matcher(s, subst)
            if sub2 is not None:
                chosen[idx] = s
                self._join(rule, skip, sub2, chosen, out, idx + 1)

    def _verb_domain(self, kind, args, v, subst) -> list:
        """Verbs r that can fill verb variable v given the bound positions."""
        U = self.universe
        allowed = set(U.verbs)
        for pos, a in enumerate(args):
            if isinstance(a, (AllOf, SomeOf)) and a.verb == v:
                body = instantiate_term(a.body, subst)
                if body is None:
                    continue
                table = self._verb_tables.get((kind, pos, type(a)))
                if table is None:
                    table = {}
                    for t in U.domains.get((kind, pos), ()):
                        if type(t) is type(a):
                            table.setdefault(t.body, set()).add(t.verb)
                    self._verb_tables[(kind, pos, type(a))] = table
                allowed &= table.get(body, set())
        return sorted(allowed)

    def _conclusions(self, rule: _Rule, subst: dict):
        concl = rule.tmpl.conclusion
        if not rule.free_terms and not rule.free_verbs:
            s = instantiate(concl, subst)
            if s is not None:
                yield s
            return
        U = self.universe
        kind = type(concl)
        free_t = list(rule.free_terms)
        args = _args(concl)
        pair_vars = None
        if (U.aos_pairs is not None and kind is AllOrSome and isinstance(args[2], Var)
                and isinstance(args[3], Var) and args[2].name in free_t and args[3].name in free_t
                and args[2].name != args[3].name):
            pair_vars = (args[2].name, args[3].name)
            free_t = [v for v in free_t if v not in pair_vars]
        doms = []
        for v in free_t:
            pos = rule.free_pos.get(v)
            doms.append(U.domains.get((kind, pos), U.terms) if pos is not None else U.terms)
        vdoms = [self._verb_domain(kind, args, v, subst) for v in rule.free_verbs]
        pair_iter = U.aos_pairs if pair_vars is not None else [None]
        for pair in pair_iter:
            base = dict(subst)
            if pair is not None:
                base[pair_vars[0]], base[pair_vars[1]] = pair
            for tvals in itertools.product(*doms):
                for vvals in itertools.product(*vdoms):
                    sub = dict(base)
                    sub.update(zip(free_t, tvals))
                    sub.update((_vkey(r), val) for r, val in zip(rule.free_verbs, vvals))
                    s = instantiate(concl, sub)
                    if s is not None:
                        yield s

    # -- main loop

    def add(self, sentences: Iterable, max_rounds: Optional[int] = None) -> None:
        """Add sentences (those in the universe) as premises and re-saturate."""
        delta = []
        for s in sentences:
            if s in self.universe and s not in self.derived:
                self.derived[s] = ("PREMISE", ())
                self.round_of[s] = self.rounds
                delta.append(s)
        for s in delta:
            self._index(s)
        first = not self.started
        self.started = True
        self._run(delta, first, max_rounds)

    def _run(self, delta: list, first: bool, max_rounds) -> None:
        U = self.universe
        while delta or first:
            new = {}
            delta_by_kind = {}
            for f in delta:
                delta_by_kind.setdefault(type(f), []).append(f)

            def offer(s, rule_name, prem):
                self.instances += 1
                if s in self.derived or s not in U:
                    return
                cur = new.get(s)
                if cur is None:
                    new[s] = (rule_name, prem)
                elif _derivation_key(rule_name, prem) < _derivation_key(*cur):
                    new[s] = (rule_name, prem)

            for rule in self.rules:
                k = len(rule.premises)
                if k == 0:
                    if first:
                        for s in self._conclusions(rule, {}):
                            offer(s, rule.name, ())
                    continue
                for i, pattern in enumerate(rule.premises):
                    matcher = rule.matchers[i]
                    inert = U.inert
                    if inert is not None and (rule.name, i) in U.inert_roles:
                        inert = None
                    for f in delta_by_kind.get(type(pattern), ()):
                        if inert is not None and inert(f):
                            continue
                        subst = matcher(f, {})
                        if subst is None:
                            continue
                        chosen = [None] * k
                        chosen[i] = f
                        found = []
                        self._join(rule, i, subst, chosen, found)
                        for sub, prem in found:
                            for s in self._conclusions(rule, sub):
                                offer(s, rule.name, prem)
            first = False
            if not new:
                break
            self.rounds += 1
            for s in sorted(new, key=print_sentence):
                self.derived[s] = new[s]
                self.round_of[s] = self.rounds
                self._index(s)
            delta = list(new)
            if max_rounds is not None and self.rounds >= max_rounds:
                break

    def result(self) -> SaturationResult:
        return SaturationResult(frozenset(self.derived), dict(self.derived), self.rounds,
                                dict(self.round_of), self.universe.bound(),
                                {"derived": len(self.derived), "instances": self.instances})


def saturate(gamma: Iterable, rules, universe: SentenceUniverse,
             cap: int = DEFAULT_UNIVERSE_CAP) -> SaturationResult:
    """Least fixpoint of the rules over the universe, starting from gamma ∩ A."""
    sentences = list(gamma.sentences) if hasattr(gamma, "sentences") else list(gamma)
    sat = Saturator(rules, universe, cap)
    sat.add(sentences)
    return sat.result()


def extract_proof(derivation_of: dict, phi, hyps: Iterable = ()) -> ProofNode:
    """The recorded derivation of phi as a proof DAG.

    Sentences recorded as premises become PREMISE leaves, or HYP leaves when
    they are listed in ``hyps``.
    """
    if isinstance(derivation_of, SaturationResult):
        derivation_of = derivation_of.derivation_of
    hyps = frozenset(hyps)
    memo = {}
    # iterative post-order to avoid deep recursion on long derivations
    stack = [phi]
    while stack:
        s = stack[-1]
        if s in memo:
            stack.pop()
            continue
        if s not in derivation_of:
            raise KeyError(f"{print_sentence(s)} was not derived")
        rule_name, prem = derivation_of[s]
        pending = [p for p in prem if p not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if rule_name == "PREMISE":
            memo[s] = ProofNode(s, "HYP" if s in hyps else "PREMISE")
        else:
            memo[s] = ProofNode(s, rule_name, tuple(memo[p] for p in prem))
    return memo[phi]
