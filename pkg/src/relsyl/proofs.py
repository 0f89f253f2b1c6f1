"""Rule templates, proof trees, chains, and the proof checker.

Rule templates are written in the ordinary sentence syntax: every noun in a
template is a term variable and every verb is a verb variable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

from .syntax import (All, AllOf, AllOrSome, EmptyMeet, NonemptyMeet, Not, Noun,
                     Some, SomeOf, Theory, parse_sentence, print_sentence)

# ---------------------------------------------------------------------------
# template variables and matching


@dataclass(frozen=True)
class Var:
    """A term variable inside a rule template."""

    name: str

    def __str__(self):
        return self.name


def _to_pattern_term(t):
    if isinstance(t, Noun):
        return Var(t.name)
    if isinstance(t, AllOf):
        return AllOf(t.verb, _to_pattern_term(t.body))
    if isinstance(t, SomeOf):
        return SomeOf(t.verb, _to_pattern_term(t.body))
    return Not(_to_pattern_term(t.body))


def _to_pattern(s):
    if isinstance(s, All):
        return All(_to_pattern_term(s.lhs), _to_pattern_term(s.rhs))
    if isinstance(s, Some):
        return Some(_to_pattern_term(s.lhs), _to_pattern_term(s.rhs))
    if isinstance(s, AllOrSome):
        return AllOrSome(*(_to_pattern_term(t) for t in (s.a, s.b, s.x, s.y)))
    raise TypeError(f"no template form for {s!r}")


def _pattern_vars(p, tvars: set, vvars: set) -> None:
    while not isinstance(p, Var):
        if isinstance(p, (AllOf, SomeOf)):
            vvars.add(p.verb)
        p = p.body
    tvars.add(p.name)


# Verb variables live in the same substitution dict under a "^" prefix.
def _vkey(r: str) -> str:
    return "^" + r


def match_term(p, t, subst: dict) -> bool:
    """Extend subst (in place) so that p instantiates to t; False on clash."""
    while True:
        if isinstance(p, Var):
            bound = subst.get(p.name)
            if bound is None:
                subst[p.name] = t
                return True
            return bound == t
        if type(p) is not type(t):
            return False
        if isinstance(p, (AllOf, SomeOf)):
            k = _vkey(p.verb)
            bound = subst.get(k)
            if bound is None:
                subst[k] = t.verb
            elif bound != t.verb:
                return False
        p, t = p.body, t.body


def _args(s) -> tuple:
    if isinstance(s, (All, Some)):
        return (s.lhs, s.rhs)
    return (s.a, s.b, s.x, s.y)


def match_sentence(p, s, subst: dict) -> Optional[dict]:
    """A new substitution extending subst that maps pattern p to s, or None."""
    if type(p) is not type(s):
        return None
    out = dict(subst)
    for pt, t in zip(_args(p), _args(s)):
        if not match_term(pt, t, out):
            return None
    return out


def instantiate_term(p, subst: dict):
    """The instance of a term pattern, or None if some variable is unbound."""
    if isinstance(p, Var):
        return subst.get(p.name)
    body = instantiate_term(p.body, subst)
    if body is None:
        return None
    if isinstance(p, Not):
        return Not(body)
    verb = subst.get(_vkey(p.verb))
    if verb is None:
        return None
    return AllOf(verb, body) if isinstance(p, AllOf) else SomeOf(verb, body)


def instantiate(p, subst: dict):
    args = [instantiate_term(a, subst) for a in _args(p)]
    if any(a is None for a in args):
        return None
    return type(p)(*args)


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class RuleTemplate:
    name: str
    premises: tuple
    conclusion: object
    term_vars: frozenset = field(default=frozenset())
    verb_vars: frozenset = field(default=frozenset())

    def __str__(self):
        prem = ", ".join(print_sentence(p) for p in self.premises)
        return f"{self.name}: {prem} |- {print_sentence(self.conclusion)}"


def rule(name: str, premises: Sequence[str], conclusion: str) -> RuleTemplate:
    prem = tuple(_to_pattern(parse_sentence(p)) for p in premises)
    concl = _to_pattern(parse_sentence(conclusion))
    tvars, vvars = set(), set()
    for s in prem + (concl,):
        for a in _args(s):
            _pattern_vars(a, tvars, vvars)
    return RuleTemplate(name, prem, concl, frozenset(tvars), frozenset(vvars))


def match_instance(r: RuleTemplate, premises: Sequence, conclusion) -> Optional[dict]:
    """A substitution making r's templates equal the given sentences.

    Premises are matched in every order.
    """
    if len(premises) != len(r.premises):
        return None
    base = match_sentence(r.conclusion, conclusion, {})
    if base is None:
        return None
    for order in permutations(premises):
        subst = base
        for p, s in zip(r.premises, order):
            subst = match_sentence(p, s, subst)
            if subst is None:
                break
        else:
            return subst
    return None


AXIOM = rule("AXIOM", [], "all x x")
BARBARA = rule("BARBARA", ["all x y", "all y z"], "all x z")
ANTI = rule("ANTI", ["all x y"], "all (r all y) (r all x)")
SOME1 = rule("SOME1", ["some x y"], "some x x")
SOME2 = rule("SOME2", ["some x y"], "some y x")
DARII = rule("DARII", ["some x y", "all y z"], "some x z")

EMPTY1 = rule("EMPTY1", [], "all a b or some a a")
EMPTY2 = rule("EMPTY2", [], "all b (r all a) or some a a")
NEWSOME1 = rule("NEWSOME1", ["all a b or some x y"], "all a b or some x x")
NEWSOME2 = rule("NEWSOME2", ["all a b or some x y"], "all a b or some y x")
LWEAK = rule("LWEAK", ["all a b"], "all a b or some x y")
RWEAK = rule("RWEAK", ["some x y"], "all a b or some x y")
NEWBARBARA = rule("NEWBARBARA", ["all a b or some x y", "all b c or some x y"],
                  "all a c or some x y")
NEWANTI = rule("NEWANTI", ["all a b or some x y"], "all (r all b) (r all a) or some x y")
NEWDARII = rule("NEWDARII", ["some t u", "all t x or some x y", "all u y or some x y"],
                "some x y")
NEWNEWDARII = rule("NEWNEWDARII",
                   ["all a b or some t u", "all t x or some x y", "all u y or some x y"],
                   "all a b or some x y")

R1 = rule("R1", ["all x y"], "all (r some x) (r some y)")
R2 = rule("R2", ["some x y"], "all (r all x) (r some y)")
R3 = rule("R3", ["some x (r some y)"], "some y y")
MIX = rule("MIX", ["all (r all y) (r some y)", "all y (r some x)"], "all (s all x) (s some x)")

# Rules with discharged assumptions, and the clausal rules, are checked by
# dedicated code rather than by template matching.
DISCHARGE_RULES = ("CASES", "CASES1", "CASES2", "CASES3", "RAA")
CLAUSAL_RULES = ("CLAXIOM", "RES", "REL", "STRUCTURAL", "EFQ")


@dataclass(frozen=True)
class RuleSet:
    name: str
    templates: tuple
    special: frozenset = frozenset()

    @property
    def names(self) -> frozenset:
        return frozenset(r.name for r in self.templates) | self.special

    def template(self, name: str) -> Optional[RuleTemplate]:
        for r in self.templates:
            if r.name == name:
                return r
        return None

    def saturation_rules(self) -> tuple:
        return self.templates


_L1 = (AXIOM, BARBARA, ANTI)
_BASE0 = _L1 + (SOME1, SOME2, DARII)
_FIG3 = (EMPTY1, EMPTY2, LWEAK, RWEAK, NEWSOME1, NEWSOME2, NEWBARBARA, NEWANTI,
         NEWDARII, NEWNEWDARII)

RULESETS = {
    "L1Core": RuleSet("L1Core", _L1),
    "Base0": RuleSet("Base0", _BASE0),
    "L2Cases": RuleSet("L2Cases", _BASE0, frozenset({"CASES"})),
    "L2Chains": RuleSet("L2Chains", _BASE0, frozenset({"CHAINS"})),
    "L2PlusRules": RuleSet("L2PlusRules", _BASE0 + _FIG3),
    "L35Rules": RuleSet("L35Rules", _BASE0 + (R1, R2, R3), frozenset({"CASES", "CASES1"})),
    "L3Rules": RuleSet("L3Rules", _L1 + (R1, MIX), frozenset({"CASES3", "CASES2"})),
    "ClausalRules": RuleSet("ClausalRules", (), frozenset(CLAUSAL_RULES + ("RAA",))),
}


def ruleset(name) -> RuleSet:
    if isinstance(name, RuleSet):
        return name
    try:
        return RULESETS[name]
    except KeyError:
        raise ValueError(f"unknown rule set {name!r}; choose from {sorted(RULESETS)}") from None


# ---------------------------------------------------------------------------
# proof trees


@dataclass(frozen=True, eq=False)
class ProofNode:
    conclusion: object
    rule: str
    children: tuple = ()
    discharged: tuple = ()
    chains: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "discharged", tuple(self.discharged))
        object.__setattr__(self, "chains", tuple(tuple(c) for c in self.chains))

    def nodes(self):
        """Distinct nodes of the proof DAG (each once)."""
        seen, stack, out = set(), [self], []
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            out.append(n)
            stack.extend(n.children)
        return out

    def rules_used(self) -> set:
        return {n.rule for n in self.nodes()}

    def size(self) -> int:
        return len(self.nodes())


def premise(s) -> ProofNode:
    return ProofNode(s, "PREMISE")


def hyp(s) -> ProofNode:
    return ProofNode(s, "HYP")


def proof_to_json(node: ProofNode) -> dict:
    memo = {}

    def go(n):
        key = id(n)
        if key not in memo:
            d = {"conclusion": print_sentence(n.conclusion), "rule": n.rule,
                 "children": [go(c) for c in n.children]}
            if n.discharged:
                d["discharged"] = [None if s is None else print_sentence(s) for s in n.discharged]
            if n.chains:
                d["chains"] = [[print_sentence(s) for s in c] for c in n.chains]
            memo[key] = d
        return memo[key]

    return go(node)


def proof_from_json(data: dict, allow_reserved: bool = False) -> ProofNode:
    p = lambda text: parse_sentence(text, allow_reserved=allow_reserved)  # noqa: E731
    return ProofNode(
        p(data["conclusion"]), data["rule"],
        tuple(proof_from_json(c, allow_reserved) for c in data.get("children", ())),
        tuple(None if s is None else p(s) for s in data.get("discharged", ())),
        tuple(tuple(p(s) for s in c) for c in data.get("chains", ())),
    )


def dumps_proof(node: ProofNode) -> str:
    return json.dumps(proof_to_json(node), indent=1)


# ---------------------------------------------------------------------------
# anti images


def all_prefix(rvec: Sequence[str], x):
    """(r1 all (r2 all ... (rk all x)))."""
    for r in reversed(rvec):
        x = AllOf(r, x)
    return x


def anti_image(rvec: Sequence[str], psi: All) -> All:
    if not isinstance(psi, All):
        raise TypeError("anti_image needs an all-sentence")
    u, v = all_prefix(rvec, psi.lhs), all_prefix(rvec, psi.rhs)
    return All(u, v) if len(rvec) % 2 == 0 else All(v, u)


def anti_proof(rvec: Sequence[str], proof: ProofNode) -> ProofNode:
    """Wrap a proof of psi in |rvec| ANTI steps, concluding anti_image(rvec, psi)."""
    node = proof
    for r in reversed(rvec):
        s = node.conclusion
        node = ProofNode(All(AllOf(r, s.rhs), AllOf(r, s.lhs)), "ANTI", (node,))
    return node


# ---------------------------------------------------------------------------
# chains


class ChainError(ValueError):
    def __init__(self, message: str, index: int = -1):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Chain:
    """A chain linking ``start`` to ``end``.

    ``alternatives[i]`` is the set of terms that can serve as the missing
    link between sentence i and sentence i+1, one per decomposition.
    """

    sentences: tuple
    alternatives: tuple

    @property
    def start(self):
        return self.sentences[0].lhs

    @property
    def end(self):
        return self.sentences[-1].rhs

    def links(self, a, b) -> bool:
        return self.start == a and self.end == b

    def missing_link_choices(self) -> list:
        """Every missing-link set obtainable by choosing one decomposition per pair."""
        out = {frozenset()}
        for alts in self.alternatives:
            out = {s | {t} for s in out for t in alts}
        return sorted(out, key=lambda s: sorted(map(str, s)))


def link_candidates(u, v) -> frozenset:
    """Missing-link terms t for which (u, v) is a valid consecutive pair."""
    out = set()
    k = 0
    while True:
        if k % 2 == 0 and isinstance(v, AllOf):
            out.add(v.body)
        if k % 2 == 1 and isinstance(u, AllOf):
            out.add(u.body)
        if isinstance(u, AllOf) and isinstance(v, AllOf) and u.verb == v.verb:
            u, v, k = u.body, v.body, k + 1
        else:
            return frozenset(out)


def validate_chain(sentences: Sequence) -> Chain:
    sentences = tuple(sentences)
    if not sentences:
        raise ChainError("a chain needs at least one sentence", 0)
    for i, s in enumerate(sentences):
        if not isinstance(s, All):
            raise ChainError(f"chain sentence {i} is not an all-sentence", i)
    alts = []
    for i in range(len(sentences) - 1):
        cands = link_candidates(sentences[i].rhs, sentences[i + 1].lhs)
        if not cands:
            raise ChainError(f"sentences {i} and {i + 1} cannot be linked", i)
        alts.append(cands)
    return Chain(sentences, tuple(alts))


def check_chain_system(chains: Sequence[Chain], x, y) -> Optional[str]:
    """None if the chains form an (x, y) chain system, else a reason.

    The missing-link condition for one pair depends only on which earlier
    chains link what, so each pair can choose its decomposition independently.
    """
    to_x, to_y = set(), set()
    for n, c in enumerate(chains):
        for i, alts in enumerate(c.alternatives):
            if not any(t in to_x and t in to_y for t in alts):
                shown = ", ".join(sorted(map(str, alts)))
                return (f"chain {n}, link {i}: no missing link among {{{shown}}} "
                        f"is linked to both {x} and {y} by earlier chains")
        if c.end == x:
            to_x.add(c.start)
        if c.end == y:
            to_y.add(c.start)
    return None


def check_chains_instance(conclusion, some_sentence, chains: Sequence) -> Optional[str]:
    """None if this is a valid CHAINS instance, else the reason it is not."""
    if not isinstance(conclusion, Some):
        return "CHAINS concludes a some-sentence"
    if not isinstance(some_sentence, Some):
        return "CHAINS needs a some-sentence premise"
    built = []
    for n, c in enumerate(chains):
        if isinstance(c, Chain):
            built.append(c)
            continue
        try:
            built.append(validate_chain(c))
        except ChainError as e:
            return f"chain {n}: {e}"
    x, y = conclusion.lhs, conclusion.rhs
    why = check_chain_system(built, x, y)
    if why:
        return why
    a, b = some_sentence.lhs, some_sentence.rhs
    if not any(c.links(a, x) for c in built):
        return f"no chain links {a} to {x}"
    if not any(c.links(b, y) for c in built):
        return f"no chain links {b} to {y}"
    return None


# ---------------------------------------------------------------------------
# clausal rule checks (set semantics on bracket sentences)


def _lits(s) -> frozenset:
    return frozenset(s.terms)


def _check_claxiom(node) -> Optional[str]:
    c = node.conclusion
    if node.children:
        return "CLAXIOM has no premises"
    if not isinstance(c, EmptyMeet):
        return "CLAXIOM concludes a bracket sentence"
    lits = _lits(c)
    if len(lits) == 2:
        a, b = lits
        if a == Not(b) or b == Not(a):
            return None
    return "CLAXIOM concludes [x, (not x)]"


def resolvents(c1: frozenset, c2: frozenset) -> list:
    """All (pivot, result) for RES with the pivot in c1 and its negation in c2."""
    out = []
    for x in c1:
        nx = Not(x)
        if nx in c2:
            res = (c1 - {x}) | (c2 - {nx})
            if res:
                out.append((x, frozenset(res)))
    return out


def _check_res(node) -> Optional[str]:
    if len(node.children) != 2:
        return "RES has two premises"
    p, q = (ch.conclusion for ch in node.children)
    c = node.conclusion
    if not all(isinstance(s, EmptyMeet) for s in (p, q, c)):
        return "RES works on bracket sentences"
    target = _lits(c)
    for a, b in ((p, q), (q, p)):
        if any(res == target for _, res in resolvents(_lits(a), _lits(b))):
            return None
    return "conclusion is not a resolvent of the premises"


def rel_results(lits: frozenset, r: str) -> list:
    """REL conclusions from a bracket literal set, one per admissible selection."""
    out = []
    for xn in lits:
        rest = lits - {xn}
        if all(isinstance(t, Not) for t in rest):
            concl = {AllOf(r, t.body) for t in rest} | {Not(AllOf(r, xn))}
            out.append(frozenset(concl))
    return out


def _check_rel(node) -> Optional[str]:
    if len(node.children) != 1:
        return "REL has one premise"
    p = node.children[0].conclusion
    c = node.conclusion
    if not (isinstance(p, EmptyMeet) and isinstance(c, EmptyMeet)):
        return "REL works on bracket sentences"
    target = _lits(c)
    verbs = set()
    for t in target:
        if isinstance(t, Not):
            t = t.body
        if isinstance(t, AllOf):
            verbs.add(t.verb)
    for r in verbs:
        if target in rel_results(_lits(p), r):
            return None
    return "conclusion is not a REL image of the premise"


def _check_structural(node) -> Optional[str]:
    if len(node.children) != 1:
        return "STRUCTURAL has one premise"
    p = node.children[0].conclusion
    c = node.conclusion
    if not (isinstance(p, EmptyMeet) and isinstance(c, EmptyMeet)):
        return "STRUCTURAL works on bracket sentences"
    if not _lits(p) <= _lits(c):
        return "STRUCTURAL premise literals must all occur in the conclusion"
    return None


def _check_efq(node) -> Optional[str]:
    if len(node.children) != 2:
        return "EFQ has two premises"
    if not isinstance(node.conclusion, EmptyMeet):
        return "EFQ concludes a bracket sentence"
    p, q = (ch.conclusion for ch in node.children)
    for a, b in ((p, q), (q, p)):
        if isinstance(a, NonemptyMeet) and isinstance(b, EmptyMeet) and _lits(a) == _lits(b):
            return None
    return "EFQ premises must be contradictory <ys> and [ys]"


_CLAUSAL_CHECKS = {"CLAXIOM": _check_claxiom, "RES": _check_res, "REL": _check_rel,
                   "STRUCTURAL": _check_structural, "EFQ": _check_efq}


# ---------------------------------------------------------------------------
# discharge rules


def _discharge_shape(rule_name: str, node) -> Optional[str]:
    if len(node.children) != 2 or len(node.discharged) != 2:
        return f"{rule_name} has two subproofs, each with a withdrawn assumption"
    left, right = node.discharged
    if rule_name == "RAA":
        c = node.conclusion
        if not isinstance(c, NonemptyMeet):
            return "RAA concludes a <...> sentence"
        if left != right:
            return "RAA withdraws the same assumption in both subproofs"
        if not isinstance(left, EmptyMeet) or _lits(left) != _lits(c):
            return "RAA withdraws the bracket contradictory of its conclusion"
        p, q = (ch.conclusion for ch in node.children)
        if not (isinstance(p, NonemptyMeet) and isinstance(q, EmptyMeet) and _lits(p) == _lits(q)):
            return "RAA subproofs must conclude <ys> and [ys]"
        return None
    for ch in node.children:
        if ch.conclusion != node.conclusion:
            return f"{rule_name} subproofs must both conclude {print_sentence(node.conclusion)}"
    if rule_name in ("CASES", "CASES1"):
        if not (isinstance(left, Some) and left.lhs == left.rhs):
            return f"{rule_name} withdraws some x x on the left"
        x = left.lhs
        if not isinstance(right, All):
            return f"{rule_name} withdraws an all-sentence on the right"
        if rule_name == "CASES":
            ok = isinstance(right.rhs, AllOf) and right.rhs.body == x
            return None if ok else "CASES withdraws all y (r all x) on the right"
        return None if right.lhs == x else "CASES1 withdraws all x y on the right"
    if rule_name in ("CASES3", "CASES2"):
        ok = (isinstance(left, All) and isinstance(left.lhs, AllOf) and isinstance(left.rhs, SomeOf)
              and left.lhs.verb == left.rhs.verb and left.lhs.body == left.rhs.body)
        if not ok:
            return f"{rule_name} withdraws all (r all x) (r some x) on the left"
        x = left.lhs.body
        if not isinstance(right, All):
            return f"{rule_name} withdraws an all-sentence on the right"
        if rule_name == "CASES3":
            ok = isinstance(right.rhs, AllOf) and right.rhs.body == x
            return None if ok else "CASES3 withdraws all y (s all x) on the right"
        return None if right.lhs == x else "CASES2 withdraws all x y on the right"
    return f"unknown discharge rule {rule_name}"


# ---------------------------------------------------------------------------
# checker


@dataclass(frozen=True)
class CheckReport:
    accepted: bool
    reason: str = ""
    path: tuple = ()

    def __bool__(self):
        return self.accepted

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "reason": self.reason, "path": list(self.path)}


class _Reject(Exception):
    def __init__(self, reason, path):
        super().__init__(reason)
        self.reason = reason
        self.path = path


def check_proof(theory, root: ProofNode, rules="Base0") -> CheckReport:
    """Accept iff root is a correct proof from the theory in the rule set.

    Every HYP leaf must be withdrawn by a discharging ancestor; it is bound
    to the nearest one that withdraws that sentence.  Shared subproofs (a
    DAG) are checked once.
    """
    rs = ruleset(rules)
    gamma = theory if isinstance(theory, (set, frozenset)) else frozenset(
        theory.sentences if isinstance(theory, Theory) else theory)
    memo = {}

    def check(node, path):
        key = id(node)
        if key in memo:
            return memo[key]
        free = _check_node(node, path)
        memo[key] = free
        return free

    def _check_node(node, path):
        name = node.rule
        if name == "PREMISE":
            if node.children:
                raise _Reject("PREMISE leaves have no children", path)
            if node.conclusion not in gamma:
                raise _Reject(f"{print_sentence(node.conclusion)} is not in the theory", path)
            return frozenset()
        if name == "HYP":
            if node.children:
                raise _Reject("HYP leaves have no children", path)
            return frozenset({node.conclusion})
        if name not in rs.names:
            raise _Reject(f"rule {name} is not in {rs.name}", path)
        child_free = [check(c, path + (i,)) for i, c in enumerate(node.children)]
        if name in DISCHARGE_RULES:
            why = _discharge_shape(name, node)
            if why:
                raise _Reject(why, path)
            out = set()
            for f, d in zip(child_free, node.discharged):
                out |= f - {d}
            return frozenset(out)
        if name == "CHAINS":
            if not node.children:
                raise _Reject("CHAINS needs a some-sentence premise", path)
            flat = [s for c in node.chains for s in c]
            got = [c.conclusion for c in node.children[1:]]
            if got != flat:
                raise _Reject("CHAINS premises must be the chain sentences in order", path)
            why = check_chains_instance(node.conclusion, node.children[0].conclusion, node.chains)
            if why:
                raise _Reject(why, path)
        elif name in _CLAUSAL_CHECKS:
            why = _CLAUSAL_CHECKS[name](node)
            if why:
                raise _Reject(why, path)
        else:
            tmpl = rs.template(name)
            prem = [c.conclusion for c in node.children]
            if match_instance(tmpl, prem, node.conclusion) is None:
                raise _Reject(f"not an instance of {name}", path)
        out = frozenset()
        for f in child_free:
            out |= f
        return out

    try:
        free = check(root, ())
    except _Reject as e:
        return CheckReport(False, e.reason, e.path)
    if free:
        shown = ", ".join(sorted(print_sentence(s) for s in free))
        return CheckReport(False, f"undischarged hypothesis: {shown}", ())
    return CheckReport(True)
