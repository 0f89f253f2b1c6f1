"""Audits: per-rule soundness fuzzing and the verdict round-trip harness."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .deciders import NO, YES, Verdict, check_verdict, verdict_from_json
from .proofs import RULESETS, RuleTemplate, check_chains_instance, instantiate, rel_results, resolvents
from .semantics import random_model, satisfies
from .syntax import (All, AllOf, EmptyMeet, NonemptyMeet, Not, Some, SomeOf)
from .corpus import random_term

NOUNS = ("p", "q", "s")
VERBS = ("r", "u")
_CTORS = (AllOf, SomeOf, Not)


@dataclass
class FuzzReport:
    rule: str
    trials: int = 0
    attempts: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def all_rule_names() -> list:
    return sorted({n for rs in RULESETS.values() for n in rs.names})


def _template(name: str):
    for rs in RULESETS.values():
        t = rs.template(name)
        if t is not None:
            return t
    return None


def _term(rng, depth=2):
    return random_term(rng, NOUNS, VERBS, depth, _CTORS)


def _template_instance(rng, tmpl):
    subst = {v: _term(rng) for v in tmpl.term_vars}
    for r in tmpl.verb_vars:
        subst["^" + r] = rng.choice(VERBS)
    return [instantiate(p, subst) for p in tmpl.premises], instantiate(tmpl.conclusion, subst)


def _clause(rng, lo=1, hi=3):
    return frozenset(_term(rng, 1) for _ in range(rng.randint(lo, hi)))


def _cases_assumptions(rng, name):
    x, y, r, s = _term(rng), _term(rng), rng.choice(VERBS), rng.choice(VERBS)
    if name == "CASES":
        return Some(x, x), All(y, AllOf(r, x))
    if name == "CASES1":
        return Some(x, x), All(x, y)
    head = All(AllOf(r, x), SomeOf(r, x))
    return head, (All(y, AllOf(s, x)) if name == "CASES3" else All(x, y))


def _chains_instance(rng):
    """A valid CHAINS instance: (some a b, chains, some x y) or None."""
    a, b, x, y, t, u = (_term(rng, 1) for _ in range(6))
    r = rng.choice(VERBS)
    link = [[All(t, x)], [All(t, y)]]
    main = [All(a, u), All(AllOf(r, t), x)] if rng.random() < 0.5 else [All(a, x)]
    chains = link + [main, [All(b, y)]]
    if rng.random() < 0.5:
        chains = [main, [All(b, y)]] if len(main) == 1 else chains
    some, concl = Some(a, b), Some(x, y)
    if check_chains_instance(concl, some, chains) is not None:
        return None
    return some, chains, concl


def _instance(rng, name, m, memo):
    """(premises hold, conclusion holds, description) for one random instance, or None."""
    sat = lambda s: satisfies(m, s, memo)  # noqa: E731
    tmpl = name if isinstance(name, RuleTemplate) else _template(name)
    if tmpl is not None:
        prem, concl = _template_instance(rng, tmpl)
        return all(sat(p) for p in prem), sat(concl), (prem, concl)
    if name in ("CASES", "CASES1", "CASES2", "CASES3"):
        left, right = _cases_assumptions(rng, name)
        c = All(_term(rng), _term(rng)) if rng.random() < 0.5 else Some(_term(rng), _term(rng))
        held = (not sat(left) or sat(c)) and (not sat(right) or sat(c))
        return held, sat(c), (left, right, c)
    if name == "RAA":
        xs, ys = _clause(rng), _clause(rng)
        held = not sat(EmptyMeet(xs)) or (sat(NonemptyMeet(ys)) and sat(EmptyMeet(ys)))
        return held, sat(NonemptyMeet(xs)), (xs, ys)
    if name == "EFQ":
        ys, zs = _clause(rng), _clause(rng)
        held = sat(NonemptyMeet(ys)) and sat(EmptyMeet(ys))
        return held, sat(EmptyMeet(zs)), (ys, zs)
    if name == "CLAXIOM":
        x = _term(rng)
        return True, sat(EmptyMeet([x, Not(x)])), (x,)
    if name == "STRUCTURAL":
        c = _clause(rng)
        d = c | _clause(rng, 0, 2)
        return sat(EmptyMeet(c)), sat(EmptyMeet(d)), (c, d)
    if name == "RES":
        x = _term(rng, 1)
        c1, c2 = _clause(rng, 0, 2) | {x}, _clause(rng, 0, 2) | {Not(x)}
        out = [res for piv, res in resolvents(c1, c2) if piv == x]
        if not out:
            return None
        prem = (EmptyMeet(c1), EmptyMeet(c2))
        return all(sat(p) for p in prem), sat(EmptyMeet(out[0])), (c1, c2, out[0])
    if name == "REL":
        rest = frozenset(Not(_term(rng, 1)) for _ in range(rng.randint(0, 2)))
        lits = rest | {_term(rng, 1)}
        r = rng.choice(VERBS)
        outs = rel_results(lits, r)
        if not outs:
            return None
        concl = rng.choice(outs)
        return sat(EmptyMeet(lits)), sat(EmptyMeet(concl)), (lits, r, concl)
    if name == "CHAINS":
        inst = _chains_instance(rng)
        if inst is None:
            return None
        some, chains, concl = inst
        prem = [some] + [s for c in chains for s in c]
        return all(sat(p) for p in prem), sat(concl), (prem, concl)
    raise ValueError(f"no fuzzer for rule {name}")


def fuzz_rule(name, trials: int = 1000, seed: int = 0, max_attempts: int = 0,
              max_domain: int = 3) -> FuzzReport:
    """Sample (model, instance) pairs until `trials` of them have true premises.

    `name` is a rule name or a RuleTemplate.
    A violation is a pair with true premises and a false conclusion.  EFQ's
    premises are never jointly true, so its attempts all count as vacuous
    trials once no model makes both hold.
    """
    label = getattr(name, "name", name)
    rng = random.Random(f"{label}:{seed}")
    rep = FuzzReport(label)
    max_attempts = max_attempts or 400 * trials
    while rep.trials < trials and rep.attempts < max_attempts:
        rep.attempts += 1
        m = random_model(NOUNS, VERBS, max_domain, rng.random(), min_domain=0)
        got = _instance(rng, name, m, {})
        if got is None:
            continue
        held, concl, desc = got
        if name == "EFQ":
            if held:
                rep.violations.append((m, desc))
            rep.trials += 1
            continue
        if held:
            rep.trials += 1
            if not concl:
                rep.violations.append((m, desc))
    return rep


# ---------------------------------------------------------------------------
# round trip


def round_trip(gamma, phi, verdict: Verdict) -> tuple:
    """(ok, reason): the verdict survives JSON and its certificate still checks."""
    data = json.loads(json.dumps(verdict.to_json(), default=str))
    back = verdict_from_json(data)
    if back.answer != verdict.answer:
        return False, "answer changed in transit"
    if verdict.answer in (YES, NO):
        rep = check_verdict(gamma, phi, back)
        if not rep.accepted:
            return False, rep.reason
    return True, ""
