"""Certifying consequence deciders for L1, L2/L2+, L3 and L3.5.

Every YES carries a proof object (a ``ProofNode`` or a ``CaseCertificate``)
and every NO carries a finite countermodel that has been model-checked
before it is returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import BudgetError, FragmentError, InternalError
from .proofs import (CheckReport, ProofNode, check_proof, proof_from_json,
                     proof_to_json, ruleset)
from .saturation import (SentenceUniverse, Saturator, extract_proof, g1,
                         g2plus, saturate)
from .semantics import FiniteModel, is_countermodel, model_from_json, model_to_json, sat_model
from .syntax import (All, AllOf, AllOrSome, Fragment, Noun, Some, SomeOf, Theory, fragment_of,
                     parse_sentence, print_sentence, print_term, sorted_terms, term_closure,
                     vocabulary)

YES, NO, UNKNOWN = "yes", "no", "unknown"
NONEMPTY, EMPTY = "nonempty", "empty"
DEFAULT_BRANCH_CAP = 1 << 16


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    """A three-valued answer with its certificate.

    ``rules`` names the rule set a proof certificate is checked against.
    ``premises``/``goal`` are set when the certificate speaks about a
    translated problem (the clausal embedding) rather than the input.
    """

    answer: str
    certificate: object = None
    stats: dict = field(default_factory=dict)
    rules: str = ""
    premises: Optional[tuple] = None
    goal: object = None

    def to_json(self) -> dict:
        out = {"answer": self.answer, "certificate": certificate_to_json(self.certificate, self.rules),
               "stats": dict(self.stats)}
        if self.premises is not None:
            out["premises"] = [print_sentence(s) for s in self.premises]
        if self.goal is not None:
            out["goal"] = print_sentence(self.goal)
        return out


def certificate_to_json(cert, rules: str = "") -> Optional[dict]:
    if cert is None:
        return None
    if isinstance(cert, ProofNode):
        return {"kind": "proof", "rules": rules, "proof": proof_to_json(cert)}
    if isinstance(cert, FiniteModel):
        return {"kind": "model", "model": model_to_json(cert)}
    if isinstance(cert, CaseCertificate):
        return cert.to_json()
    raise TypeError(f"not a certificate: {cert!r}")


def certificate_from_json(data: Optional[dict], allow_reserved: bool = False):
    if data is None:
        return None
    kind = data["kind"]
    if kind == "proof":
        return proof_from_json(data["proof"], allow_reserved)
    if kind == "model":
        return model_from_json(data["model"])
    if kind == "cases":
        return CaseCertificate.from_json(data)
    raise ValueError(f"unknown certificate kind {kind!r}")


def verdict_from_json(data: dict) -> Verdict:
    cert_data = data.get("certificate")
    cert = certificate_from_json(cert_data)
    rules = cert_data.get("rules", "") if cert_data else ""
    premises = data.get("premises")
    goal = data.get("goal")
    return Verdict(data["answer"], cert, dict(data.get("stats", {})), rules,
                   None if premises is None else tuple(parse_sentence(s) for s in premises),
                   None if goal is None else parse_sentence(goal))


def _sentences(gamma) -> list:
    return list(gamma.sentences) if isinstance(gamma, Theory) else list(gamma)


def _vocab(gamma, phi) -> tuple:
    nouns, verbs = vocabulary(_sentences(gamma) + [phi])
    if isinstance(gamma, Theory):
        nouns, verbs = nouns | gamma.nouns, verbs | gamma.verbs
    return sorted(nouns), sorted(verbs)


def _require(gamma, phi, limit: Fragment, goal_kinds: tuple, who: str) -> list:
    sentences = _sentences(gamma)
    frag = fragment_of(sentences + [phi])
    if not frag <= limit:
        raise FragmentError(f"{who} handles {limit.value}; input is in {frag.value}")
    if not isinstance(phi, goal_kinds):
        names = "/".join(k.__name__ for k in goal_kinds)
        raise FragmentError(f"{who} needs a goal of shape {names}")
    return sentences


def _checked(model: FiniteModel, sentences, phi, who: str) -> FiniteModel:
    if not is_countermodel(model, sentences, phi):
        raise InternalError(f"{who}: canonical countermodel failed its model check")
    return model


def _model(domain, nouns, verbs, noun_ext: dict, verb_ext: dict) -> FiniteModel:
    return FiniteModel(tuple(domain), {p: noun_ext.get(p, ()) for p in nouns},
                       {r: verb_ext.get(r, ()) for r in verbs})


def check_verdict(gamma, phi, verdict: Verdict) -> CheckReport:
    """Independently re-check the certificate a decider returned."""
    sentences = _sentences(gamma)
    if verdict.answer == UNKNOWN:
        ok = verdict.certificate is None and bool(verdict.stats)
        return CheckReport(ok, "" if ok else "UNKNOWN carries its exhausted bounds only")
    cert = verdict.certificate
    if verdict.answer == NO:
        if not isinstance(cert, FiniteModel):
            return CheckReport(False, "NO needs a countermodel")
        ok = is_countermodel(cert, sentences, phi)
        return CheckReport(ok, "" if ok else "model does not refute the goal over the theory")
    if verdict.answer != YES:
        return CheckReport(False, f"unknown answer {verdict.answer!r}")
    premises, goal = sentences, phi
    if verdict.premises is not None:
        from .clausal import embed_problem
        premises, goal = embed_problem(sentences, phi)
        if tuple(premises) != tuple(verdict.premises) or goal != verdict.goal:
            return CheckReport(False, "certificate is about a different translated problem")
    if isinstance(cert, CaseCertificate):
        return check_case_certificate(premises, goal, cert)
    if isinstance(cert, ProofNode):
        if cert.conclusion != goal:
            return CheckReport(False, "proof concludes a different sentence")
        return check_proof(frozenset(premises), cert, verdict.rules)
    return CheckReport(False, "YES needs a proof or a case certificate")


# ---------------------------------------------------------------------------
# L1


def decide_l1(gamma, phi) -> Verdict:
    """Saturate with AXIOM/BARBARA/ANTI over g1(Gamma ∪ {phi})."""
    start = time.perf_counter()
    sentences = _require(gamma, phi, Fragment.L1, (All,), "decide_l1")
    delta = sentences + [phi]
    U = g1(delta)
    res = saturate(sentences, "L1Core", U)
    stats = {"universe": U.bound(), "derived": len(res.derived), "rounds": res.rounds}
    if phi in res:
        stats["elapsed"] = time.perf_counter() - start
        return Verdict(YES, extract_proof(res, phi), stats, "L1Core")
    nouns, verbs = _vocab(gamma, phi)
    T = sorted_terms(term_closure(delta))
    name = {t: print_term(t) for t in T}
    derived = res.derived
    noun_ext = {p: [name[t] for t in T if All(t, Noun(p)) in derived] for p in nouns}
    verb_ext = {r: [(name[t], name[u]) for t in T for u in T if All(t, AllOf(r, u)) in derived]
                for r in verbs}
    model = _checked(_model([name[t] for t in T], nouns, verbs, noun_ext, verb_ext),
                     sentences, phi, "decide_l1")
    stats["elapsed"] = time.perf_counter() - start
    return Verdict(NO, model, stats)


# ---------------------------------------------------------------------------
# pair models and L2+


def _pairs(T: list) -> list:
    return [(T[i], T[j]) for i in range(len(T)) for j in range(i, len(T))]


def _pair_name(t, u) -> str:
    if t == u:
        return "{" + print_term(t) + "}"
    return "{" + print_term(t) + ", " + print_term(u) + "}"


def _pair_model(elements: list, nouns, verbs, in_noun, related) -> FiniteModel:
    """Model over unordered pairs, given membership/relation predicates on terms."""
    name = {e: _pair_name(*e) for e in elements}
    noun_ext = {p: [name[e] for e in elements if in_noun(e[0], p) or in_noun(e[1], p)]
                for p in nouns}
    verb_ext = {}
    for r in verbs:
        rel = []
        for e in elements:
            for f in elements:
                if any(related(c, r, d) for c in e for d in f):
                    rel.append((name[e], name[f]))
        verb_ext[r] = rel
    return _model([name[e] for e in elements], nouns, verbs, noun_ext, verb_ext)


def _plus(T: Iterable, verbs: Iterable) -> frozenset:
    T = frozenset(T)
    return T | frozenset(AllOf(r, w) for w in T for r in verbs)


def base_universe(T: Iterable, verbs: Iterable) -> SentenceUniverse:
    """all u v (u in T, v in T+) and some u v (u, v in T), for the base system."""
    T = frozenset(T)
    Tp = _plus(T, verbs)
    doms = {(All, 0): T, (All, 1): Tp, (Some, 0): T, (Some, 1): T}
    return SentenceUniverse("base", Tp, frozenset(verbs), doms)


def _base_closure(gamma, T, verbs) -> frozenset:
    return saturate(_sentences(gamma), "Base0", base_universe(T, verbs)).derived


def build_pair_model(gamma, T: Iterable, verbs: Optional[Iterable] = None,
                     restricted: bool = False) -> FiniteModel:
    """The first canonical model over unordered pairs of T (or, restricted,
    the pairs {t, u} with some t u derivable), with x <= y read off a base
    system saturation."""
    sentences = _sentences(gamma)
    T = sorted_terms(T)
    nouns, vs = vocabulary(sentences)
    nouns |= {t.name for t in T if isinstance(t, Noun)}
    vs |= {t.verb for t in T if isinstance(t, AllOf)}
    if verbs is not None:
        vs |= set(verbs)
    if isinstance(gamma, Theory):
        nouns, vs = nouns | gamma.nouns, vs | gamma.verbs
    derived = _base_closure(sentences, T, vs)
    elements = [e for e in _pairs(T) if not restricted or Some(e[0], e[1]) in derived]
    return _pair_model(elements, sorted(nouns), sorted(vs),
                       lambda t, p: All(t, Noun(p)) in derived,
                       lambda c, r, d: All(c, AllOf(r, d)) in derived)


def build_pair_model_restricted(gamma, T: Iterable, verbs: Optional[Iterable] = None) -> FiniteModel:
    return build_pair_model(gamma, T, verbs, restricted=True)


def determines_existentials(gamma, T: Iterable, flavor: str = "L2",
                            verbs: Optional[Iterable] = None, slack: int = 1) -> tuple:
    """(holds, witness) for the determines-existentials condition.

    L2: for all r and x, y in T, some x x or all y (r all x) is derivable
    in the base system.  L3: every x in T is effectively empty or
    effectively non-empty under AXIOM/BARBARA/ANTI/R1/MIX.  The witness is
    the first failing (x, y, r), with r None when all x y is what fails.
    """
    sentences = _sentences(gamma)
    T = sorted_terms(T)
    vs = set(vocabulary(sentences)[1]) | set(verbs or ())
    vs = sorted(vs)
    if flavor == "L2":
        derived = _base_closure(sentences, T, vs)
        for x in T:
            if Some(x, x) in derived:
                continue
            for y in T:
                for r in vs:
                    if All(y, AllOf(r, x)) not in derived:
                        return False, (x, y, r)
        return True, None
    if flavor == "L3":
        U = _l3_universe(T, vs, slack)
        derived = saturate(sentences, "L3Rules", U).derived
        for x in T:
            if all(All(AllOf(r, x), SomeOf(r, x)) in derived for r in vs):
                continue
            for y in T:
                if All(x, y) not in derived:
                    return False, (x, y, None)
                for r in vs:
                    if All(y, AllOf(r, x)) not in derived:
                        return False, (x, y, r)
        return True, None
    raise ValueError(f"unknown flavor {flavor!r}")


def _l3_universe(T, verbs, slack: int, some_sentences: bool = False) -> SentenceUniverse:
    from .saturation import extend_terms
    Ts = extend_terms(frozenset(T), frozenset(verbs), slack)
    doms = {(All, 0): Ts, (All, 1): Ts}
    if some_sentences:
        doms.update({(Some, 0): Ts, (Some, 1): Ts})
    return SentenceUniverse(f"branch(d={slack})", Ts, frozenset(verbs), doms)


def _focus_pairs(sentences, x, y) -> set:
    """The disjunct pairs the completeness argument for goal pair (x, y) uses:
    the goal pair, and every (e, f) with e, f among the pair of a disjunctive
    premise."""
    pairs = {(x, y)}
    for s in sentences:
        if isinstance(s, AllOrSome):
            for e in (s.x, s.y):
                for f in (s.x, s.y):
                    pairs.add((e, f))
    return pairs


def decide_l2plus(gamma, phi, full_universe: bool = False) -> Verdict:
    """Saturate with the base rules plus the disjunctive rules.

    For a some/disjunctive goal with pair (x, y) the universe keeps, of the
    disjunctive family, only the pairs the completeness argument needs (see
    ``_focus_pairs``) plus the EMPTY1/EMPTY2 instances; ``full_universe``
    uses all of g2plus instead.  All-goals need only the all-sentences.
    """
    start = time.perf_counter()
    sentences = _require(gamma, phi, Fragment.L2Plus, (All, Some, AllOrSome), "decide_l2plus")
    delta = sentences + [phi]
    nouns, verbs = _vocab(gamma, phi)
    T = sorted_terms(term_closure(delta))
    if isinstance(phi, All):
        U = g1(delta)
    elif full_universe:
        U = g2plus(delta)
    else:
        U = g2plus(delta, focus=_focus_pairs(sentences, phi.x if isinstance(phi, AllOrSome) else phi.lhs,
                                             phi.y if isinstance(phi, AllOrSome) else phi.rhs))
    res = saturate(sentences, "L2PlusRules", U)
    stats = {"universe": U.bound(), "derived": len(res.derived), "rounds": res.rounds}
    if phi in res:
        stats["elapsed"] = time.perf_counter() - start
        return Verdict(YES, extract_proof(res, phi), stats, "L2PlusRules")
    d = res.derived
    if isinstance(phi, All):
        model = _pair_model(_pairs(T), nouns, verbs,
                            lambda t, p: All(t, Noun(p)) in d,
                            lambda c, r, e: All(c, AllOf(r, e)) in d)
    else:
        x, y = (phi.x, phi.y) if isinstance(phi, AllOrSome) else (phi.lhs, phi.rhs)

        def le(t, z):
            return AllOrSome(t, z, x, y) in d

        elements = [(t, u) for t, u in _pairs(T)
                    if any(not le(t, z) and not le(u, z) for z in (x, y))]
        model = _pair_model(elements, nouns, verbs,
                            lambda t, p: le(t, Noun(p)),
                            lambda c, r, e: le(c, AllOf(r, e)))
    model = _checked(model, sentences, phi, "decide_l2plus")
    stats["elapsed"] = time.perf_counter() - start
    return Verdict(NO, model, stats)


# ---------------------------------------------------------------------------
# case certificates (L3, L3.5)


_CASE_RULES = {"L35": "L35Rules", "L3": "L3Rules"}


def package(flavor: str, t, value: str, T: Iterable, verbs: Iterable) -> tuple:
    """The sentences a branch adds for term t.

    Non-empty: some t t (L3.5), or all (r all t) (r some t) per verb (L3).
    Empty (both flavours): all t u and all u (r all t) for u in T.
    """
    T = sorted_terms(T)
    verbs = sorted(verbs)
    if value == NONEMPTY:
        if flavor == "L35":
            return (Some(t, t),)
        return tuple(All(AllOf(r, t), SomeOf(r, t)) for r in verbs)
    out = [All(t, u) for u in T if u != t]
    out += [All(u, AllOf(r, t)) for u in T for r in verbs]
    return tuple(out)


@dataclass(frozen=True)
class CaseBranch:
    assignment: tuple     # ((term, "nonempty" | "empty"), ...), a prefix of the term order
    sentences: tuple      # the packages of the assignment
    proof: ProofNode      # goal from Gamma ∪ sentences


@dataclass(frozen=True)
class CaseCertificate:
    """Branch transcripts: every total assignment of non-empty/empty to the
    terms extends some branch, and each branch proves the goal from the
    theory plus its packages."""

    flavor: str
    terms: tuple
    verbs: tuple
    branches: tuple

    @property
    def rules(self) -> str:
        return _CASE_RULES[self.flavor]

    def to_json(self) -> dict:
        return {
            "kind": "cases", "flavor": self.flavor, "rules": self.rules,
            "terms": [print_term(t) for t in self.terms], "verbs": list(self.verbs),
            "branches": [{"assignment": [[print_term(t), v] for t, v in b.assignment],
                          "sentences": [print_sentence(s) for s in b.sentences],
                          "proof": proof_to_json(b.proof)} for b in self.branches],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CaseCertificate":
        from .syntax import parse_term
        branches = []
        for b in data["branches"]:
            branches.append(CaseBranch(
                tuple((parse_term(t), v) for t, v in b["assignment"]),
                tuple(parse_sentence(s) for s in b["sentences"]),
                proof_from_json(b["proof"])))
        return cls(data["flavor"], tuple(parse_term(t) for t in data["terms"]),
                   tuple(data["verbs"]), tuple(branches))


def _covers(assignments: list, terms: list) -> Optional[dict]:
    """None if every total assignment extends one of the partial ones,
    else an uncovered partial assignment."""
    def go(i, current, live):
        if any(all(current.get(t) == v for t, v in a) for a in live):
            return None
        if i == len(terms):
            return current
        t = terms[i]
        if not any(s == t for a in live for s, _ in a):
            return go(i + 1, current, live)
        for v in (NONEMPTY, EMPTY):
            cur = dict(current)
            cur[t] = v
            keep = [a for a in live if all(cur.get(s, w) == w for s, w in a)]
            miss = go(i + 1, cur, keep)
            if miss is not None:
                return miss
        return None
    return go(0, {}, [tuple(a) for a in assignments])


def check_case_certificate(gamma, phi, cert: CaseCertificate) -> CheckReport:
    if cert.flavor not in _CASE_RULES:
        return CheckReport(False, f"unknown flavor {cert.flavor!r}")
    sentences = frozenset(_sentences(gamma))
    terms = list(cert.terms)
    if len(set(terms)) != len(terms):
        return CheckReport(False, "repeated term in the case split")
    for i, b in enumerate(cert.branches):
        for t, v in b.assignment:
            if t not in cert.terms or v not in (NONEMPTY, EMPTY):
                return CheckReport(False, "assignment outside the split terms", (i,))
        want = tuple(s for t, v in b.assignment for s in package(cert.flavor, t, v, terms, cert.verbs))
        if tuple(b.sentences) != want:
            return CheckReport(False, "branch sentences differ from the assignment's packages", (i,))
        if b.proof.conclusion != phi:
            return CheckReport(False, "branch proof concludes a different sentence", (i,))
        rep = check_proof(sentences | frozenset(want), b.proof, cert.rules)
        if not rep:
            return CheckReport(False, f"branch {i}: {rep.reason}", (i,) + tuple(rep.path))
    miss = _covers([b.assignment for b in cert.branches], terms)
    if miss is not None:
        shown = ", ".join(f"{print_term(t)}={v}" for t, v in miss.items())
        return CheckReport(False, f"assignment not covered: {shown}")
    return CheckReport(True)


def _hyp_leaves(proof: ProofNode, gamma: frozenset) -> ProofNode:
    """Turn PREMISE leaves outside gamma into HYP leaves (DAG preserving)."""
    memo = {}

    def go(n):
        got = memo.get(id(n))
        if got is not None:
            return got
        if n.rule == "PREMISE":
            out = n if n.conclusion in gamma else ProofNode(n.conclusion, "HYP")
        elif not n.children:
            out = n
        else:
            out = ProofNode(n.conclusion, n.rule, tuple(go(c) for c in n.children),
                            n.discharged, n.chains)
        memo[id(n)] = out
        return out
    return go(proof)


def _split_rule(flavor: str, t, e) -> str:
    if flavor == "L35":
        return "CASES1" if e.lhs == t else "CASES"
    return "CASES2" if e.lhs == t else "CASES3"


def assemble_cases_proof(gamma, phi, cert: CaseCertificate) -> ProofNode:
    """One proof tree with discharge rules, equivalent to the certificate.

    For each split term, CASES-style nodes withdraw one sentence of the
    non-empty package on the left and one of the empty package on the
    right, until one package is complete along the path.
    """
    gamma = frozenset(_sentences(gamma))
    terms = list(cert.terms)
    leaves = {tuple(b.assignment): _hyp_leaves(b.proof, gamma) for b in cert.branches}
    prefixes = {key[:k] for key in leaves for k in range(len(key) + 1)}

    def tree(i: int, prefix: tuple) -> ProofNode:
        if prefix in leaves:
            return leaves[prefix]
        if i == len(terms):
            raise ValueError("certificate does not cover the assignment space")
        t = terms[i]
        if (prefix + ((t, NONEMPTY),)) not in prefixes and (prefix + ((t, EMPTY),)) not in prefixes:
            return tree(i + 1, prefix)
        left = tree(i + 1, prefix + ((t, NONEMPTY),))
        right = tree(i + 1, prefix + ((t, EMPTY),))
        N = package(cert.flavor, t, NONEMPTY, terms, cert.verbs)
        E = package(cert.flavor, t, EMPTY, terms, cert.verbs)
        memo = {}

        def node(i, j):
            if i == len(N):
                return left
            if j == len(E):
                return right
            key = (i, j)
            if key not in memo:
                memo[key] = ProofNode(phi, _split_rule(cert.flavor, t, E[j]),
                                      (node(i + 1, j), node(i, j + 1)), (N[i], E[j]))
            return memo[key]
        return node(0, 0)

    return tree(0, ())


def split_order(sentences, phi) -> list:
    """T(Gamma ∪ {phi}) in the order the branch search splits on: the goal's
    subterms first, then the rest, each part in canonical order."""
    head = sorted_terms(term_closure([phi]))
    rest = sorted_terms(term_closure(list(sentences) + [phi]) - frozenset(head))
    return head + rest


class _NeedSlack(Exception):
    pass


def _branch_search(sentences, phi, flavor: str, nouns, verbs_all, slack: int, branch_cap: int):
    delta = sentences + [phi]
    T = split_order(sentences, phi)
    verbs = sorted(vocabulary(delta)[1])
    some = flavor == "L35"
    U = _l3_universe(T, verbs, slack, some_sentences=some)
    rules = ruleset(_CASE_RULES[flavor]).saturation_rules()
    root = Saturator(list(rules), U)
    root.add(sentences)
    branches = []
    stats = {"universe": U.bound(), "slack": slack, "terms": len(T)}
    counter = [0]

    def dfs(i: int, assignment: tuple, added: tuple, sat: Saturator):
        counter[0] += 1
        if counter[0] > branch_cap:
            raise BudgetError(f"more than {branch_cap} branch nodes")
        if phi in sat.derived:
            proof = extract_proof(sat.derived, phi)
            branches.append(CaseBranch(assignment, added, proof))
            return None
        if i == len(T):
            return sat, assignment
        t = T[i]
        pkgs = [package(flavor, t, v, T, verbs) for v in (NONEMPTY, EMPTY)]
        if any(all(s in sat.derived for s in pkg) for pkg in pkgs):
            # t is already settled here: a split would add nothing
            return dfs(i + 1, assignment, added, sat)
        for v, pkg in zip((NONEMPTY, EMPTY), pkgs):
            child = sat.copy()
            child.add(pkg)
            found = dfs(i + 1, assignment + ((t, v),), added + pkg, child)
            if found is not None:
                return found
        return None

    found = dfs(0, (), (), root)
    stats["branch_nodes"] = counter[0]
    stats["branches"] = len(branches)
    if found is None:
        cert = CaseCertificate(flavor, tuple(T), tuple(verbs), tuple(branches))
        return Verdict(YES, cert, stats, cert.rules)
    open_branch, open_assignment = found
    d = open_branch.derived
    if flavor == "L35":
        elements = [(x, y, q) for x in T for y in T if Some(x, y) in d for q in ("A", "E")]
        name = {e: f"<{print_term(e[0])}, {print_term(e[1])}, {e[2]}>" for e in elements}

        def rel(e, r, f):
            for z1 in (e[0], e[1]):
                for z2 in (f[0], f[1]):
                    if All(z1, AllOf(r, z2)) in d:
                        return True
                    if f[2] == "E" and f[0] == f[1] and All(z1, SomeOf(r, z2)) in d:
                        return True
            return False
        noun_ext = {p: [name[e] for e in elements
                        if All(e[0], Noun(p)) in d or All(e[1], Noun(p)) in d] for p in nouns}
    else:
        live = [x for x in T if all(All(AllOf(r, x), SomeOf(r, x)) in d for r in verbs)]
        elements = [(x, q) for x in live for q in ("A", "E")]
        name = {e: f"<{print_term(e[0])}, {e[1]}>" for e in elements}

        def rel(e, r, f):
            return (All(e[0], AllOf(r, f[0])) in d
                    or (f[1] == "E" and All(e[0], SomeOf(r, f[0])) in d))
        noun_ext = {p: [name[e] for e in elements if All(e[0], Noun(p)) in d] for p in nouns}
    verb_ext = {r: [(name[e], name[f]) for e in elements for f in elements if rel(e, r, f)]
                for r in verbs_all}
    model = _model([name[e] for e in elements], nouns, verbs_all, noun_ext, verb_ext)
    if not is_countermodel(model, sentences, phi):
        raise _NeedSlack()
    stats["open_branch"] = [[print_term(t), v] for t, v in open_assignment]
    return Verdict(NO, model, stats)


def probe_countermodel(sentences, phi, max_size: int, nouns=None, verbs=None):
    """The smallest countermodel of size <= max_size found by SAT, or None."""
    for size in range(max_size + 1):
        m = sat_model(sentences, [phi], size, nouns, verbs)
        if m is not None and is_countermodel(m, sentences, phi):
            return m
    return None


def _decide_branching(gamma, phi, flavor, slack, max_slack, branch_cap, probe) -> Verdict:
    start = time.perf_counter()
    sentences = _sentences(gamma)
    nouns, verbs = _vocab(gamma, phi)
    if probe > 0:
        # a small model is a complete certificate and avoids the case split
        m = probe_countermodel(sentences, phi, probe, nouns, verbs)
        if m is not None:
            stats = {"probe": probe, "model_size": m.size, "elapsed": time.perf_counter() - start}
            return Verdict(NO, m, stats)
    for d in range(slack, max_slack + 1):
        try:
            v = _branch_search(sentences, phi, flavor, nouns, verbs, d, branch_cap)
        except _NeedSlack:
            continue
        v.stats["elapsed"] = time.perf_counter() - start
        return v
    raise InternalError(f"canonical countermodel failed its model check up to slack {max_slack}")


def decide_l35(gamma, phi, slack: int = 1, max_slack: int = 3,
               branch_cap: int = DEFAULT_BRANCH_CAP, probe: int = 0) -> Verdict:
    """Split every term of T(Gamma ∪ {phi}) into non-empty/empty and
    saturate each branch with the base rules plus R1-R3.

    With ``probe`` > 0, SAT countermodels up to that size are tried first.
    """
    _require(gamma, phi, Fragment.L3Half, (All, Some), "decide_l35")
    return _decide_branching(gamma, phi, "L35", slack, max_slack, branch_cap, probe)


def decide_l3(gamma, phi, slack: int = 1, max_slack: int = 3,
              branch_cap: int = DEFAULT_BRANCH_CAP, probe: int = 0) -> Verdict:
    """As decide_l35 with the L3 packages and AXIOM/BARBARA/ANTI/R1/MIX.

    Without verbs there is nothing to split on and L1 saturation decides.
    """
    sentences = _require(gamma, phi, Fragment.L3, (All,), "decide_l3")
    if not vocabulary(sentences + [phi])[1]:
        return decide_l1(gamma, phi)
    return _decide_branching(gamma, phi, "L3", slack, max_slack, branch_cap, probe)


# ---------------------------------------------------------------------------
# dispatch


def decide(gamma, phi, fragment: Optional[Fragment] = None, **config) -> Verdict:
    """Pick the decider for the least fragment containing the problem.

    An explicit ``fragment`` must contain the problem; it then selects the
    decider.  ``config`` is passed through to the chosen decider.
    """
    from . import clausal
    sentences = _sentences(gamma)
    found = fragment_of(sentences + [phi])
    if fragment is not None:
        if not found <= fragment:
            raise FragmentError(f"problem is in {found.value}, not inside {fragment.value}")
        found = fragment
    if found is Fragment.L1:
        return decide_l1(gamma, phi, **config)
    if found in (Fragment.L2, Fragment.L2Plus):
        return decide_l2plus(gamma, phi, **config)
    if found is Fragment.L3:
        return decide_l3(gamma, phi, **config)
    if found is Fragment.L3Half:
        return decide_l35(gamma, phi, **config)
    if found in (Fragment.L4, Fragment.L4Half, Fragment.L4Plus, Fragment.L4HalfPlus):
        return clausal.decide_clausal(gamma, phi, **config)
    if found in (Fragment.L5, Fragment.L5Half):
        return clausal.decide_l5(gamma, phi, **config)
    raise FragmentError(f"no decider for {found.value}")
