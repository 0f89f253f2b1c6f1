"""Translations between the nested-term language with complement and the flat
language with complemented verbs (``~r``) and complemented nouns.

Flat terms are ``p``, ``(not p)``, ``(r all p)``, ``(~r all p)``, ``(r some p)``
and ``(~r some p)``.  Flat sentences reuse ``All``/``Some`` from the syntax
module with flat terms inside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import FragmentError, ParseError
from .semantics import FiniteModel, eval_term
from .syntax import (KEYWORDS, SIGIL, All, AllOf, Noun, Not, Some, SomeOf, print_term,
                     sorted_terms, term_closure, tokenize)


@dataclass(frozen=True)
class NounBar:
    noun: str

    def __str__(self):
        return f"(not {self.noun})"


@dataclass(frozen=True)
class AllOfLit:
    verb: str
    noun: str
    bar: bool = False

    def __str__(self):
        return f"({'~' if self.bar else ''}{self.verb} all {self.noun})"


@dataclass(frozen=True)
class SomeOfLit:
    verb: str
    noun: str
    bar: bool = False

    def __str__(self):
        return f"({'~' if self.bar else ''}{self.verb} some {self.noun})"


RStarTerm = Union[Noun, NounBar, AllOfLit, SomeOfLit]


def print_rstar_term(t) -> str:
    return t.name if isinstance(t, Noun) else str(t)


def print_rstar_sentence(s) -> str:
    kind = "all" if isinstance(s, All) else "some"
    return f"{kind} {print_rstar_term(s.lhs)} {print_rstar_term(s.rhs)}"


def rstar_vocabulary(sentences) -> tuple:
    nouns, verbs = set(), set()
    for s in sentences:
        for t in (s.lhs, s.rhs):
            nouns.add(t.name if isinstance(t, Noun) else t.noun)
            if isinstance(t, (AllOfLit, SomeOfLit)):
                verbs.add(t.verb)
    return frozenset(nouns), frozenset(verbs)


# ---------------------------------------------------------------------------
# parsing


def _ident(tok, allow_reserved: bool) -> str:
    if tok is None or tok.text in KEYWORDS or not (tok.text[0].isalpha() or tok.text[0] == "_"
                                                   or (allow_reserved and tok.text[0] == SIGIL)):
        where = (tok.line, tok.col) if tok is not None else (1, 1)
        raise ParseError(f"expected an identifier, found {tok.text if tok else 'end of line'!r}",
                         *where)
    return tok.text


def _rterm(toks, i: int, allow_reserved: bool):
    if i >= len(toks):
        raise ParseError("expected a term", 1, 1)
    if toks[i].text != "(":
        return Noun(_ident(toks[i], allow_reserved)), i + 1
    j = i + 1
    if j < len(toks) and toks[j].text == "not":
        name = _ident(toks[j + 1] if j + 1 < len(toks) else None, allow_reserved)
        k = j + 2
        if k >= len(toks) or toks[k].text != ")":
            raise ParseError("flat terms complement nouns only: (not p)", toks[i].line, toks[i].col)
        return NounBar(name), k + 1
    bar = j < len(toks) and toks[j].text == "~"
    if bar:
        j += 1
    verb = _ident(toks[j] if j < len(toks) else None, allow_reserved)
    q = toks[j + 1] if j + 1 < len(toks) else None
    if q is None or q.text not in ("all", "some"):
        raise ParseError("expected 'all' or 'some'", toks[i].line, toks[i].col)
    noun = _ident(toks[j + 2] if j + 2 < len(toks) else None, allow_reserved)
    end = toks[j + 3] if j + 3 < len(toks) else None
    if end is None or end.text != ")":
        raise ParseError("flat terms have a noun inside: (r all p)", toks[i].line, toks[i].col)
    cls = AllOfLit if q.text == "all" else SomeOfLit
    return cls(verb, noun, bar), j + 4


def parse_rstar_sentence(text: str, line: int = 1, allow_reserved: bool = False):
    toks = tokenize(text, line, allow_reserved=allow_reserved)
    if not toks or toks[0].text not in ("all", "some"):
        raise ParseError("a flat sentence starts with 'all' or 'some'", line, 1)
    a, i = _rterm(toks, 1, allow_reserved)
    b, i = _rterm(toks, i, allow_reserved)
    if i != len(toks):
        raise ParseError(f"trailing input {toks[i].text!r}", toks[i].line, toks[i].col)
    return All(a, b) if toks[0].text == "all" else Some(a, b)


def parse_rstar_theory(text: str, allow_reserved: bool = True) -> list:
    """Sentences of a flat theory file; ``nouns:``/``verbs:`` headers are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = tokenize(raw, lineno, allow_reserved=allow_reserved)
        if not toks or toks[0].text in ("nouns", "verbs"):
            continue
        out.append(parse_rstar_sentence(raw, lineno, allow_reserved))
    return out


# ---------------------------------------------------------------------------
# semantics


def eval_rstar(m: FiniteModel, t) -> frozenset:
    """Denotation of a flat term; complemented verbs denote the complement relation."""
    dom = frozenset(m.domain)
    if isinstance(t, Noun):
        return m.nouns[t.name]
    if isinstance(t, NounBar):
        return dom - m.nouns[t.noun]
    ext = m.nouns[t.noun]
    succ = m.successors[t.verb]
    out = set()
    for a in m.domain:
        s = succ[a]
        if t.bar:
            s = dom - s
        if isinstance(t, AllOfLit):
            if ext <= s:
                out.add(a)
        elif not s.isdisjoint(ext):
            out.add(a)
    return frozenset(out)


def satisfies_rstar(m: FiniteModel, s) -> bool:
    a, b = eval_rstar(m, s.lhs), eval_rstar(m, s.rhs)
    return a <= b if isinstance(s, All) else not a.isdisjoint(b)


def is_rstar_countermodel(m: FiniteModel, gamma, phi) -> bool:
    return all(satisfies_rstar(m, s) for s in gamma) and not satisfies_rstar(m, phi)


# ---------------------------------------------------------------------------
# star translation


def star_term(t):
    """The nested term with the same denotation in every model."""
    if isinstance(t, Noun):
        return t
    if isinstance(t, NounBar):
        return Not(Noun(t.noun))
    body = Noun(t.noun)
    if isinstance(t, AllOfLit):
        return Not(SomeOf(t.verb, body)) if t.bar else AllOf(t.verb, body)
    if isinstance(t, SomeOfLit):
        return Not(AllOf(t.verb, body)) if t.bar else SomeOf(t.verb, body)
    raise TypeError(f"not a flat term: {t!r}")


def star_translate(s):
    """(~r all x) becomes (not (r some x)); (~r some x) becomes (not (r all x))."""
    return type(s)(star_term(s.lhs), star_term(s.rhs))


# ---------------------------------------------------------------------------
# flattening


def fresh_name(t) -> str:
    """Deterministic reserved noun for a term: the sigil plus the printed tokens."""
    toks = tokenize(print_term(t))
    return SIGIL + ".".join({"(": "0", ")": "1"}.get(k.text, k.text) for k in toks)


def _check_source(s) -> None:
    if not isinstance(s, (All, Some)):
        raise FragmentError(f"flattening handles all/some sentences, not {s}")


def _delta1(t, x) -> list:
    """The two bridging sentences that pin x(t) to the denotation of t."""
    xt = Noun(x[t])
    if isinstance(t, Noun):
        rhs = t
    elif isinstance(t, AllOf):
        rhs = AllOfLit(t.verb, x[t.body])
    elif isinstance(t, SomeOf):
        rhs = SomeOfLit(t.verb, x[t.body])
    else:
        u = t.body
        if isinstance(u, Noun):
            rhs = NounBar(u.name)
        elif isinstance(u, AllOf):
            rhs = SomeOfLit(u.verb, x[u.body], bar=True)
        elif isinstance(u, SomeOf):
            rhs = AllOfLit(u.verb, x[u.body], bar=True)
        else:
            rhs = Noun(x[u.body])
    return [All(xt, rhs), All(rhs, xt)]


def flatten(gamma, phi) -> tuple:
    """(Gamma*, phi*, name map) with one fresh noun per term of Gamma ∪ {phi}."""
    sentences = list(getattr(gamma, "sentences", gamma))
    for s in sentences + [phi]:
        _check_source(s)
    T = sorted_terms(term_closure(sentences + [phi]))
    x = {t: fresh_name(t) for t in T}
    delta1 = []
    for t in T:
        for s in _delta1(t, x):
            if s not in delta1:
                delta1.append(s)
    rename = lambda s: type(s)(Noun(x[s.lhs]), Noun(x[s.rhs]))  # noqa: E731
    delta2 = []
    for s in sentences:
        r = rename(s)
        if r not in delta1 and r not in delta2:
            delta2.append(r)
    return delta1 + delta2, rename(phi), x


def expand_model(m: FiniteModel, name_map: dict) -> FiniteModel:
    """m with each fresh noun interpreted as the denotation of its term."""
    nouns = dict(m.nouns)
    memo = {}
    for t, name in name_map.items():
        nouns[name] = eval_term(m, t, memo)
    return FiniteModel(m.domain, nouns, m.verbs)


def name_map_to_json(name_map: dict) -> dict:
    return {name: print_term(t) for t, name in sorted(name_map.items(), key=lambda kv: kv[1])}

