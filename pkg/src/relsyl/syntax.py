"""Terms, sentences and theories: abstract syntax, text grammar, fragments.

The concrete grammar is line based::

    # comment
    nouns: p q
    verbs: r
    all p (r all q)
    some p (r some (not q))
    all p q or some p p
    [ p (not q) ]
    < p q >

Terms are ``ID``, ``(ID all T)``, ``(ID some T)`` or ``(not T)``.
"""

from __future__ import annotations

import enum
import functools
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError

KEYWORDS = frozenset({"all", "some", "not", "or", "nouns", "verbs"})
# Generated names (flattening) start with this sigil; users may not write it.
SIGIL = "@"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED_IDENT = re.compile(r"@[A-Za-z0-9_.]+")


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, eq=True)
class Noun:
    name: str
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("N", self.name)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, eq=True)
class AllOf:
    verb: str
    body: "Term"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("A", self.verb, self.body)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, eq=True)
class SomeOf:
    verb: str
    body: "Term"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("S", self.verb, self.body)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, eq=True)
class Not:
    body: "Term"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("~", self.body)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_term(self)


Term = Union[Noun, AllOf, SomeOf, Not]


# ---------------------------------------------------------------------------
# sentences


@dataclass(frozen=True, eq=True)
class All:
    lhs: Term
    rhs: Term
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("all", self.lhs, self.rhs)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_sentence(self)


@dataclass(frozen=True, eq=True)
class Some:
    lhs: Term
    rhs: Term
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("some", self.lhs, self.rhs)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_sentence(self)


@dataclass(frozen=True, eq=True)
class AllOrSome:
    """``all a b or some x y``."""

    a: Term
    b: Term
    x: Term
    y: Term
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("aos", self.a, self.b, self.x, self.y)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_sentence(self)


@dataclass(frozen=True, eq=True)
class EmptyMeet:
    """``[ x1 ... xn ]``: the denotations have empty intersection."""

    terms: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("EmptyMeet needs at least one term")
        object.__setattr__(self, "_hash", hash(("[]", self.terms)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_sentence(self)


@dataclass(frozen=True, eq=True)
class NonemptyMeet:
    """``< x1 ... xn >``: the denotations have a common element."""

    terms: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("NonemptyMeet needs at least one term")
        object.__setattr__(self, "_hash", hash(("<>", self.terms)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return print_sentence(self)


Sentence = Union[All, Some, AllOrSome, EmptyMeet, NonemptyMeet]


def sentence_terms(s) -> tuple:
    """The top-level terms of a sentence, in argument order."""
    if isinstance(s, (All, Some)):
        return (s.lhs, s.rhs)
    if isinstance(s, AllOrSome):
        return (s.a, s.b, s.x, s.y)
    if isinstance(s, (EmptyMeet, NonemptyMeet)):
        return s.terms
    raise TypeError(f"not a sentence: {s!r}")


# ---------------------------------------------------------------------------
# printing


@functools.lru_cache(maxsize=1 << 16)
def print_term(t) -> str:
    if isinstance(t, Noun):
        return t.name
    if isinstance(t, AllOf):
        return f"({t.verb} all {print_term(t.body)})"
    if isinstance(t, SomeOf):
        return f"({t.verb} some {print_term(t.body)})"
    if isinstance(t, Not):
        return f"(not {print_term(t.body)})"
    raise TypeError(f"not a term: {t!r}")


def print_sentence(s) -> str:
    if isinstance(s, All):
        return f"all {print_term(s.lhs)} {print_term(s.rhs)}"
    if isinstance(s, Some):
        return f"some {print_term(s.lhs)} {print_term(s.rhs)}"
    if isinstance(s, AllOrSome):
        return (f"all {print_term(s.a)} {print_term(s.b)} "
                f"or some {print_term(s.x)} {print_term(s.y)}")
    if isinstance(s, EmptyMeet):
        return "[ " + " ".join(print_term(t) for t in s.terms) + " ]"
    if isinstance(s, NonemptyMeet):
        return "< " + " ".join(print_term(t) for t in s.terms) + " >"
    raise TypeError(f"not a sentence: {s!r}")


def term_key(t) -> str:
    """Canonical total order on terms: lexicographic on the printed form."""
    return print_term(t)


def sorted_terms(terms: Iterable) -> list:
    return sorted(terms, key=print_term)


def sentence_key(s) -> str:
    return print_sentence(s)


# ---------------------------------------------------------------------------
# structure


def subterms(t) -> Iterator:
    """Yield t and all of its subterms (with repetition)."""
    yield t
    while not isinstance(t, Noun):
        t = t.body
        yield t


def term_depth(t) -> int:
    d = 0
    while not isinstance(t, Noun):
        t = t.body
        d += 1
    return d


def sentence_depth(s) -> int:
    return max(term_depth(t) for t in sentence_terms(s))


def term_nouns(t) -> str:
    while not isinstance(t, Noun):
        t = t.body
    return t.name


def term_verbs(t) -> set:
    out = set()
    while not isinstance(t, Noun):
        if isinstance(t, (AllOf, SomeOf)):
            out.add(t.verb)
        t = t.body
    return out


def vocabulary(sentences: Iterable) -> tuple:
    """(nouns, verbs) occurring in the sentences."""
    nouns, verbs = set(), set()
    for s in sentences:
        for t in sentence_terms(s):
            nouns.add(term_nouns(t))
            verbs |= term_verbs(t)
    return frozenset(nouns), frozenset(verbs)


def term_closure(sentences: Iterable) -> frozenset:
    """T(Delta): all subterms of all terms occurring in the sentences."""
    out = set()
    for s in sentences:
        for t in sentence_terms(s):
            for u in subterms(t):
                if u in out:
                    break
                out.add(u)
    return frozenset(out)


def term_closure_plus(sentences: Iterable, with_some: bool = False) -> frozenset:
    """T+(Delta): T(Delta) plus (r all w) for w in T(Delta), r a verb of Delta.

    With ``with_some`` the terms (r some w) are added as well.
    """
    sentences = list(sentences)
    base = term_closure(sentences)
    _, verbs = vocabulary(sentences)
    out = set(base)
    for w in base:
        for r in verbs:
            out.add(AllOf(r, w))
            if with_some:
                out.add(SomeOf(r, w))
    return frozenset(out)


# ---------------------------------------------------------------------------
# fragments


class Fragment(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    L2Plus = "L2Plus"
    L3 = "L3"
    L3Half = "L3Half"
    L4 = "L4"
    L4Half = "L4Half"
    L4Plus = "L4Plus"
    L4HalfPlus = "L4HalfPlus"
    L5 = "L5"
    L5Half = "L5Half"
    RStarDagger = "RStarDagger"

    @property
    def features(self) -> frozenset:
        return _FEATURES[self]

    def __le__(self, other: "Fragment") -> bool:
        if not isinstance(other, Fragment):
            return NotImplemented
        if self is other:
            return True
        if Fragment.RStarDagger in (self, other):
            return False
        return self.features <= other.features

    def __lt__(self, other: "Fragment") -> bool:
        return self != other and self <= other


# S: some-sentences, E: (r some x), N: (not x), D: four-place disjunction,
# B: [ ... ], P: < ... >
_FEATURES = {
    Fragment.L1: frozenset(),
    Fragment.L2: frozenset("S"),
    Fragment.L2Plus: frozenset("SD"),
    Fragment.L3: frozenset("E"),
    Fragment.L3Half: frozenset("ES"),
    Fragment.L4: frozenset("N"),
    Fragment.L4Half: frozenset("NS"),
    Fragment.L4Plus: frozenset("NB"),
    Fragment.L4HalfPlus: frozenset("NSBP"),
    Fragment.L5: frozenset("EN"),
    Fragment.L5Half: frozenset("ENS"),
    Fragment.RStarDagger: frozenset(),
}


def _term_features(t, out: set) -> None:
    for u in subterms(t):
        if isinstance(u, SomeOf):
            out.add("E")
        elif isinstance(u, Not):
            out.add("N")


def sentence_features(s) -> frozenset:
    out = set()
    if isinstance(s, Some):
        out.add("S")
    elif isinstance(s, AllOrSome):
        out.add("D")
    elif isinstance(s, EmptyMeet):
        out.add("B")
    elif isinstance(s, NonemptyMeet):
        out.add("P")
    for t in sentence_terms(s):
        _term_features(t, out)
    return frozenset(out)


def fragment_of(sentences: Iterable) -> Fragment:
    """The least fragment containing all the sentences."""
    feats = set()
    for s in sentences:
        feats |= sentence_features(s)
    candidates = [f for f in Fragment if f is not Fragment.RStarDagger
                  and feats <= f.features]
    if not candidates:
        raise ValueError(f"no fragment has features {sorted(feats)}")
    least = [f for f in candidates if all(f <= g for g in candidates)]
    assert len(least) == 1, least
    return least[0]


# ---------------------------------------------------------------------------
# theories


@dataclass(frozen=True)
class Theory:
    """An ordered, duplicate-free list of sentences with its vocabulary."""

    nouns: frozenset
    verbs: frozenset
    sentences: tuple

    def __post_init__(self):
        object.__setattr__(self, "nouns", frozenset(self.nouns))
        object.__setattr__(self, "verbs", frozenset(self.verbs))
        seen, kept = set(), []
        for s in self.sentences:
            if s in seen:
                warnings.warn(f"duplicate sentence dropped: {print_sentence(s)}")
                continue
            seen.add(s)
            kept.append(s)
        object.__setattr__(self, "sentences", tuple(kept))
        nouns, verbs = vocabulary(kept)
        if not nouns <= self.nouns or not verbs <= self.verbs:
            missing = sorted((nouns - self.nouns) | (verbs - self.verbs))
            raise ValueError(f"undeclared identifiers: {missing}")
        if self.nouns & self.verbs:
            raise ValueError(f"identifiers used as noun and verb: {sorted(self.nouns & self.verbs)}")

    @classmethod
    def of(cls, sentences: Iterable, nouns: Iterable = (), verbs: Iterable = ()) -> "Theory":
        """Build a theory whose vocabulary is inferred from the sentences."""
        sentences = list(sentences)
        n, v = vocabulary(sentences)
        return cls(n | set(nouns), v | set(verbs), tuple(sentences))

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)

    def __contains__(self, s):
        return s in self._set

    @functools.cached_property
    def _set(self) -> frozenset:
        return frozenset(self.sentences)

    def extend(self, sentences: Iterable) -> "Theory":
        """A theory with extra sentences appended (duplicates skipped silently)."""
        extra = [s for s in sentences if s not in self]
        extra = list(dict.fromkeys(extra))
        n, v = vocabulary(extra)
        return Theory(self.nouns | n, self.verbs | v, self.sentences + tuple(extra))

    @property
    def fragment(self) -> Fragment:
        return fragment_of(self.sentences)


def print_theory(theory: Theory, header: bool = True) -> str:
    lines = []
    if header:
        lines.append("nouns: " + " ".join(sorted(theory.nouns)))
        lines.append("verbs: " + " ".join(sorted(theory.verbs)))
    lines.extend(print_sentence(s) for s in theory.sentences)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

_PUNCT = "()[]<>:~"


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, allow_reserved: bool = False) -> list:
    """Split one line of text into tokens, tracking columns."""
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            break
        if ch in _PUNCT:
            out.append(Token(ch, line, i + 1))
            i += 1
            continue
        m = _IDENT.match(text, i)
        if m is None and allow_reserved:
            m = _RESERVED_IDENT.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {ch!r}", line, i + 1)
        out.append(Token(m.group(), line, i + 1))
        i = m.end()
    return out


class _Parser:
    """Recursive-descent parser over the tokens of one line."""

    def __init__(self, tokens: Sequence[Token], line: int, nouns=None, verbs=None,
                 eol_col: int = 1):
        self.toks = list(tokens)
        self.pos = 0
        self.line = line
        self.nouns = nouns
        self.verbs = verbs
        self.eol_col = eol_col
        self.seen_nouns = set()
        self.seen_verbs = set()

    def peek(self, k: int = 0):
        j = self.pos + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        if tok is None:
            raise ParseError(msg + " (at end of line)", self.line, self.eol_col)
        raise ParseError(msg, tok.line, tok.col)

    def take(self, expected=None) -> Token:
        tok = self.peek()
        if tok is None:
            self.error(f"expected {expected!r}" if expected else "unexpected end of line")
        if expected is not None and tok.text != expected:
            self.error(f"expected {expected!r}, found {tok.text!r}", tok)
        self.pos += 1
        return tok

    def ident(self, role: str) -> str:
        tok = self.take()
        if tok.text in KEYWORDS or tok.text in _PUNCT:
            self.error(f"expected a {role} identifier, found {tok.text!r}", tok)
        declared = self.nouns if role == "noun" else self.verbs
        other = self.verbs if role == "noun" else self.nouns
        if declared is not None and tok.text not in declared:
            if other is not None and tok.text in other:
                self.error(f"{tok.text!r} is declared as a {'verb' if role == 'noun' else 'noun'}", tok)
            self.error(f"undeclared {role} {tok.text!r}", tok)
        (self.seen_nouns if role == "noun" else self.seen_verbs).add(tok.text)
        return tok.text

    def term(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        if tok.text != "(":
            return Noun(self.ident("noun"))
        self.take("(")
        nxt = self.peek()
        if nxt is not None and nxt.text == "not":
            self.take("not")
            body = self.term()
            self.take(")")
            return Not(body)
        verb = self.ident("verb")
        q = self.take()
        if q.text not in ("all", "some"):
            self.error(f"expected 'all' or 'some', found {q.text!r}", q)
        body = self.term()
        self.take(")")
        return AllOf(verb, body) if q.text == "all" else SomeOf(verb, body)

    def meet_terms(self, close: str) -> list:
        terms = []
        while True:
            tok = self.peek()
            if tok is None:
                self.error(f"expected {close!r}")
            if tok.text == close:
                self.take(close)
                break
            terms.append(self.term())
        if not terms:
            self.error("bracket sentence needs at least one term")
        return terms

    def sentence(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a sentence")
        if tok.text == "all":
            self.take()
            a, b = self.term(), self.term()
            if self.peek() is not None and self.peek().text == "or":
                self.take("or")
                self.take("some")
                x, y = self.term(), self.term()
                s = AllOrSome(a, b, x, y)
            else:
                s = All(a, b)
        elif tok.text == "some":
            self.take()
            s = Some(self.term(), self.term())
        elif tok.text == "[":
            self.take()
            s = EmptyMeet(tuple(self.meet_terms("]")))
        elif tok.text == "<":
            self.take()
            s = NonemptyMeet(tuple(self.meet_terms(">")))
        else:
            self.error(f"a sentence starts with 'all', 'some', '[' or '<', found {tok.text!r}")
        if self.peek() is not None:
            self.error(f"trailing input {self.peek().text!r}")
        return s


def parse_term(text: str, nouns=None, verbs=None, allow_reserved: bool = False):
    toks = tokenize(text, allow_reserved=allow_reserved)
    p = _Parser(toks, 1, nouns, verbs, eol_col=len(text) + 1)
    t = p.term()
    if p.peek() is not None:
        p.error(f"trailing input {p.peek().text!r}")
    return t


def parse_sentence(text: str, nouns=None, verbs=None, allow_reserved: bool = False):
    """Parse one sentence.  With no vocabulary given, identifiers are inferred."""
    toks = tokenize(text, allow_reserved=allow_reserved)
    return _Parser(toks, 1, nouns, verbs, eol_col=len(text) + 1).sentence()


def parse_theory(text: str, allow_reserved: bool = False, infer: bool = False) -> Theory:
    """Parse a theory file.

    Identifiers must be declared in ``nouns:``/``verbs:`` headers before use,
    unless ``infer`` is set, in which case undeclared identifiers are added
    to the vocabulary according to their grammatical position.
    """
    nouns, verbs = set(), set()
    sentences = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = tokenize(raw, lineno, allow_reserved=allow_reserved)
        if not toks:
            continue
        if toks[0].text in ("nouns", "verbs"):
            if len(toks) < 2 or toks[1].text != ":":
                raise ParseError("expected ':' after header keyword", lineno,
                                 toks[1].col if len(toks) > 1 else len(raw) + 1)
            target = nouns if toks[0].text == "nouns" else verbs
            other = verbs if toks[0].text == "nouns" else nouns
            for tok in toks[2:]:
                if tok.text in KEYWORDS or tok.text in _PUNCT:
                    raise ParseError(f"bad identifier {tok.text!r}", tok.line, tok.col)
                if tok.text in other:
                    raise ParseError(f"{tok.text!r} declared as both noun and verb", tok.line, tok.col)
                target.add(tok.text)
            continue
        if infer:
            p = _Parser(toks, lineno, None, None, eol_col=len(raw) + 1)
        else:
            p = _Parser(toks, lineno, nouns, verbs, eol_col=len(raw) + 1)
        s = p.sentence()
        if infer:
            nouns |= p.seen_nouns
            verbs |= p.seen_verbs
            if nouns & verbs:
                raise ParseError(f"identifier used as noun and verb: {sorted(nouns & verbs)}", lineno, 1)
        sentences.append(s)
    return Theory(frozenset(nouns), frozenset(verbs), tuple(sentences))


def goal_comment(text: str):
    """The sentence text of a ``# goal: ...`` comment line, if any."""
    for raw in text.splitlines():
        m = re.match(r"\s*#\s*goal:\s*(.+?)\s*$", raw)
        if m:
            return m.group(1)
    return None
