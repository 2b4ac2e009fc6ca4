"""AST, parser and printer for grade-0 projected multivector products.

Grammar (whitespace separates tokens)::

    expr    := '0' | [sign] term (sign term)*
    term    := [number ['*']] '<' factor+ '>0'
    factor  := atom | '[' factor ',' factor ']'
    atom    := 'F' | 'F~' | 'O' | 'O~' | 'e^' idx | 'd_' idx | 'W_' idx | 'w_' idx
             | 'd3x' | 'S' | 'S~' | 'R' | 'R~' | 'dS_' idx+ | 'dS~_' idx+
             | 'I' | 'eps^' idx | '1'
    idx     := one digit or lower-case letter, optionally followed by a prime

Commutators expand into two terms. ``d_k`` binds to the atom on its right
(derivatives may chain); ``dS_k`` is the derivative of the rotor symbol.
``I`` is the unit pseudoscalar, ``eps^n`` an infinitesimal scalar
displacement field, ``R`` the rotor realigning the basis after a coordinate
rotation and ``1`` the unit scalar.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterator


class Tag(enum.Enum):
    COVARIANT_FIELD = "covariant-field"
    REFERENCE = "reference-element"
    CONNECTION = "connection"
    COVARIANT_CONNECTION = "covariant-connection"
    DERIVATIVE = "derivative"
    VOLUME = "volume-element"
    ROTOR = "rotor"
    GRADE_COMMUTING = "grade-commuting"


CENTRAL_TAGS = (Tag.VOLUME, Tag.GRADE_COMMUTING)
CONSTANT_SYMBOLS = ("e", "I", "d3x")


@dataclass(frozen=True)
class Factor:
    symbol: str
    tag: Tag
    index: str | None = None
    rev: bool = False
    derivs: tuple[str, ...] = ()

    @property
    def is_rotor(self) -> bool:
        return self.tag is Tag.ROTOR

    @property
    def is_plain_rotor(self) -> bool:
        return self.tag is Tag.ROTOR and not self.derivs

    def text(self) -> str:
        t = "~" if self.rev else ""
        if self.tag is Tag.ROTOR:
            if self.derivs:
                return f"d{self.symbol}{t}_{''.join(self.derivs)}"
            return self.symbol + t
        if self.symbol in ("e", "eps"):
            return f"{self.symbol}{t}^{self.index}"
        if self.index is not None:
            return f"{self.symbol}{t}_{self.index}"
        return self.symbol + t

    def pretty(self) -> str:
        """Display form using a dagger for the reverse."""
        return self.text().replace("~", "†")

    def __str__(self) -> str:
        return self.text()


def field_(symbol: str, rev: bool = False) -> Factor:
    return Factor(symbol, Tag.COVARIANT_FIELD, rev=rev)


def ref(index: str) -> Factor:
    return Factor("e", Tag.REFERENCE, index)


def deriv(index: str) -> Factor:
    return Factor("d", Tag.DERIVATIVE, index)


def connection(index: str, rev: bool = False) -> Factor:
    return Factor("W", Tag.CONNECTION, index, rev)


def cov_connection(index: str, rev: bool = False) -> Factor:
    return Factor("w", Tag.COVARIANT_CONNECTION, index, rev)


def rotor(rev: bool = False, derivs: tuple[str, ...] = (), symbol: str = "S") -> Factor:
    return Factor(symbol, Tag.ROTOR, rev=rev, derivs=tuple(derivs))


VOLUME = Factor("d3x", Tag.VOLUME)
PSEUDOSCALAR = Factor("I", Tag.GRADE_COMMUTING)


def displacement(index: str) -> Factor:
    return Factor("eps", Tag.GRADE_COMMUTING, index)


def units(factors: tuple[Factor, ...]) -> list[tuple[Factor, ...]]:
    """Group derivative leaves with the atom they act on."""
    out: list[tuple[Factor, ...]] = []
    pending: list[Factor] = []
    for f in factors:
        pending.append(f)
        if f.tag is not Tag.DERIVATIVE:
            out.append(tuple(pending))
            pending = []
    if pending:
        raise ValueError("derivative without an operand")
    return out


def is_central(unit: tuple[Factor, ...]) -> bool:
    return unit[-1].tag in CENTRAL_TAGS


def reverse_unit(unit: tuple[Factor, ...]) -> tuple[float, tuple[Factor, ...]]:
    """Reverse of a single unit: sign and the reversed unit.

    Vectors and scalars are self-reverse, grade-2 connections and the
    grade-3 elements change sign, general fields and rotors carry a mark.
    """
    *ds, atom = unit
    if atom.symbol in ("e", "eps"):
        return 1.0, unit
    if atom.symbol in ("I", "d3x", "W", "w") and not atom.rev:
        return -1.0, unit
    flipped = Factor(atom.symbol, atom.tag, atom.index, not atom.rev, atom.derivs)
    return 1.0, tuple(ds) + (flipped,)


def reverse_word(word: tuple[Factor, ...]) -> tuple[float, tuple[Factor, ...]]:
    sign = 1.0
    out: list[Factor] = []
    for u in reversed(units(word)):
        s, ru = reverse_unit(u)
        sign *= s
        out.extend(ru)
    return sign, tuple(out)


@dataclass(frozen=True)
class Term:
    weight: float
    factors: tuple[Factor, ...]

    @property
    def has_derivative(self) -> bool:
        return any(f.tag is Tag.DERIVATIVE for f in self.factors)

    def units(self) -> list[tuple[Factor, ...]]:
        return units(self.factors)

    def reverse(self) -> Term:
        s, w = reverse_word(self.factors)
        return Term(self.weight * s, w)

    def body(self) -> str:
        if not self.factors:
            return "<1>0"
        return "<" + " ".join(f.text() for f in self.factors) + ">0"


@dataclass(frozen=True)
class GaExpr:
    """Weighted sum of grade-0 projected products."""

    terms: tuple[Term, ...] = field(default_factory=tuple)

    @property
    def fixed_order(self) -> bool:
        """A right-acting derivative anywhere pins the order of every term."""
        return any(t.has_derivative for t in self.terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return pretty(self)


def _fmt_weight(w: float) -> str:
    w = abs(w)
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


def pretty(e: GaExpr) -> str:
    """Render in the DSL; ``parse(pretty(e)) == e`` for every parsed ``e``."""
    if not e.terms:
        return "0"
    parts = []
    for i, t in enumerate(e.terms):
        sign = "-" if t.weight < 0 else "+"
        coef = "" if abs(t.weight) == 1 else _fmt_weight(t.weight)
        body = coef + t.body()
        if i == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


# --------------------------------------------------------------------------- #
# parsing
# --------------------------------------------------------------------------- #


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = "") -> None:
        super().__init__(f"{message} at column {position + 1}")
        self.message = message
        self.position = position
        self.text = text


_IDX = r"[0-9a-z]'?"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<close>>0)
  | (?P<open><)
  | (?P<d3x>d3x)
  | (?P<drotor>d(?P<drs>[SR])(?P<drrev>~?)_(?P<dridx>(?:{_IDX})+))
  | (?P<deriv>d_(?P<didx>{_IDX}))
  | (?P<eps>eps\^(?P<pidx>{_IDX}))
  | (?P<ref>e\^(?P<eidx>{_IDX}))
  | (?P<conn>(?P<csym>[Ww])(?P<crev>~?)_(?P<cidx>{_IDX}))
  | (?P<field>(?P<fsym>[FO])(?P<frev>~?))
  | (?P<rotor>(?P<rsym>[SR])(?P<rrev>~?))
  | (?P<pseudo>I)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<plus>\+)
  | (?P<minus>-)
  | (?P<star>\*)
  | (?P<lbrack>\[)
  | (?P<rbrack>\])
  | (?P<comma>,)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int
    factor: Factor | None = None


def _split_indices(s: str) -> tuple[str, ...]:
    return tuple(re.findall(_IDX, s))


def tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        # lastgroup reports the innermost named group; map back to the outer one
        for outer in ("drotor", "deriv", "eps", "ref", "conn", "field", "rotor"):
            if m.group(outer) is not None:
                kind = outer
                break
        pos_end = m.end()
        if kind != "ws":
            tok = _Tok(kind, m.group(0), pos)
            g = m.groupdict()
            if kind == "d3x":
                tok.factor = VOLUME
            elif kind == "drotor":
                tok.factor = rotor(bool(g["drrev"]), _split_indices(g["dridx"]), g["drs"])
            elif kind == "deriv":
                tok.factor = deriv(g["didx"])
            elif kind == "eps":
                tok.factor = displacement(g["pidx"])
            elif kind == "ref":
                tok.factor = ref(g["eidx"])
            elif kind == "conn":
                maker = connection if g["csym"] == "W" else cov_connection
                tok.factor = maker(g["cidx"], bool(g["crev"]))
            elif kind == "field":
                tok.factor = field_(g["fsym"], bool(g["frev"]))
            elif kind == "rotor":
                tok.factor = rotor(bool(g["rrev"]), symbol=g["rsym"])
            elif kind == "pseudo":
                tok.factor = PSEUDOSCALAR
            toks.append(tok)
        pos = pos_end
    return toks


Alternatives = list[tuple[float, tuple[Factor, ...]]]


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str, tok: _Tok | None = None) -> DSLSyntaxError:
        pos = tok.pos if tok is not None else len(self.text)
        return DSLSyntaxError(msg, pos, self.text)

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            want = {"close": "'>0'", "open": "'<'", "comma": "','", "rbrack": "']'"}.get(kind, kind)
            got = "end of input" if tok is None else repr(tok.text)
            raise self.error(f"expected {want}, found {got}", tok)
        self.i += 1
        return tok

    def parse(self) -> GaExpr:
        tok = self.peek()
        if tok is not None and tok.kind == "num" and tok.text == "0" and len(self.toks) == 1:
            return GaExpr(())
        terms: list[Term] = []
        sign = 1.0
        first = True
        while True:
            tok = self.peek()
            if tok is None:
                if first:
                    raise self.error("empty expression")
                raise self.error("expected a term after the sign")
            if tok.kind in ("plus", "minus"):
                sign = -1.0 if tok.kind == "minus" else 1.0
                self.i += 1
            elif not first:
                raise self.error(f"expected '+' or '-', found {tok.text!r}", tok)
            terms.extend(self.term(sign))
            first = False
            sign = 1.0
            if self.peek() is None:
                break
        return GaExpr(tuple(terms))

    def term(self, sign: float) -> list[Term]:
        weight = sign
        tok = self.peek()
        if tok is not None and tok.kind == "num":
            weight *= float(tok.text)
            self.i += 1
            if self.peek() is not None and self.peek().kind == "star":
                self.i += 1
        self.take("open")
        items: list[Alternatives] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise self.error("unterminated term, expected '>0'")
            if tok.kind == "close":
                break
            items.append(self.factor())
        close = self.take("close")
        if not items:
            raise self.error("a term needs at least one factor", close)
        return [Term(weight * w, word) for w, word in _expand(items)]

    def factor(self) -> Alternatives:
        tok = self.peek()
        if tok.kind == "num" and tok.text == "1":
            self.i += 1
            return [(1.0, ())]
        if tok.kind == "lbrack":
            self.i += 1
            left = self.factor()
            self.take("comma")
            right = self.factor()
            self.take("rbrack")
            return _expand([left, right]) + [(-w, word) for w, word in _expand([right, left])]
        if tok.factor is None:
            raise self.error(f"unexpected {tok.text!r}", tok)
        self.i += 1
        if tok.kind == "deriv":
            nxt = self.peek()
            if nxt is None or nxt.kind == "close":
                raise self.error("derivative must act on a factor to its right", tok)
            if nxt.kind == "lbrack" or nxt.factor is None:
                raise self.error("derivative must be followed by a single factor", nxt)
            (w, word), = self.factor()
            if not word:
                raise self.error("derivative of the unit scalar", tok)
            if len(word) == 1 and word[0].is_rotor:
                head = word[0]
                return [(w, (rotor(head.rev, (tok.factor.index,) + head.derivs, head.symbol),))]
            return [(w, (tok.factor,) + word)]
        return [(1.0, (tok.factor,))]


def _expand(items: list[Alternatives]) -> Alternatives:
    out: Alternatives = []
    for combo in cartesian(*items):
        w = 1.0
        word: tuple[Factor, ...] = ()
        for cw, cword in combo:
            w *= cw
            word += cword
        out.append((w, word))
    return out


def parse(text: str) -> GaExpr:
    """Parse one DSL expression; raises :class:`DSLSyntaxError` with a column."""
    return _Parser(text).parse()


def parse_lines(text: str) -> list[tuple[int, str, GaExpr]]:
    """Parse a file body: one expression per line, ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append((lineno, line, parse(line)))
        except DSLSyntaxError as exc:
            exc.lineno = lineno
            raise
    return out
