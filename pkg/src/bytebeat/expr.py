"""Lexing, parsing and formatting of the bytebeat expression language.

The language is a small C expression subset: integer and float literals,
the single free variable ``t``, unary ``~``/``-``/``(int)``, the usual
binary operator ladder from ``*`` down to ``|``, and the ternary
conditional.  No assignments, no function calls, no other identifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class TokenKind(Enum):
    INT = "int-literal"
    FLOAT = "float-literal"
    VAR_T = "ident-t"
    OP = "operator"
    PUNCT = "punct"
    CAST_INT = "cast-int"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    pos: int


class ParseError(Exception):
    """Lexical or syntactic failure, carrying the source byte offset."""

    def __init__(self, pos: int, expected: str, found: str):
        self.pos = pos
        self.expected = expected
        self.found = found
        shown = found if found else "end of input"
        super().__init__(f"expected {expected}, found {shown!r} at offset {pos}")


# Binary operators from lowest to highest precedence; each tuple is one
# left-associative level.  Unary and ternary are handled separately.
BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
)

BINARY_OPS = frozenset(op for level in BINARY_LEVELS for op in level)

# Longest-match-first operator alphabet.
_MULTI_OPS = ("<<", ">>", "<=", ">=", "==", "!=")
_SINGLE_OPS = "~*/%+-<>&^|?:"

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_HEX_RE = re.compile(r"0[xX][0-9A-Fa-f]+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_CAST_RE = re.compile(r"\(\s*int\s*\)")


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; raises ParseError on a foreign character."""
    tokens: list[Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        m = _CAST_RE.match(source, i)
        if m:
            tokens.append(Token(TokenKind.CAST_INT, m.group(), i))
            i = m.end()
            continue
        if ch in "()":
            tokens.append(Token(TokenKind.PUNCT, ch, i))
            i += 1
            continue
        m = _HEX_RE.match(source, i)
        if m:
            tokens.append(Token(TokenKind.INT, m.group(), i))
            i = m.end()
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER_RE.match(source, i)
            assert m is not None
            text = m.group()
            kind = TokenKind.FLOAT if ("." in text or "e" in text or "E" in text) else TokenKind.INT
            tokens.append(Token(kind, text, i))
            i = m.end()
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            if m.group() == "t":
                tokens.append(Token(TokenKind.VAR_T, "t", i))
                i = m.end()
                continue
            raise ParseError(i, "the variable t", m.group())
        two = source[i : i + 2]
        if two in _MULTI_OPS:
            tokens.append(Token(TokenKind.OP, two, i))
            i += 2
            continue
        if ch in _SINGLE_OPS:
            tokens.append(Token(TokenKind.OP, ch, i))
            i += 1
            continue
        raise ParseError(i, "a token", ch)
    return tokens


# ── AST ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class VarT:
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True, slots=True, eq=False)
class Const:
    # int vs float literals are distinct even when numerically equal,
    # so equality must compare the value's type as well.
    value: int | float
    pos: int = field(default=0, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Const):
            return NotImplemented
        return type(self.value) is type(other.value) and self.value == other.value

    def __hash__(self) -> int:
        return hash((type(self.value), self.value))


@dataclass(frozen=True, slots=True)
class Unary:
    op: str  # "~" | "neg" | "cast"
    child: Expr
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: Expr
    right: Expr
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Ternary:
    cond: Expr
    then: Expr
    other: Expr
    pos: int = field(default=0, compare=False, repr=False)


Expr = VarT | Const | Unary | Binary | Ternary


class _Parser:
    def __init__(self, source: str, tokens: list[Token]):
        self.source = source
        self.tokens = tokens
        self.i = 0

    def _peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _error(self, expected: str) -> ParseError:
        tok = self._peek()
        if tok is None:
            return ParseError(len(self.source), expected, "")
        return ParseError(tok.pos, expected, tok.text)

    def _take_op(self, ops: tuple[str, ...]) -> Token | None:
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.OP and tok.text in ops:
            self.i += 1
            return tok
        return None

    def parse(self) -> Expr:
        e = self.ternary()
        if self.i != len(self.tokens):
            raise self._error("end of expression")
        return e

    def ternary(self) -> Expr:
        cond = self.binary(0)
        tok = self._take_op(("?",))
        if tok is None:
            return cond
        then = self.ternary()
        if self._take_op((":",)) is None:
            raise self._error("':'")
        other = self.ternary()
        return Ternary(cond, then, other, pos=tok.pos)

    def binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while True:
            tok = self._take_op(BINARY_LEVELS[level])
            if tok is None:
                return left
            right = self.binary(level + 1)
            left = Binary(tok.text, left, right, pos=tok.pos)

    def unary(self) -> Expr:
        tok = self._peek()
        if tok is None:
            raise self._error("an expression")
        if tok.kind is TokenKind.CAST_INT:
            self.i += 1
            return Unary("cast", self.unary(), pos=tok.pos)
        if tok.kind is TokenKind.OP and tok.text in ("~", "-"):
            self.i += 1
            op = "~" if tok.text == "~" else "neg"
            return Unary(op, self.unary(), pos=tok.pos)
        return self.primary()

    def primary(self) -> Expr:
        tok = self._peek()
        if tok is None:
            raise self._error("an expression")
        if tok.kind is TokenKind.VAR_T:
            self.i += 1
            return VarT(pos=tok.pos)
        if tok.kind is TokenKind.INT:
            self.i += 1
            return Const(int(tok.text, 0), pos=tok.pos)
        if tok.kind is TokenKind.FLOAT:
            self.i += 1
            return Const(float(tok.text), pos=tok.pos)
        if tok.kind is TokenKind.PUNCT and tok.text == "(":
            self.i += 1
            e = self.ternary()
            close = self._peek()
            if close is None or close.text != ")":
                raise self._error("')'")
            self.i += 1
            return e
        raise self._error("an expression")


def parse(source: str) -> Expr:
    """Parse source text to an AST; raises ParseError with the offset."""
    return _Parser(source, tokenize(source)).parse()


# ── Formatting ───────────────────────────────────────────────────────

# Precedence ranks used when deciding where parentheses are required.
# Atoms sit above unary; the ternary is the floor.
_TERNARY_PREC = 0
_UNARY_PREC = 1 + len(BINARY_LEVELS)
_ATOM_PREC = _UNARY_PREC + 1

_BINARY_PREC = {
    op: 1 + level for level, ops in enumerate(BINARY_LEVELS) for op in ops
}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _BINARY_PREC[e.op]
    if isinstance(e, Ternary):
        return _TERNARY_PREC
    if isinstance(e, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def _fmt(e: Expr, min_prec: int) -> str:
    if isinstance(e, VarT):
        return "t"
    if isinstance(e, Const):
        return repr(e.value) if isinstance(e.value, float) else str(e.value)
    if isinstance(e, Unary):
        sym = {"~": "~", "neg": "-", "cast": "(int)"}[e.op]
        text = sym + _fmt(e.child, _UNARY_PREC)
    elif isinstance(e, Binary):
        p = _BINARY_PREC[e.op]
        text = _fmt(e.left, p) + e.op + _fmt(e.right, p + 1)
    else:
        # The ? and : delimit the middle branch, so it never needs parens;
        # a ternary in else-position is the right-associative reading.
        text = (
            _fmt(e.cond, _TERNARY_PREC + 1)
            + "?"
            + _fmt(e.then, _TERNARY_PREC)
            + ":"
            + _fmt(e.other, _TERNARY_PREC)
        )
    if _prec(e) < min_prec:
        return "(" + text + ")"
    return text


def format_expr(e: Expr) -> str:
    """Render an AST back to source with only the parentheses the
    precedence table forces; reparsing yields a structurally equal tree."""
    return _fmt(e, _TERNARY_PREC)
