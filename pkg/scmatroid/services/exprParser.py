"""
Recursive-descent parser for matrix entries.

Grammar (whitespace is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | IDENT | "(" expr ")"

``^`` binds tighter than unary minus, which binds tighter than ``*`` and ``/``.
``9/2`` is a ratio literal simply because ``/`` is exact. There is no implicit
multiplication, no function call and no floating-point literal.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

from scmatroid.services.errors import (
    ExprSyntaxError,
    SourcePosition,
    UnknownIdentifierError,
    ZeroDivisorError,
)
from scmatroid.services.symbolicCore import ParamSpace, RationalFunction

logger = logging.getLogger(__name__)

_OPERATORS = "+-*/^()"
_DIGITS = "0123456789"
MAX_NESTING = 100


@dataclass(frozen=True)
class SourceOrigin:
    file: Optional[str] = None
    field: Optional[str] = None
    line: int = 1
    column: int = 1


@dataclass(frozen=True)
class ExprSource:
    text: str
    origin: SourceOrigin = SourceOrigin()

    def position(self, offset: int) -> SourcePosition:
        """Map an offset inside ``text`` to a file position."""
        before = self.text[:offset]
        newlines = before.count("\n")
        if newlines:
            column = offset - before.rfind("\n")
        else:
            column = self.origin.column + offset
        return SourcePosition(self.origin.file, self.origin.field, self.origin.line + newlines, column)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", an operator character, or "end"
    text: str
    offset: int


def _ident_start(c: str) -> bool:
    return c.isascii() and (c.isalpha() or c == "_")


def tokenize(src: ExprSource) -> List[Token]:
    text = src.text
    tokens: List[Token] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in _DIGITS:
            start = i
            while i < len(text) and text[i] in _DIGITS:
                i += 1
            if i < len(text) and (text[i].isalpha() or text[i] in "_."):
                raise ExprSyntaxError(f"unexpected character {text[i]!r} after number",
                                      src.position(i), ("operator", ")"))
            tokens.append(Token("int", text[start:i], start))
        elif _ident_start(c):
            start = i
            while i < len(text) and (_ident_start(text[i]) or text[i] in _DIGITS):
                i += 1
            tokens.append(Token("ident", text[start:i], start))
        elif c in _OPERATORS:
            tokens.append(Token(c, c, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {c!r}", src.position(i))
    tokens.append(Token("end", "", len(text)))
    return tokens


class Parser:
    def __init__(self, src: ExprSource, space: ParamSpace):
        self.src = src
        self.space = space
        self._tokens = tokenize(src)
        self._index = 0
        self._depth = 0

    @property
    def token(self) -> Token:
        return self._tokens[self._index]

    def advance(self) -> Token:
        token = self.token
        self._index += 1
        return token

    def _nest(self, token: Token) -> None:
        self._depth += 1
        if self._depth > MAX_NESTING:
            raise ExprSyntaxError(f"expression nested deeper than {MAX_NESTING} levels",
                                  self.src.position(token.offset))

    def _fail(self, expected) -> ExprSyntaxError:
        token = self.token
        found = "end of input" if token.kind == "end" else repr(token.text)
        return ExprSyntaxError(f"unexpected {found}", self.src.position(token.offset), expected)

    def parse(self) -> RationalFunction:
        value = self.expr()
        if self.token.kind != "end":
            raise self._fail(("+", "-", "*", "/", "^", "end of input"))
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.token.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.unary()
        while self.token.kind in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.kind == "*":
                value = value * rhs
            elif rhs.is_zero:
                raise ZeroDivisorError("division by an expression that is identically zero",
                                       self.src.position(op.offset))
            else:
                value = value / rhs
        return value

    def unary(self) -> RationalFunction:
        if self.token.kind == "-":
            self._nest(self.advance())
            value = -self.unary()
            self._depth -= 1
            return value
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.token.kind == "^":
            self.advance()
            if self.token.kind != "int":
                raise self._fail(("integer exponent",))
            base = base ** int(self.advance().text)
        return base

    def atom(self) -> RationalFunction:
        token = self.token
        if token.kind == "int":
            self.advance()
            return RationalFunction(self.space.constant(int(token.text)))
        if token.kind == "ident":
            if not self.space.declares(token.text):
                raise UnknownIdentifierError(token.text, self.src.position(token.offset))
            self.advance()
            return RationalFunction(self.space.var(token.text))
        if token.kind == "(":
            self._nest(self.advance())
            value = self.expr()
            if self.token.kind != ")":
                raise self._fail((")",))
            self.advance()
            self._depth -= 1
            return value
        raise self._fail(("integer", "identifier", "(", "-"))


def parse_expr(src, space: ParamSpace) -> RationalFunction:
    if isinstance(src, str):
        src = ExprSource(src)
    logger.debug("parsing %r", src.text)
    return Parser(src, space).parse()


def render(x: RationalFunction) -> str:
    return x.render()
