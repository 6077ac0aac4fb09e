"""Precedence-climbing parser for the expression grammar.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?            # right associative
    atom   := INTEGER | IDENT | '(' expr ')'

``p/q`` rational literals fall out of integer division.  Exponents must
evaluate to nonnegative integer constants.
"""

from __future__ import annotations

import re
from typing import Iterable, List, NamedTuple

from ..errors import ExprError
from .rational import RationalExpr

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()−]))")


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    end = len(text)
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            bad = len(text) - len(text[pos:].lstrip())
            raise ExprError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tok = m.group(kind)
        if tok == "−":
            tok = "-"
        tokens.append(Token(kind, tok, m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, chart: Iterable[str]):
        self.text = text
        self.chart = set(chart)
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.take()
        if tok.text != text:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ExprError(f"expected {text!r}, found {what}", tok.pos)

    def parse(self) -> RationalExpr:
        if self.peek().kind == "end":
            raise ExprError("empty expression", 0)
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprError(f"unexpected {tok.text!r}", tok.pos)
        return value

    def expr(self) -> RationalExpr:
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalExpr:
        value = self.unary()
        while self.peek().text in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok.text == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ExprError("division by the zero polynomial", tok.pos)
                value = value / rhs
        return value

    def unary(self) -> RationalExpr:
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return -self.unary()
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RationalExpr:
        base = self.atom()
        if self.peek().text == "^":
            tok = self.take()
            exponent = self.unary()
            if not exponent.is_constant():
                raise ExprError("exponent must be a constant", tok.pos)
            k = exponent.constant_value()
            if k.denominator != 1:
                raise ExprError(f"non-integer exponent {k}", tok.pos)
            if k < 0:
                raise ExprError(f"negative exponent {k}", tok.pos)
            try:
                return base ** int(k)
            except OverflowError as exc:
                raise ExprError(str(exc), tok.pos) from None
        return base

    def atom(self) -> RationalExpr:
        tok = self.take()
        if tok.kind == "num":
            return RationalExpr.const(int(tok.text))
        if tok.kind == "id":
            if tok.text not in self.chart:
                raise ExprError(f"unknown identifier {tok.text!r}", tok.pos)
            return RationalExpr.var(tok.text)
        if tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprError(f"unexpected {what}", tok.pos)


def parse_expr(text: str, chart: Iterable[str]) -> RationalExpr:
    """Parse ``text`` into an exact rational function over the names in ``chart``."""
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            return RationalExpr.const(text)
        raise ExprError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text, chart).parse()
