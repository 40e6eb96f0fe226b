"""Parser for the expression grammar.

    expr     := ['-'] term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' exponent)?
    base     := number | ident | '(' expr ')' | func '(' expr ')'
    func     := sin|cos|sinh|cosh|tanh|exp|log|sqrt
    exponent := integer | '(' integer '/' integer ')'
    number   := integer ('/' integer)?

Whitespace is insignificant.  Identifiers match [a-zA-Z][a-zA-Z0-9_]* and
must be declared; a leading unary minus is accepted as sugar for 0 - term.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .tree import Expr, FUNCTIONS, MINUS_ONE, Rat, Sym, fun, radd, rdiv, rmul, rpow

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|([()^*/+-]))")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class UndeclaredSymbolError(ParseError):
    def __init__(self, name: str, offset: int):
        ParseError.__init__(self, f"undeclared identifier '{name}'", offset)
        self.name = name


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ParseError(f"unexpected character {stripped[0]!r}",
                                 len(text) - len(stripped))
            if m.group(1):
                self.items.append(("int", m.group(1), m.start(1)))
            elif m.group(2):
                self.items.append(("ident", m.group(2), m.start(2)))
            else:
                self.items.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else ("end", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}', found {val!r}", off)


def parse(text: str, declared: set[str] | frozenset[str]) -> Expr:
    """Parse text into an Expr; every identifier must be in `declared`."""
    toks = _Tokens(text)
    e = _expr(toks, declared)
    kind, val, off = toks.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", off)
    return e


def _expr(toks, declared) -> Expr:
    terms = []
    kind, val, _ = toks.peek()
    negate = kind == "op" and val == "-"
    if negate:
        toks.next()
    t = _term(toks, declared)
    terms.append(rmul((MINUS_ONE, t)) if negate else t)
    while True:
        kind, val, _ = toks.peek()
        if kind == "op" and val in "+-":
            toks.next()
            t = _term(toks, declared)
            terms.append(t if val == "+" else rmul((MINUS_ONE, t)))
        else:
            return radd(terms)


def _term(toks, declared) -> Expr:
    e = _factor(toks, declared)
    while True:
        kind, val, _ = toks.peek()
        if kind == "op" and val in "*/":
            toks.next()
            rhs = _factor(toks, declared)
            e = rmul((e, rhs)) if val == "*" else rdiv(e, rhs)
        else:
            return e


def _factor(toks, declared) -> Expr:
    base = _base(toks, declared)
    kind, val, _ = toks.peek()
    if kind == "op" and val == "^":
        toks.next()
        return rpow(base, _exponent(toks))
    return base


def _base(toks, declared) -> Expr:
    kind, val, off = toks.next()
    if kind == "int":
        num = int(val)
        kind2, val2, _ = toks.peek()
        if kind2 == "op" and val2 == "/":
            # lookahead: only fold int/int into a rational literal
            if toks.i + 1 < len(toks.items) and toks.items[toks.i + 1][0] == "int":
                toks.next()
                _, den, doff = toks.next()
                if int(den) == 0:
                    raise ParseError("zero denominator", doff)
                return Rat(Fraction(num, int(den)))
        return Rat(num)
    if kind == "ident":
        if val in FUNCTIONS:
            toks.expect_op("(")
            arg = _expr(toks, declared)
            toks.expect_op(")")
            return fun(val, arg)
        if val not in declared:
            raise UndeclaredSymbolError(val, off)
        return Sym(val)
    if kind == "op" and val == "(":
        e = _expr(toks, declared)
        toks.expect_op(")")
        return e
    raise ParseError(f"unexpected token {val!r}", off)


def _exponent(toks) -> Fraction:
    kind, val, off = toks.next()
    if kind == "int":
        return Fraction(int(val))
    if kind == "op" and val == "-":
        kind2, val2, off2 = toks.next()
        if kind2 != "int":
            raise ParseError("expected integer exponent", off2)
        return Fraction(-int(val2))
    if kind == "op" and val == "(":
        sign = 1
        kind2, val2, off2 = toks.next()
        if kind2 == "op" and val2 == "-":
            sign = -1
            kind2, val2, off2 = toks.next()
        if kind2 != "int":
            raise ParseError("expected integer in exponent", off2)
        num = sign * int(val2)
        kind3, val3, _ = toks.next()
        if kind3 == "op" and val3 == ")":
            return Fraction(num)
        if not (kind3 == "op" and val3 == "/"):
            raise ParseError("expected '/' or ')' in exponent", off2)
        kind4, val4, off4 = toks.next()
        if kind4 != "int" or int(val4) == 0:
            raise ParseError("expected nonzero integer denominator", off4)
        toks.expect_op(")")
        return Fraction(num, int(val4))
    raise ParseError("expected exponent", off)
