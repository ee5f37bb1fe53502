"""Recursive-descent parser for the expression DSL.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | base ('^' factor)?
    base   := number | symbol | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | tan | exp | log | sqrt | sinh | cosh

Numbers are decimals (``0.25``, ``1e-3``) or integer ratios ``p/q``; both
become exact rationals.  ``p/q`` needs no special token: integer division
folds to the same constant, and exponents must be parenthesized
(``x^(1/2)``), so ``x^1/2`` means ``(x^1)/2``.  Exponents must reduce to
rational constants.
"""
from __future__ import annotations

import re
from fractions import Fraction

from . import expr as E

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


class ParseError(SyntaxError):
    """Syntax error carrying the UTF-8 byte offset and the expected tokens."""

    def __init__(self, message: str, offset: int, expected=()):
        self.byte_offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")


class UnknownFunctionError(ParseError):
    pass


def _tokenize(src: str):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", len(src[:pos].encode()),
                             {"number", "symbol", "operator"})
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), len(src[:pos].encode())))
        pos = m.end()
    tokens.append(("end", "", len(src.encode())))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.take()
        if t[1] != text or t[0] == "end":
            raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2], {repr(text)})
        return t

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = E.add(node, rhs) if op == "+" else E.sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, off = self.take()
            rhs = self.factor()
            if op == "*":
                node = E.mul(node, rhs)
            else:
                try:
                    node = E.div(node, rhs)
                except E.DomainError:
                    raise ParseError("division by zero", off) from None
        return node

    def factor(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("-", "+"):
            self.take()
            inner = self.factor()
            return E.neg(inner) if t[1] == "-" else inner
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            _, _, off = self.take()
            ex = self.factor()
            if ex.kind != E.CONST:
                raise ParseError("exponent must be a rational constant", off)
            try:
                node = E.pow_(node, ex.value)
            except E.DomainError:
                raise ParseError("0 raised to a negative power", off) from None
        return node

    def base(self):
        kind, text, off = self.take()
        if kind == "num":
            return E.const(Fraction(text))
        if kind == "name":
            if self.peek()[1] == "(":
                if text != "sqrt" and text not in E.FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {text!r}", off,
                                               set(E.FUNCTIONS) | {"sqrt"})
                self.take()
                arg = self.expr()
                self.expect(")")
                try:
                    return E.func(text, arg)
                except E.DomainError as exc:
                    raise ParseError(str(exc), off) from None
            return E.sym(text)
        if text == "(" and kind == "op":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", off,
                         {"number", "symbol", "function", "'('", "'-'"})


def parse(src: str) -> E.Expr:
    """Parse DSL text into a canonical :class:`Expr`."""
    if isinstance(src, bytes):
        src = src.decode("utf-8")
    p = _Parser(src)
    node = p.expr()
    kind, text, off = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {text!r}", off, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
    return node
