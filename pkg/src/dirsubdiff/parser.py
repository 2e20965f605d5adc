"""Parser for the small infix function language.

Grammar (whitespace insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | atom
    atom   := NUMBER | VARIABLE | call | "(" expr ")"
    call   := NAME "(" expr ("," expr)* ")"

Variables are ``x1 .. xn`` (1-based).  Calls: ``max`` and ``min`` with two or
more arguments, the unary ``abs``, ``sin``, ``cos``, ``exp``, ``log``,
``sqr``, ``sqrt``, and ``pow(e, k)`` with a literal integer exponent ``k >= 2``.
``abs(e)`` desugars to ``max(e, -e)`` during parsing.
"""

from __future__ import annotations

import re

from .expr import (
    Const,
    Expr,
    LinComb,
    Max,
    Min,
    Product,
    Quotient,
    SmoothUnary,
    Var,
    neg,
    vabs,
)


class ParseError(ValueError):
    """Syntax or name error, carrying the character offset in ``position``."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_VARIABLE = re.compile(r"x(\d+)\Z")

_UNARY_CALLS = ("abs", "sin", "cos", "exp", "log", "sqr", "sqrt")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            m = _NUMBER.match(text, i)
            if not m:
                raise ParseError(f"bad number starting with {ch!r}", i)
            tokens.append(("num", m.group(), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _NAME.match(text, i)
            tokens.append(("name", m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/(),":
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, at = self.peek()
        if kind != "op" or text != op:
            shown = text if text else "end of input"
            raise ParseError(f"expected {op!r}, found {shown!r}", at)
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing {text!r}", at)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                node = LinComb(1.0, node, 1.0 if text == "+" else -1.0, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                rhs = self.unary()
                node = Product(node, rhs) if text == "*" else Quotient(node, rhs)
            else:
                return node

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> Expr:
        kind, text, at = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            var_match = _VARIABLE.match(text)
            if var_match:
                index = int(var_match.group(1))
                if index < 1:
                    raise ParseError("variables are numbered from x1", at)
                return Var(index - 1)
            next_kind, next_text, _ = self.peek()
            if not (next_kind == "op" and next_text == "("):
                raise ParseError(f"unknown identifier {text!r}", at)
            return self.call(text, at)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        shown = text if text else "end of input"
        raise ParseError(f"unexpected {shown!r}", at)

    def call(self, name: str, at: int) -> Expr:
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == ",":
                self.take()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")

        if name in ("max", "min"):
            if len(args) < 2:
                raise ParseError(f"{name} needs at least two arguments", at)
            return Max(tuple(args)) if name == "max" else Min(tuple(args))
        if name == "pow":
            if len(args) != 2:
                raise ParseError("pow takes exactly two arguments", at)
            base, expo = args
            if not isinstance(expo, Const) or expo.value != int(expo.value) or expo.value < 2:
                raise ParseError("pow exponent must be an integer literal >= 2", at)
            return SmoothUnary("pow", base, int(expo.value))
        if name in _UNARY_CALLS:
            if len(args) != 1:
                raise ParseError(f"{name} takes exactly one argument", at)
            if name == "abs":
                return vabs(args[0])
            return SmoothUnary(name, args[0])
        raise ParseError(f"unknown function {name!r}", at)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises :class:`ParseError` with a character position on syntax errors,
    unknown identifiers and malformed calls.
    """
    return _Parser(text).parse()
