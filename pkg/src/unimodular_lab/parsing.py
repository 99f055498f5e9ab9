"""Recursive-descent parser for ring element strings.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | NAME | "(" expr ")"

Evaluation is delegated to the ring: integers, names and division are
resolved through callbacks so the same grammar serves every ring kind.
"""

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, from_int, name, divide):
        self.toks = tokens
        self.i = 0
        self.from_int = from_int
        self.name = name
        self.divide = divide

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            v = v * rhs if op == "*" else self.divide(v, rhs)
        return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.take("int")[1]
            v = v ** e
        return v

    def atom(self):
        kind, val = self.peek()
        if kind == "int":
            self.take()
            return self.from_int(val)
        if kind == "name":
            self.take()
            return self.name(val)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected token {val!r}")


def parse_expression(text, from_int, name, divide):
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    p = _Parser(tokenize(text), from_int, name, divide)
    if not p.toks:
        raise ParseError("empty expression")
    v = p.expr()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input in {text!r}")
    return v
