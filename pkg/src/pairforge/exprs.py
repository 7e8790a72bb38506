"""Tiny recursive-descent parser for the textual expression syntax.

Grammar (shared by rational-function input and group-algebra input)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'* power
    power  := atom ('^' signed_int)*
    atom   := NAME | INT | '(' expr ')'

The AST is plain tuples; evaluation against a concrete algebra happens in
``eval_scalar`` here (rational functions) or in the group-algebra layer.
"""

from __future__ import annotations

import re

from .errors import ConfigError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ConfigError(f"cannot tokenize expression near {rest[:12]!r}")
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
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ConfigError(f"expected {op!r} in expression")

    def parse_expr(self):
        node = self.parse_term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.parse_term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.parse_factor()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def parse_factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        while self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "int":
                raise ConfigError("exponent must be an integer literal")
            node = ("pow", node, sign * val)
        return node

    def parse_atom(self):
        kind, val = self.take()
        if kind == "int":
            return ("int", val)
        if kind == "name":
            return ("var", val)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ConfigError(f"unexpected token {val!r} in expression")


def parse_expression(text: str):
    tokens = tokenize(text)
    if not tokens:
        raise ConfigError("empty expression")
    parser = _Parser(tokens)
    node = parser.parse_expr()
    if parser.pos != len(tokens):
        raise ConfigError("trailing input after expression")
    return node


def eval_scalar(node, field):
    """Evaluate an AST into a RatFunc over ``field``.

    Names resolve to the field's variables; ``theta`` resolves to the
    cyclotomic generator.
    """
    kind = node[0]
    if kind == "int":
        return field.scalar(node[1])
    if kind == "var":
        name = node[1]
        if name == "theta":
            return field.theta()
        if name in field.variables:
            return field.var(name)
        raise ConfigError(f"unknown variable {name!r}")
    if kind == "neg":
        return -eval_scalar(node[1], field)
    if kind == "add":
        return eval_scalar(node[1], field) + eval_scalar(node[2], field)
    if kind == "sub":
        return eval_scalar(node[1], field) - eval_scalar(node[2], field)
    if kind == "mul":
        return eval_scalar(node[1], field) * eval_scalar(node[2], field)
    if kind == "div":
        return eval_scalar(node[1], field) / eval_scalar(node[2], field)
    if kind == "pow":
        return eval_scalar(node[1], field) ** node[2]
    raise ConfigError(f"unknown AST node {kind!r}")
