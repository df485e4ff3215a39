"""Recursive-descent parser and vectorized evaluator for weight rules in ``i``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' factor)?
    base   := number | 'i' | func '(' expr ')' | '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt' | 'abs'

``+ - * /`` associate left, ``^`` associates right, and unary minus binds
looser than ``^`` so ``-2^2`` is ``-4``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import EvalDomainError, ParseError

FUNCTIONS = ("exp", "log", "sqrt", "abs")

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()])"
)


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Index(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        offset = len(text[:pos].encode())
        if pos == len(text):
            toks.append(_Tok("end", "", offset))
            return toks
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected character {text[pos]!r}", offset)
        toks.append(_Tok(mt.lastgroup, mt.group(), offset))
        pos = mt.end()


class _Parser:
    _BASE_START = {"number", "i", "(", *FUNCTIONS}

    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def fail(self, expected):
        tok = self.cur
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.offset, expected)

    def eat_op(self, *ops) -> str | None:
        tok = self.cur
        if tok.kind == "op" and tok.text in ops:
            self.pos += 1
            return tok.text
        return None

    def expect_op(self, op):
        if self.eat_op(op) is None:
            self.fail({op})

    def parse(self) -> Node:
        node = self.expr()
        if self.cur.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while (op := self.eat_op("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while (op := self.eat_op("*", "/")) is not None:
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.eat_op("-") is not None:
            return Neg(self.factor())
        node = self.base()
        if self.eat_op("^") is not None:
            return BinOp("^", node, self.factor())
        return node

    def base(self) -> Node:
        tok = self.cur
        if tok.kind == "num":
            self.pos += 1
            return Const(float(tok.text))
        if tok.kind == "name":
            if tok.text == "i":
                self.pos += 1
                return Index()
            if tok.text in FUNCTIONS:
                self.pos += 1
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            raise ParseError(f"unknown name {tok.text!r}", tok.offset, self._BASE_START | {"-"})
        if self.eat_op("(") is not None:
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail(self._BASE_START | {"-"})


def parse_weight_expr(text: str) -> Node:
    """Parse ``text`` into an AST; raises :class:`ParseError` with a byte offset."""
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def to_source(node: Node) -> str:
    """Render an AST back to text that parses to the same tree."""
    return _render(node, 0)


def _render(node: Node, ctx: int) -> str:
    if isinstance(node, Const):
        text = repr(node.value)
        if "inf" in text or "nan" in text:
            raise ValueError("non-finite constant")
        return text
    if isinstance(node, Index):
        return "i"
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg, 0)})"
    if isinstance(node, Neg):
        out = "-" + _render(node.operand, 3)
        return f"({out})" if ctx > 3 else out
    prec = _PREC[node.op]
    if node.op == "^":
        left = _render(node.left, 5)
        right = _render(node.right, 3)
    else:
        left = _render(node.left, prec)
        right = _render(node.right, prec + 1)
    out = f"{left}{node.op}{right}"
    return f"({out})" if prec < ctx else out


def substitute_shift(node: Node, k: int) -> Node:
    """The rule ``i -> i + k``."""
    if isinstance(node, Index):
        return BinOp("+", Index(), Const(float(k))) if k else node
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute_shift(node.operand, k))
    if isinstance(node, Call):
        return Call(node.func, substitute_shift(node.arg, k))
    return BinOp(node.op, substitute_shift(node.left, k), substitute_shift(node.right, k))


def evaluate(node: Node, i) -> np.ndarray:
    """Evaluate at integer indices ``i`` (scalar or array), checking domains."""
    idx = np.asarray(i, dtype=np.float64)
    with np.errstate(all="ignore"):
        return _eval(node, idx)


def _eval(node, idx):
    if isinstance(node, Const):
        return np.full(idx.shape, node.value)
    if isinstance(node, Index):
        return idx.copy()
    if isinstance(node, Neg):
        return -_eval(node.operand, idx)
    if isinstance(node, Call):
        x = _eval(node.arg, idx)
        if node.func == "log":
            if np.any(x <= 0):
                raise EvalDomainError(f"log of non-positive value at i={_first(idx, x <= 0)}")
            return np.log(x)
        if node.func == "sqrt":
            if np.any(x < 0):
                raise EvalDomainError(f"sqrt of negative value at i={_first(idx, x < 0)}")
            return np.sqrt(x)
        return np.exp(x) if node.func == "exp" else np.abs(x)
    a = _eval(node.left, idx)
    b = _eval(node.right, idx)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(b == 0):
            raise EvalDomainError(f"division by zero at i={_first(idx, b == 0)}")
        return a / b
    integral = b == np.round(b)
    bad = (~integral) & (a <= 0)
    if np.any(bad):
        raise EvalDomainError(f"non-integer power of non-positive base at i={_first(idx, bad)}")
    zero_neg = (a == 0) & (b < 0)
    if np.any(zero_neg):
        raise EvalDomainError(f"zero raised to a negative power at i={_first(idx, zero_neg)}")
    return np.power(a, b)


def _first(idx, mask):
    mask = np.broadcast_to(mask, idx.shape)
    return int(idx[mask].flat[0]) if idx.ndim else int(idx)
