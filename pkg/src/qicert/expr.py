"""Expression trees for functions of one real variable.

Grammar (the only function-input format of the package)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := NUMBER | 'x' | '(' expr ')'
             | 'pow' '(' expr ',' SIGNED_NUMBER ')'
             | 'exp' '(' expr ')' | 'log' '(' expr ')' | 'abs' '(' expr ')'
             | 'min' '(' expr ',' expr ')' | 'max' '(' expr ',' expr ')'

Whitespace is insignificant.  The exponent of ``pow`` is a numeric literal,
not a subexpression.  Trees are immutable; parsing and serialization
round-trip exactly, so re-parsing a serialized tree evaluates bit-identically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ParseError

__all__ = [
    "Interval",
    "Expression",
    "Const",
    "Var",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Exp",
    "Log",
    "Abs",
    "Min",
    "Max",
    "parse",
    "serialize",
    "const",
    "var",
    "product",
]


@dataclass(frozen=True)
class Interval:
    """Closed interval [a, b] with finite endpoints, a <= b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.a > self.b:
            raise ValueError(f"interval requires a <= b, got [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)


# ---------------------------------------------------------------------------
# Nodes.  The node set is closed under differentiation wherever smooth.


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Const(Node):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ParseError(f"non-finite constant {self.value!r}")


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: float

    def __post_init__(self):
        if not math.isfinite(self.exponent):
            raise ParseError(f"non-finite exponent {self.exponent!r}")


@dataclass(frozen=True)
class Exp(Node):
    arg: Node


@dataclass(frozen=True)
class Log(Node):
    arg: Node


@dataclass(frozen=True)
class Abs(Node):
    arg: Node


@dataclass(frozen=True)
class Min(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Max(Node):
    left: Node
    right: Node


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[()+\-*/,])"
    r")"
)

_FUNCTIONS = {"pow", "exp", "log", "abs", "min", "max"}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            remainder = text[pos:].lstrip()
            if not remainder:
                break
            raise ParseError(f"unexpected character {remainder[0]!r} at position {pos}")
        if m.lastgroup is not None:
            tokens.append((m.lastgroup, m.group(m.lastgroup)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text = self.take()
        if text != value:
            raise ParseError(f"expected {value!r}, got {text!r}")

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Node:
        node = self.parse_unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.parse_unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_unary(self) -> Node:
        if self.peek()[1] == "-":
            self.take()
            inner = self.parse_unary()
            # fold a leading minus into numeric literals so that "-2.5"
            # round-trips as a constant
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.parse_primary()

    def parse_primary(self) -> Node:
        kind, text = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text == "x":
                return Var()
            if text in _FUNCTIONS:
                return self.parse_call(text)
            raise ParseError(f"unknown identifier {text!r}")
        if text == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {text!r}")

    def parse_call(self, name: str) -> Node:
        self.expect("(")
        first = self.parse_expr()
        if name in ("exp", "log", "abs"):
            self.expect(")")
            return {"exp": Exp, "log": Log, "abs": Abs}[name](first)
        self.expect(",")
        if name == "pow":
            exponent = self.parse_signed_number()
            self.expect(")")
            return Pow(first, exponent)
        second = self.parse_expr()
        self.expect(")")
        return Min(first, second) if name == "min" else Max(first, second)

    def parse_signed_number(self) -> float:
        sign = 1.0
        while self.peek()[1] in ("+", "-"):
            if self.take()[1] == "-":
                sign = -sign
        kind, text = self.take()
        if kind != "num":
            raise ParseError(f"pow exponent must be a numeric literal, got {text!r}")
        return sign * float(text)


def parse(text: str) -> "Expression":
    """Parse grammar text into an immutable Expression."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens)
    root = parser.parse_expr()
    if parser.pos != len(tokens):
        raise ParseError(f"trailing input starting at {parser.peek()[1]!r}")
    return Expression(root)


# ---------------------------------------------------------------------------
# Serializer

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_ATOM = 1, 2, 3, 4


def _level(node: Node) -> int:
    if isinstance(node, (Add, Sub)):
        return _LEVEL_ADD
    if isinstance(node, (Mul, Div)):
        return _LEVEL_MUL
    if isinstance(node, Neg):
        return _LEVEL_NEG
    if isinstance(node, Const) and node.value < 0:
        return _LEVEL_NEG
    return _LEVEL_ATOM


def _fmt(value: float) -> str:
    return repr(float(value))


def _emit(node: Node) -> str:
    if isinstance(node, Const):
        return _fmt(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        inner = _emit(node.arg)
        if _level(node.arg) < _LEVEL_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        lhs = _emit(node.left)
        rhs = _emit(node.right)
        rlevel = _level(node.right)
        # subtraction is left-associative: "a - (b + c)" needs the parens
        if rlevel < _LEVEL_ADD or (op == "-" and rlevel == _LEVEL_ADD):
            rhs = f"({rhs})"
        return f"{lhs} {op} {rhs}"
    if isinstance(node, (Mul, Div)):
        op = "*" if isinstance(node, Mul) else "/"
        lhs = _emit(node.left)
        rhs = _emit(node.right)
        if _level(node.left) < _LEVEL_MUL:
            lhs = f"({lhs})"
        rlevel = _level(node.right)
        if rlevel < _LEVEL_MUL or (op == "/" and rlevel == _LEVEL_MUL):
            rhs = f"({rhs})"
        return f"{lhs} {op} {rhs}"
    if isinstance(node, Pow):
        return f"pow({_emit(node.base)}, {_fmt(node.exponent)})"
    if isinstance(node, Exp):
        return f"exp({_emit(node.arg)})"
    if isinstance(node, Log):
        return f"log({_emit(node.arg)})"
    if isinstance(node, Abs):
        return f"abs({_emit(node.arg)})"
    if isinstance(node, Min):
        return f"min({_emit(node.left)}, {_emit(node.right)})"
    if isinstance(node, Max):
        return f"max({_emit(node.left)}, {_emit(node.right)})"
    raise TypeError(f"unknown node {node!r}")


def serialize(expr: "Expression | Node") -> str:
    node = expr.root if isinstance(expr, Expression) else expr
    return _emit(node)


# ---------------------------------------------------------------------------
# Public handle


class Expression:
    """Immutable handle around an expression tree.

    Supports arithmetic operators so compound expressions (products of
    weights, scaled functions) can be assembled programmatically; the result
    always stays inside the grammar.
    """

    __slots__ = ("root", "_tape")

    def __init__(self, root: Node):
        if not isinstance(root, Node):
            raise TypeError(f"expected a Node, got {type(root).__name__}")
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "_tape", None)

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    def __repr__(self):
        return f"Expression({serialize(self)!r})"

    def __str__(self):
        return serialize(self)

    def __eq__(self, other):
        return isinstance(other, Expression) and self.root == other.root

    def __hash__(self):
        return hash(self.root)

    # tape caching: building is deterministic, so a benign race just builds twice
    def tape(self):
        if self._tape is None:
            from .tape import compile_tape

            object.__setattr__(self, "_tape", compile_tape(self.root))
        return self._tape

    # -- arithmetic sugar ---------------------------------------------------
    @staticmethod
    def _coerce(value) -> Node:
        if isinstance(value, Expression):
            return value.root
        if isinstance(value, (int, float)):
            return Const(float(value))
        return NotImplemented

    def __add__(self, other):
        rhs = self._coerce(other)
        return NotImplemented if rhs is NotImplemented else Expression(Add(self.root, rhs))

    def __radd__(self, other):
        lhs = self._coerce(other)
        return NotImplemented if lhs is NotImplemented else Expression(Add(lhs, self.root))

    def __sub__(self, other):
        rhs = self._coerce(other)
        return NotImplemented if rhs is NotImplemented else Expression(Sub(self.root, rhs))

    def __rsub__(self, other):
        lhs = self._coerce(other)
        return NotImplemented if lhs is NotImplemented else Expression(Sub(lhs, self.root))

    def __mul__(self, other):
        rhs = self._coerce(other)
        return NotImplemented if rhs is NotImplemented else Expression(Mul(self.root, rhs))

    def __rmul__(self, other):
        lhs = self._coerce(other)
        return NotImplemented if lhs is NotImplemented else Expression(Mul(lhs, self.root))

    def __truediv__(self, other):
        rhs = self._coerce(other)
        return NotImplemented if rhs is NotImplemented else Expression(Div(self.root, rhs))

    def __rtruediv__(self, other):
        lhs = self._coerce(other)
        return NotImplemented if lhs is NotImplemented else Expression(Div(lhs, self.root))

    def __neg__(self):
        return Expression(Neg(self.root))

    def pow(self, exponent: float) -> "Expression":
        return Expression(Pow(self.root, float(exponent)))


def const(value: float) -> Expression:
    return Expression(Const(float(value)))


def var() -> Expression:
    return Expression(Var())


def product(factors) -> Expression:
    """Product of a sequence of expressions; the empty product is 1."""
    result = None
    for factor in factors:
        result = factor if result is None else result * factor
    return const(1.0) if result is None else result
