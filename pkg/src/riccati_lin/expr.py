"""Univariate real expressions in ``x``.

Parsing, evaluation, symbolic differentiation and light simplification for
the coefficient functions ``a(x)`` and ``f(x)``.

Grammar::

    expr    := term (("+"|"-") term)*
    term    := unary (("*"|"/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          (right-associative)
    atom    := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := exp | ln | sin | cos | sinh | cosh | sqrt

A minus sign written directly in front of a number literal (``-2``, but not
``-2^3``) produces a negative constant rather than a negation node, so
``x^(-2)`` parses to ``Pow(Var(), Const(-2.0))``.

Evaluation never raises on domain problems. It returns a :class:`NotAValue`,
a NaN carrying the reason, which propagates unchanged through every enclosing
node.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

__all__ = [
    "Expr", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Func",
    "FUNCTIONS", "NotAValue", "ExprSyntaxError", "UnknownIdentifierError",
    "parse", "evaluate", "differentiate", "simplify", "to_string",
    "is_constant", "as_expr",
]

FUNCTIONS = ("exp", "ln", "sin", "cos", "sinh", "cosh", "sqrt")


class NotAValue(float):
    """NaN tagged with the reason an evaluation is undefined."""

    def __new__(cls, reason: str):
        obj = super().__new__(cls, "nan")
        obj.reason = reason
        return obj

    def __repr__(self):
        return f"NotAValue({self.reason!r})"


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the 0-based position."""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        self.message = message
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


# ---------------------------------------------------------------------------
# nodes

class Expr:
    """Base class of expression nodes. Nodes are immutable."""

    precedence = 5

    def __call__(self, x: float) -> float:
        return self.evaluate(float(x))

    def evaluate(self, x: float) -> float:
        raise NotImplementedError

    def derivative(self) -> Expr:
        raise NotImplementedError

    def __str__(self):
        return to_string(self)

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, other):
        return Pow(self, as_expr(other))

    def __rpow__(self, other):
        return Pow(as_expr(other), self)

    def __neg__(self):
        return Neg(self)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    return Const(float(value))


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float

    def evaluate(self, x):
        return self.value

    def derivative(self):
        return Const(0.0)


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):

    def evaluate(self, x):
        return x

    def derivative(self):
        return Const(1.0)


@dataclass(frozen=True, eq=True, repr=True)
class Neg(Expr):
    arg: Expr
    precedence = 3

    def evaluate(self, x):
        v = self.arg.evaluate(x)
        return v if isinstance(v, NotAValue) else -v

    def derivative(self):
        return Neg(self.arg.derivative())


@dataclass(frozen=True, eq=True, repr=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x):
        u = self.left.evaluate(x)
        if isinstance(u, NotAValue):
            return u
        v = self.right.evaluate(x)
        if isinstance(v, NotAValue):
            return v
        return self._apply(u, v)


class Add(_Binary):
    precedence = 1
    symbol = "+"

    def _apply(self, u, v):
        return u + v

    def derivative(self):
        return Add(self.left.derivative(), self.right.derivative())


class Sub(_Binary):
    precedence = 1
    symbol = "-"

    def _apply(self, u, v):
        return u - v

    def derivative(self):
        return Sub(self.left.derivative(), self.right.derivative())


class Mul(_Binary):
    precedence = 2
    symbol = "*"

    def _apply(self, u, v):
        return u * v

    def derivative(self):
        u, v = self.left, self.right
        return Add(Mul(u.derivative(), v), Mul(u, v.derivative()))


class Div(_Binary):
    precedence = 2
    symbol = "/"

    def _apply(self, u, v):
        if v == 0.0:
            return NotAValue("division by zero")
        return u / v

    def derivative(self):
        u, v = self.left, self.right
        return Div(Sub(Mul(u.derivative(), v), Mul(u, v.derivative())),
                   Pow(v, Const(2.0)))


def _power(b: float, n: float) -> float:
    if b == 0.0:
        if n < 0.0:
            return NotAValue("zero to a negative power")
        return 1.0 if n == 0.0 else 0.0
    if b < 0.0 and not float(n).is_integer():
        return NotAValue("negative base with non-integer exponent")
    try:
        return math.pow(b, n)
    except OverflowError:
        return -math.inf if (b < 0.0 and n % 2 == 1) else math.inf


class Pow(_Binary):
    precedence = 4
    symbol = "^"

    def _apply(self, u, v):
        return _power(u, v)

    def derivative(self):
        b, g = self.left, self.right
        if is_constant(g):
            return Mul(Mul(g, Pow(b, Sub(g, Const(1.0)))), b.derivative())
        # general case through b^g = exp(g ln b)
        return Mul(self, Add(Mul(g.derivative(), Func("ln", b)),
                             Div(Mul(g, b.derivative()), b)))


def _exp(v):
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _ln(v):
    if v <= 0.0:
        return NotAValue("ln of non-positive")
    return math.log(v)


def _sqrt(v):
    if v < 0.0:
        return NotAValue("sqrt of negative")
    return math.sqrt(v)


def _sinh(v):
    try:
        return math.sinh(v)
    except OverflowError:
        return math.copysign(math.inf, v)


def _cosh(v):
    try:
        return math.cosh(v)
    except OverflowError:
        return math.inf


def _trig(fn):
    def apply(v):
        if math.isinf(v):
            return NotAValue("trigonometric function of infinity")
        return fn(v)
    return apply


_FUNC_IMPL = {
    "exp": _exp, "ln": _ln, "sqrt": _sqrt, "sinh": _sinh, "cosh": _cosh,
    "sin": _trig(math.sin), "cos": _trig(math.cos),
}


@dataclass(frozen=True, eq=True, repr=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in _FUNC_IMPL:
            raise ValueError(f"unknown function {self.name!r}")

    def evaluate(self, x):
        v = self.arg.evaluate(x)
        if isinstance(v, NotAValue):
            return v
        if math.isnan(v):
            return NotAValue(f"{self.name} of nan")
        return _FUNC_IMPL[self.name](v)

    def derivative(self):
        u = self.arg
        name = self.name
        if name == "exp":
            outer = self
        elif name == "ln":
            return Div(u.derivative(), u)
        elif name == "sqrt":
            return Div(u.derivative(), Mul(Const(2.0), self))
        elif name == "sin":
            outer = Func("cos", u)
        elif name == "cos":
            outer = Neg(Func("sin", u))
        elif name == "sinh":
            outer = Func("cosh", u)
        else:  # cosh
            outer = Func("sinh", u)
        return Mul(outer, u.derivative())


def is_constant(e: Expr) -> bool:
    """True when ``e`` does not depend on ``x``."""
    if isinstance(e, Var):
        return False
    if isinstance(e, Const):
        return True
    if isinstance(e, (Neg, Func)):
        return is_constant(e.arg)
    return is_constant(e.left) and is_constant(e.right)


# ---------------------------------------------------------------------------
# public operations

def evaluate(e: Expr | str, x: float) -> float:
    """Value of ``e`` at ``x``; a :class:`NotAValue` where undefined."""
    return as_expr(e).evaluate(float(x))


def differentiate(e: Expr | str, order: int = 1) -> Expr:
    """Symbolic derivative of ``e`` of the given order (1, 2 or 3).

    Each order is simplified before the next is taken so that third
    derivatives stay a manageable size.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order!r}")
    d = as_expr(e)
    for _ in range(order):
        d = simplify(d.derivative())
    return d


def _fold(e: Expr) -> Expr:
    v = e.evaluate(0.0)
    if isinstance(v, NotAValue) or not math.isfinite(v):
        return e
    return Const(v)


def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def simplify(e: Expr | str) -> Expr:
    """Constant folding plus the identities 0+e, 1*e, 0*e, e^1, e^0.

    The result has the same value as ``e`` wherever both are defined.
    ``0^0`` is left as written; divisions by a zero constant are not folded.
    """
    e = as_expr(e)
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Const):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Func):
        a = simplify(e.arg)
        out = Func(e.name, a)
        return _fold(out) if isinstance(a, Const) else out

    left, right = simplify(e.left), simplify(e.right)
    if isinstance(e, Pow) and _is(left, 0.0) and _is(right, 0.0):
        return Pow(left, right)
    if isinstance(left, Const) and isinstance(right, Const):
        return _fold(type(e)(left, right))

    if isinstance(e, Add):
        if _is(left, 0.0):
            return right
        if _is(right, 0.0):
            return left
    elif isinstance(e, Sub):
        if _is(right, 0.0):
            return left
        if _is(left, 0.0):
            return simplify(Neg(right))
    elif isinstance(e, Mul):
        if _is(left, 0.0) or _is(right, 0.0):
            return Const(0.0)
        if _is(left, 1.0):
            return right
        if _is(right, 1.0):
            return left
    elif isinstance(e, Div):
        if _is(right, 1.0):
            return left
        if _is(left, 0.0):
            return Const(0.0)
    elif isinstance(e, Pow):
        if _is(right, 1.0):
            return left
        if _is(right, 0.0):
            return Const(1.0)
    return type(e)(left, right)


# ---------------------------------------------------------------------------
# printing

def _number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(v)
    return f"({s})" if v < 0 or s.startswith("-") else s


def to_string(e: Expr) -> str:
    """Text that parses back to a structurally equal tree."""
    if isinstance(e, Const):
        return _number(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.arg)
        # parenthesize constants so "-(2)" does not re-parse as a literal
        if e.arg.precedence < Neg.precedence or isinstance(e.arg, Const):
            inner = f"({inner})"
        return "-" + inner
    left, right = to_string(e.left), to_string(e.right)
    if isinstance(e, Pow):
        if e.left.precedence <= Pow.precedence:
            left = f"({left})"
        if e.right.precedence < Neg.precedence:
            right = f"({right})"
        return f"{left}^{right}"
    if e.left.precedence < e.precedence:
        left = f"({left})"
    if e.right.precedence <= e.precedence:
        right = f"({right})"
    return f"{left} {e.symbol} {right}"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, tok[2], self.source)

    def expect(self, text):
        tok = self.peek()
        if tok[1] != text or tok[0] == "end":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {text!r}, found {found}")
        return self.take()

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = (Add if op == "+" else Sub)(node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = (Mul if op == "*" else Div)(node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            if self.peek()[0] == "num" and self.peek(1)[1] != "^":
                return Const(-float(self.take()[1]))
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind, text, _ = tok
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "name":
            self.take()
            if text == "x":
                return Var()
            if text == "pi":
                return Const(math.pi)
            if text == "e":
                return Const(math.e)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", tok[2], self.source)
        if text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(f"expected a number, 'x', a function or '(', found {found}")


def parse(source: str) -> Expr:
    """Parse expression text into a tree.

    Raises
    ------
    ExprSyntaxError
        With the offending offset; :class:`UnknownIdentifierError` for
        names outside ``x``, ``pi``, ``e`` and the function set.
    """
    p = _Parser(source)
    node = p.expr()
    if p.peek()[0] != "end":
        raise p.error(f"unexpected {p.peek()[1]!r}")
    return node
