"""Parser and evaluator for stem expressions.

Grammar (standard precedence, ``^`` binds tighter than unary minus and is
right associative)::

    stem    := sum | "(" sum ("," sum)+ ")"
    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | NAME | NAME "(" sum ")" | "(" sum ")"

Names are ``x``, ``y``, ``iota``, ``z`` (sugar for ``x + iota*y``), ``pi``
and ``e``; functions are sin, cos, sinh, cosh, exp, log, sqrt and conj
(``conj(z)`` is sugar for ``x - iota*y``).  Values are complex numbers with
``iota`` as the imaginary unit, so an expression describes a real stem
``F1 + iota F2``.  Evaluation carries exact x- and y-derivatives
(forward-mode differentiation), which gives expression stems analytic
partials.
"""
from __future__ import annotations

from dataclasses import dataclass
import cmath
import math
import re

import numpy as np

from .errors import DomainError, ParseError
from .stem import StemFunction, SymmetricDomain

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt", "conj")
CONSTANTS = {"pi": math.pi, "e": math.e}


# -- AST ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Iota:
    pass


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class Tuple:
    items: tuple


def _z():
    return BinOp("+", Var("x"), BinOp("*", Iota(), Var("y")))


def _zbar():
    return BinOp("-", Var("x"), BinOp("*", Iota(), Var("y")))


# -- tokenizer ------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser ------------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        if tok.kind == "eof":
            message = f"{message}: unexpected end of input"
        else:
            message = f"{message}: unexpected {tok.text!r}"
        raise ParseError(message, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str, what: str):
        if not self.accept(text):
            self.error(f"expected {what}")

    def parse(self):
        start = self.tok
        node = self.stem()
        if self.tok.kind != "eof":
            if self.tok.text == ")":
                raise ParseError("unbalanced parenthesis", self.tok.line, self.tok.column)
            self.error("expected end of expression")
        if start.kind == "eof":
            self.error("empty expression", start)
        return node

    def stem(self):
        if self.tok.text == "(":
            # A top-level parenthesis may open a tuple.
            save = self.i
            self.i += 1
            first = self.sum()
            if self.accept(","):
                items = [first, self.sum()]
                while self.accept(","):
                    items.append(self.sum())
                self.expect(")", "',' or ')' closing the tuple")
                if self.tok.kind == "eof":
                    return Tuple(tuple(items))
                raise ParseError("a tuple must be the whole expression", self.tok.line, self.tok.column)
            self.i = save
        return self.sum()

    def sum(self):
        node = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.accept("^"):
            return BinOp("^", node, self.unary())
        return node

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            name = tok.text
            if name in FUNCTIONS:
                if not self.accept("("):
                    self.error(f"expected '(' after {name}")
                arg = self.sum()
                if self.tok.text == ",":
                    raise ParseError(f"arity mismatch: {name} takes one argument", self.tok.line, self.tok.column)
                self.expect(")", f"')' closing {name}(")
                if name == "conj" and arg == _z():
                    return _zbar()
                return Call(name, arg)
            if name in ("x", "y"):
                return Var(name)
            if name == "iota":
                return Iota()
            if name == "z":
                return _z()
            if name in CONSTANTS:
                return Num(CONSTANTS[name])
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.column)
        if self.accept("("):
            node = self.sum()
            if self.tok.text == ",":
                raise ParseError("arity mismatch: tuples are only allowed at top level", self.tok.line, self.tok.column)
            if self.tok.kind == "eof":
                raise ParseError("unbalanced parenthesis: missing ')'", self.tok.line, self.tok.column)
            self.expect(")", "')'")
            return node
        if tok.kind == "op" and tok.text == ")":
            raise ParseError("unbalanced parenthesis", tok.line, tok.column)
        self.error("expected a number, name or '('")


@dataclass(frozen=True)
class StemExpr:
    """A parsed stem expression; ``arity`` is fixed by the top-level tuple."""

    root: object

    @property
    def items(self) -> tuple:
        return self.root.items if isinstance(self.root, Tuple) else (self.root,)

    @property
    def arity(self) -> int:
        return len(self.items)

    def to_text(self) -> str:
        return to_text(self.root)

    def __str__(self):
        return self.to_text()

    def __post_init__(self):
        object.__setattr__(self, "_compiled", tuple(_compile(n) for n in self.items))

    def evaluate(self, x: float, y: float) -> np.ndarray:
        """Complex values ``F1 + 1j F2``, one per component."""
        return np.array([f(x, y) for f in self._compiled], dtype=complex)

    def evaluate_with_partials(self, x: float, y: float):
        """Complex values and their x- and y-derivatives."""
        res = [_ev(n, x, y) for n in self.items]
        return tuple(np.array([r[k] for r in res], dtype=complex) for k in range(3))


def parse_stem_expr(text: str) -> StemExpr:
    return StemExpr(_Parser(text).parse())


def to_text(node) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Iota):
        return "iota"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Tuple):
        return "(" + ", ".join(to_text(n) for n in node.items) + ")"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation with derivatives ----------------------------------------------------------

def _fn(name, v):
    if name == "sin":
        return np.sin(v), np.cos(v)
    if name == "cos":
        return np.cos(v), -np.sin(v)
    if name == "sinh":
        return np.sinh(v), np.cosh(v)
    if name == "cosh":
        return np.cosh(v), np.sinh(v)
    if name == "exp":
        e = np.exp(v)
        return e, e
    if name == "log":
        if v == 0:
            raise DomainError("log(0) in stem expression")
        return np.log(v), 1.0 / v
    if name == "sqrt":
        s = np.sqrt(v)
        if s == 0:
            raise DomainError("sqrt is not differentiable at 0")
        return s, 0.5 / s
    raise AssertionError(name)


_CMATH = {"sin": cmath.sin, "cos": cmath.cos, "sinh": cmath.sinh, "cosh": cmath.cosh, "exp": cmath.exp}


def _compile(node):
    """Closure ``(x, y) -> complex`` for the value of ``node`` (no derivatives)."""
    if isinstance(node, Num):
        c = complex(node.value)
        return lambda x, y: c
    if isinstance(node, Var):
        return (lambda x, y: complex(x)) if node.name == "x" else (lambda x, y: complex(y))
    if isinstance(node, Iota):
        return lambda x, y: 1j
    if isinstance(node, Neg):
        f = _compile(node.operand)
        return lambda x, y: -f(x, y)
    if isinstance(node, Call):
        f = _compile(node.arg)
        if node.func == "conj":
            return lambda x, y: f(x, y).conjugate()
        if node.func in _CMATH:
            g = _CMATH[node.func]
            return lambda x, y: g(f(x, y))

        def call(x, y, name=node.func):
            return complex(_fn(name, f(x, y))[0])

        return call
    if isinstance(node, BinOp):
        f, g = _compile(node.left), _compile(node.right)
        op = node.op
        if op == "+":
            return lambda x, y: f(x, y) + g(x, y)
        if op == "-":
            return lambda x, y: f(x, y) - g(x, y)
        if op == "*":
            return lambda x, y: f(x, y) * g(x, y)
        if op == "/":
            def div(x, y):
                v = g(x, y)
                if v == 0:
                    raise DomainError("division by zero in stem expression")
                return f(x, y) / v

            return div
        if op == "^":
            return lambda x, y: _pow_value(f(x, y), g(x, y))
    raise TypeError(f"not an expression node: {node!r}")


def _pow_value(u: complex, v: complex) -> complex:
    if v.imag == 0 and float(v.real).is_integer():
        n = int(v.real)
        if n == 0:
            return 1 + 0j
        if u == 0 and n < 0:
            raise DomainError("negative power of zero in stem expression")
        return u**n
    if u == 0:
        raise DomainError("non-integer power of zero in stem expression")
    return cmath.exp(v * cmath.log(u))


def _ev(node, x, y):
    """Return ``(value, d/dx, d/dy)`` as complex numbers."""
    if isinstance(node, Num):
        return complex(node.value), 0j, 0j
    if isinstance(node, Var):
        return (complex(x), 1 + 0j, 0j) if node.name == "x" else (complex(y), 0j, 1 + 0j)
    if isinstance(node, Iota):
        return 1j, 0j, 0j
    if isinstance(node, Neg):
        v, a, b = _ev(node.operand, x, y)
        return -v, -a, -b
    if isinstance(node, Call):
        v, a, b = _ev(node.arg, x, y)
        if node.func == "conj":
            return v.conjugate(), a.conjugate(), b.conjugate()
        f, df = _fn(node.func, v)
        return complex(f), complex(df * a), complex(df * b)
    if isinstance(node, BinOp):
        u, ux, uy = _ev(node.left, x, y)
        v, vx, vy = _ev(node.right, x, y)
        op = node.op
        if op == "+":
            return u + v, ux + vx, uy + vy
        if op == "-":
            return u - v, ux - vx, uy - vy
        if op == "*":
            return u * v, ux * v + u * vx, uy * v + u * vy
        if op == "/":
            if v == 0:
                raise DomainError("division by zero in stem expression")
            return u / v, (ux * v - u * vx) / v**2, (uy * v - u * vy) / v**2
        if op == "^":
            constant = vx == 0 and vy == 0 and v.imag == 0
            if constant and float(v.real).is_integer():
                n = int(v.real)
                if n == 0:
                    return 1 + 0j, 0j, 0j
                if u == 0 and n < 0:
                    raise DomainError("negative power of zero in stem expression")
                d = n * u ** (n - 1) if n != 1 else 1 + 0j
                return u**n, d * ux, d * uy
            if u == 0:
                raise DomainError("non-integer power of zero in stem expression")
            lu = np.log(u)
            w = complex(np.exp(v * lu))
            return w, w * (vx * lu + v * ux / u), w * (vy * lu + v * uy / u)
    raise TypeError(f"not an expression node: {node!r}")


def stem_from_expr(expr: StemExpr | str, domain: SymmetricDomain | None = None, name: str | None = None) -> StemFunction:
    """Real stem whose partials come from exact differentiation of ``expr``."""
    if isinstance(expr, str):
        expr = parse_stem_expr(expr)

    def values(x, y):
        w = expr.evaluate(x, y)
        return w.real, w.imag

    def partials(x, y):
        _, dx, dy = expr.evaluate_with_partials(x, y)
        return dx.real, dy.real, dx.imag, dy.imag

    return StemFunction(
        values, arity=expr.arity, algebra_dim=1, partials=partials, domain=domain, name=name or expr.to_text()
    )
