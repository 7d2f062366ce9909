"""Operator-space expression trees.

Node kinds: Column(p), Row(p), Schatten(p), Tensor(children) for the
Haagerup tensor product, Interp(left, right, theta) for complex
interpolation, Dual(e), Opposite(e), VectorSchatten(p, e) for the
vector-valued Schatten space, and the Scalar unit.

Plain-text grammar (parse/pretty round-trip):

    C[p]   R[p]   S[p]   A (x) B   I[t]{A, B}   dual(A)   op(A)
    Sp[p]{A}   1

with exponents written as rationals ``a/b`` or ``inf``.  The Haagerup
product is associative, so ``Tensor`` is n-ary and nested tensors are
flattened at construction; the Scalar unit is dropped from products.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from opslab.calculus.exponents import Exponent, as_theta
from opslab.errors import InvalidParameter, ParseError

__all__ = [
    "SpaceExpr",
    "Column",
    "Row",
    "Schatten",
    "Tensor",
    "Interp",
    "Dual",
    "Opposite",
    "VectorSchatten",
    "Scalar",
    "SCALAR",
    "tensor",
    "parse_expr",
    "pretty",
    "subexpressions",
]


class SpaceExpr:
    """Base class; all nodes are frozen and hashable."""

    def children(self) -> tuple["SpaceExpr", ...]:
        return ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Column(SpaceExpr):
    p: Exponent

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.from_value(self.p))


@dataclass(frozen=True)
class Row(SpaceExpr):
    p: Exponent

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.from_value(self.p))


@dataclass(frozen=True)
class Schatten(SpaceExpr):
    p: Exponent

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.from_value(self.p))


@dataclass(frozen=True)
class Scalar(SpaceExpr):
    pass


SCALAR = Scalar()


@dataclass(frozen=True)
class Tensor(SpaceExpr):
    factors: tuple[SpaceExpr, ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise InvalidParameter("Haagerup tensor needs at least 2 factors")
        if any(not isinstance(f, SpaceExpr) for f in self.factors):
            raise InvalidParameter("tensor factors must be expressions")

    def children(self):
        return self.factors


@dataclass(frozen=True)
class Interp(SpaceExpr):
    left: SpaceExpr
    right: SpaceExpr
    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "theta", as_theta(self.theta))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Dual(SpaceExpr):
    inner: SpaceExpr

    def children(self):
        return (self.inner,)


@dataclass(frozen=True)
class Opposite(SpaceExpr):
    inner: SpaceExpr

    def children(self):
        return (self.inner,)


@dataclass(frozen=True)
class VectorSchatten(SpaceExpr):
    p: Exponent
    inner: SpaceExpr

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.from_value(self.p))

    def children(self):
        return (self.inner,)


def tensor(*factors: SpaceExpr) -> SpaceExpr:
    """Haagerup product: flattens nested tensors, drops Scalar units."""
    flat: list[SpaceExpr] = []
    for f in factors:
        if isinstance(f, Tensor):
            flat.extend(f.factors)
        elif isinstance(f, Scalar):
            continue
        else:
            flat.append(f)
    if not flat:
        return SCALAR
    if len(flat) == 1:
        return flat[0]
    return Tensor(tuple(flat))


def rebuild(expr: SpaceExpr, new_children: tuple[SpaceExpr, ...]) -> SpaceExpr:
    """Rebuild a node with replaced children (used by the rewriter)."""
    if isinstance(expr, Tensor):
        return tensor(*new_children)
    if isinstance(expr, Interp):
        return Interp(new_children[0], new_children[1], expr.theta)
    if isinstance(expr, Dual):
        return Dual(new_children[0])
    if isinstance(expr, Opposite):
        return Opposite(new_children[0])
    if isinstance(expr, VectorSchatten):
        return VectorSchatten(expr.p, new_children[0])
    if new_children:
        raise InvalidParameter(f"{type(expr).__name__} has no children")
    return expr


def subexpressions(expr: SpaceExpr):
    """Yield expr and every descendant, pre-order."""
    yield expr
    for child in expr.children():
        yield from subexpressions(child)


# --- pretty-printer ---------------------------------------------------------


def pretty(expr: SpaceExpr) -> str:
    if isinstance(expr, Column):
        return f"C[{expr.p}]"
    if isinstance(expr, Row):
        return f"R[{expr.p}]"
    if isinstance(expr, Schatten):
        return f"S[{expr.p}]"
    if isinstance(expr, Scalar):
        return "1"
    if isinstance(expr, Tensor):
        return " (x) ".join(pretty(f) for f in expr.factors)
    if isinstance(expr, Interp):
        return f"I[{expr.theta}]{{{pretty(expr.left)}, {pretty(expr.right)}}}"
    if isinstance(expr, Dual):
        return f"dual({pretty(expr.inner)})"
    if isinstance(expr, Opposite):
        return f"op({pretty(expr.inner)})"
    if isinstance(expr, VectorSchatten):
        return f"Sp[{expr.p}]{{{pretty(expr.inner)}}}"
    raise InvalidParameter(f"unknown node {expr!r}")


# --- parser -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<tensor>\(x\))|(?P<name>Sp|C|R|S|I|dual|op)|(?P<rat>\d+(?:/\d+)?|inf)"
    r"|(?P<punct>[\[\]{}(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.index += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> SpaceExpr:
        expr = self.parse_tensor()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return expr

    def parse_tensor(self) -> SpaceExpr:
        factors = [self.parse_atom()]
        while self.peek() is not None and self.peek()[0] == "tensor":
            self.next()
            factors.append(self.parse_atom())
        return tensor(*factors) if len(factors) > 1 else factors[0]

    def parse_exponent(self) -> Exponent:
        tok = self.next()
        if tok[0] != "rat":
            raise ParseError(f"expected an exponent, found {tok[1]!r}", tok[2])
        try:
            return Exponent.from_value(tok[1])
        except InvalidParameter as exc:
            raise ParseError(str(exc), tok[2]) from exc

    def parse_theta(self) -> Fraction:
        tok = self.next()
        if tok[0] != "rat" or tok[1] == "inf":
            raise ParseError(f"expected a rational in (0,1), found {tok[1]!r}", tok[2])
        try:
            return as_theta(Fraction(tok[1]))
        except InvalidParameter as exc:
            raise ParseError(str(exc), tok[2]) from exc

    def parse_atom(self) -> SpaceExpr:
        tok = self.next()
        kind, value, pos = tok
        if kind == "rat" and value == "1":
            return SCALAR
        if kind != "name":
            raise ParseError(f"expected an expression, found {value!r}", pos)
        if value in ("C", "R", "S"):
            self.expect("[")
            p = self.parse_exponent()
            self.expect("]")
            node = {"C": Column, "R": Row, "S": Schatten}[value]
            return node(p)
        if value == "Sp":
            self.expect("[")
            p = self.parse_exponent()
            self.expect("]")
            self.expect("{")
            inner = self.parse_tensor()
            self.expect("}")
            return VectorSchatten(p, inner)
        if value == "I":
            self.expect("[")
            theta = self.parse_theta()
            self.expect("]")
            self.expect("{")
            left = self.parse_tensor()
            self.expect(",")
            right = self.parse_tensor()
            self.expect("}")
            return Interp(left, right, theta)
        if value == "dual":
            self.expect("(")
            inner = self.parse_tensor()
            self.expect(")")
            return Dual(inner)
        if value == "op":
            self.expect("(")
            inner = self.parse_tensor()
            self.expect(")")
            return Opposite(inner)
        raise ParseError(f"unknown form {value!r}", pos)


def parse_expr(text: str) -> SpaceExpr:
    """Parse the plain-text grammar; raises ParseError with a position."""
    return _Parser(text).parse()
