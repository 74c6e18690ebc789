"""Arithmetic expressions for right-hand sides f(t, x1, ..., xd).

Expressions are small immutable trees built from constants, the time
variable ``t``, state variables ``x1..xd``, the unary functions
``exp, log, sin, cos, tan, sqrt`` (plus negation) and the binary
operators ``+ - * / ^``.  Exponents must be constants, which keeps
symbolic differentiation closed on the grammar.

Grammar accepted by :func:`parse_expression`::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := '-' factor | power
    power    := base ('^' exponent)?
    exponent := ['-'] number | '(' constant-expr ')'
    base     := number | 't' | 'x' | 'x'<digits> | func '(' expr ')' | '(' expr ')'

Unary minus binds looser than ``^`` so ``-x^2`` means ``-(x^2)``.  A minus
sign written directly in front of a numeric literal produces a negative
constant (``-2`` is ``Constant(-2.0)``).

Evaluation works on floats and on numpy arrays alike, so a right-hand
side can be evaluated over a whole grid in one call.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

UNARY_OPS = ("neg", "exp", "log", "sin", "cos", "tan", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt")

_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


class ExpressionError(ValueError):
    """Base class for expression failures."""


class ParseError(ExpressionError):
    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        super().__init__(f"{message} at position {position} in {source!r}")


class EvaluationError(ExpressionError):
    """Domain fault while evaluating; ``location`` is the path to the node."""

    def __init__(self, message: str, location: str, node: "ExpressionNode"):
        self.location = location
        self.node = node
        super().__init__(f"{message} in '{to_string(node)}' (node {location})")


@dataclass(frozen=True)
class Constant:
    value: float

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class VarT:
    def __str__(self):
        return "t"


@dataclass(frozen=True)
class VarX:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Unary:
    op: str
    child: "ExpressionNode"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ExpressionError(f"unknown unary operator {self.op!r}")

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "ExpressionNode"
    right: "ExpressionNode"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ExpressionError(f"unknown binary operator {self.op!r}")
        if self.op == "pow" and not isinstance(self.right, Constant):
            raise ExpressionError("exponent must be a constant")

    def __str__(self):
        return to_string(self)


ExpressionNode = Union[Constant, VarT, VarX, Unary, Binary]


def max_var_index(e: ExpressionNode) -> int:
    """Largest ``x`` index used in ``e`` (0 when the state does not appear)."""
    if isinstance(e, VarX):
        return e.index
    if isinstance(e, Unary):
        return max_var_index(e.child)
    if isinstance(e, Binary):
        return max(max_var_index(e.left), max_var_index(e.right))
    return 0


def depends_on(e: ExpressionNode, index: int) -> bool:
    if isinstance(e, VarX):
        return e.index == index
    if isinstance(e, Unary):
        return depends_on(e.child, index)
    if isinstance(e, Binary):
        return depends_on(e.left, index) or depends_on(e.right, index)
    return False


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, dimension: int):
        self.source = source
        self.dimension = dimension
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self, offset: int = 0) -> tuple[str, str, int]:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.source, tok[2])

    def expect(self, text: str):
        tok = self.peek()
        if tok[1] != text or tok[0] != "op":
            self.error(f"expected {text!r}, found {tok[1] or 'end of input'!r}")
        self.advance()

    def parse(self) -> ExpressionNode:
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self) -> ExpressionNode:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = "add" if self.advance()[1] == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self) -> ExpressionNode:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = "mul" if self.advance()[1] == "*" else "div"
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> ExpressionNode:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            nxt = self.peek()
            if nxt[0] == "number" and self.peek(1)[1] != "^":
                self.advance()
                return Constant(-float(nxt[1]))
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> ExpressionNode:
        base = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            base = Binary("pow", base, self.exponent())
            if self.peek()[:2] == ("op", "^"):
                self.error("chained exponents need parentheses")
        return base

    def exponent(self) -> Constant:
        tok = self.peek()
        sign = 1.0
        if tok[:2] == ("op", "-"):
            self.advance()
            sign = -1.0
            tok = self.peek()
        if tok[0] == "number":
            self.advance()
            return Constant(sign * float(tok[1]))
        if tok[:2] == ("op", "(") and sign > 0:
            self.advance()
            inner = self.expr()
            self.expect(")")
            folded = simplify(inner)
            if not isinstance(folded, Constant):
                raise ParseError("non-constant exponent", self.source, tok[2])
            return folded
        raise ParseError("non-constant exponent", self.source, tok[2])

    def base(self) -> ExpressionNode:
        tok = self.peek()
        kind, text, where = tok
        if kind == "number":
            self.advance()
            return Constant(float(text))
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            self.advance()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text == "t":
                return VarT()
            if text == "x":
                if self.dimension != 1:
                    self.error("bare 'x' is ambiguous for a system; use x1..xd", tok)
                return VarX(1)
            m = re.fullmatch(r"x(\d+)", text)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.dimension:
                    self.error(
                        f"variable index {index} out of range 1..{self.dimension}", tok
                    )
                return VarX(index)
            self.error(f"unknown name {text!r}", tok)
        self.error(f"unexpected token {text or 'end of input'!r}", tok)


def parse_expression(source: str, dimension: int = 1) -> ExpressionNode:
    """Parse ``source`` into an expression tree over ``t, x1..x<dimension>``.

    For ``dimension == 1`` both ``x`` and ``x1`` denote the state; for
    systems only the indexed form is accepted.

    Raises
    ------
    ParseError
        On a syntax error, an out-of-range variable index or a
        non-constant exponent.  The error carries the offending position.
    """
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if not source or not source.strip():
        raise ParseError("empty expression", source, 0)
    return _Parser(source, dimension).parse()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _format_number(value: float) -> str:
    if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
        text = str(int(value))
        if value == 0 and math.copysign(1.0, value) < 0:
            text = "-0"
    else:
        text = repr(value)
    return f"({text})" if text.startswith("-") else text


def _prec(e: ExpressionNode) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return _PREC["neg"]
    return 5


def to_string(e: ExpressionNode) -> str:
    """Canonical text for ``e``; reparsing it gives a structurally equal tree."""
    if isinstance(e, Constant):
        return _format_number(e.value)
    if isinstance(e, VarT):
        return "t"
    if isinstance(e, VarX):
        return f"x{e.index}"
    if isinstance(e, Unary):
        if e.op != "neg":
            return f"{e.op}({to_string(e.child)})"
        child = to_string(e.child)
        # -(2) keeps a negated literal distinct from the literal -2
        if _prec(e.child) < _PREC["pow"] or child[0].isdigit():
            child = f"({child})"
        return f"-{child}"
    left, right = to_string(e.left), to_string(e.right)
    p = _PREC[e.op]
    if e.op == "pow":
        if _prec(e.left) < 5:
            left = f"({left})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p or _prec(e.right) == _PREC["neg"]:
        right = f"({right})"
    if p == 1:
        return f"{left} {_SYMBOLS[e.op]} {right}"
    return f"{left}{_SYMBOLS[e.op]}{right}"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_expression(e: ExpressionNode, t, x: Sequence = ()):
    """Evaluate ``e`` at time ``t`` and state ``x``.

    ``t`` and the entries of ``x`` may be floats or numpy arrays of a
    common shape; the result broadcasts accordingly.  Overflow follows
    IEEE semantics (``inf``), while domain faults (log of a non-positive
    number, sqrt of a negative one, division by zero, fractional power of
    a negative base) raise :class:`EvaluationError`.
    """
    with np.errstate(all="ignore"):
        return _eval(e, t, x, "root")


def _eval(e, t, x, path):
    if isinstance(e, Constant):
        return np.float64(e.value)
    if isinstance(e, VarT):
        return t
    if isinstance(e, VarX):
        if e.index > len(x):
            raise EvaluationError(
                f"state has {len(x)} components, needs x{e.index}", path, e
            )
        return x[e.index - 1]
    if isinstance(e, Unary):
        v = _eval(e.child, t, x, path + ".child")
        op = e.op
        if op == "neg":
            return np.negative(v)
        if op == "exp":
            return np.exp(v)
        if op == "log":
            if np.any(np.asarray(v) <= 0):
                raise EvaluationError("log of non-positive value", path, e)
            return np.log(v)
        if op == "sqrt":
            if np.any(np.asarray(v) < 0):
                raise EvaluationError("sqrt of negative value", path, e)
            return np.sqrt(v)
        if op == "sin":
            return np.sin(v)
        if op == "cos":
            return np.cos(v)
        return np.tan(v)
    a = _eval(e.left, t, x, path + ".left")
    if e.op == "pow":
        c = e.right.value
        if c != int(c) and np.any(np.asarray(a) < 0):
            raise EvaluationError("fractional power of negative value", path, e)
        if c < 0 and np.any(np.asarray(a) == 0):
            raise EvaluationError("division by zero", path, e)
        return np.power(a, c)
    b = _eval(e.right, t, x, path + ".right")
    if e.op == "add":
        return np.add(a, b)
    if e.op == "sub":
        return np.subtract(a, b)
    if e.op == "mul":
        return np.multiply(a, b)
    if np.any(np.asarray(b) == 0):
        raise EvaluationError("division by zero", path, e)
    return np.divide(a, b)


# ---------------------------------------------------------------------------
# Simplification and differentiation
# ---------------------------------------------------------------------------


def _is_const(e, value=None) -> bool:
    return isinstance(e, Constant) and (value is None or e.value == value)


def _fold(e: ExpressionNode) -> ExpressionNode:
    try:
        value = float(eval_expression(e, 0.0, ()))
    except EvaluationError:
        return e
    # + 0.0 drops the sign of a folded negative zero
    return Constant(value + 0.0) if math.isfinite(value) else e


def _simplify_once(e: ExpressionNode) -> ExpressionNode:
    if isinstance(e, Unary):
        child = _simplify_once(e.child)
        if e.op == "neg" and isinstance(child, Unary) and child.op == "neg":
            return child.child
        node = Unary(e.op, child)
        return _fold(node) if isinstance(child, Constant) else node
    if not isinstance(e, Binary):
        return e
    a, b = _simplify_once(e.left), _simplify_once(e.right)
    op = e.op
    if isinstance(a, Constant) and isinstance(b, Constant):
        folded = _fold(Binary(op, a, b))
        if isinstance(folded, Constant):
            return folded
    if op == "add":
        if _is_const(a, 0):
            return b
        if _is_const(b, 0):
            return a
    elif op == "sub":
        if _is_const(b, 0):
            return a
        if _is_const(a, 0):
            return Unary("neg", b)
    elif op == "mul":
        if _is_const(a, 0) or _is_const(b, 0):
            return Constant(0.0)
        if _is_const(a, 1):
            return b
        if _is_const(b, 1):
            return a
    elif op == "div":
        if _is_const(b, 1):
            return a
    elif op == "pow":
        if _is_const(b, 1):
            return a
        if _is_const(b, 0):
            return Constant(1.0)
    return Binary(op, a, b)


def simplify(e: ExpressionNode) -> ExpressionNode:
    """Constant folding and identity rewrites, repeated to a fixed point.

    Rewrites: ``0+e``, ``e+0``, ``e-0``, ``0-e -> -e``, ``e*1``, ``1*e``,
    ``e*0 -> 0``, ``e/1``, ``e^1``, ``e^0 -> 1``, ``-(-e) -> e``.  Folds are
    only applied when the constant result is finite and well-defined.
    """
    while True:
        s = _simplify_once(e)
        if s == e or repr(s) == repr(e):
            return s
        e = s


def _d(e: ExpressionNode, k: int) -> ExpressionNode:
    if isinstance(e, (Constant, VarT)):
        return Constant(0.0)
    if isinstance(e, VarX):
        return Constant(1.0 if e.index == k else 0.0)
    if isinstance(e, Unary):
        u = e.child
        du = _d(u, k)
        if e.op == "neg":
            return Unary("neg", du)
        if e.op == "exp":
            outer = e
        elif e.op == "log":
            return Binary("div", du, u)
        elif e.op == "sin":
            outer = Unary("cos", u)
        elif e.op == "cos":
            outer = Unary("neg", Unary("sin", u))
        elif e.op == "tan":
            outer = Binary("add", Constant(1.0), Binary("pow", e, Constant(2.0)))
        else:
            return Binary("div", du, Binary("mul", Constant(2.0), e))
        return Binary("mul", outer, du)
    u, v = e.left, e.right
    if e.op in ("add", "sub"):
        return Binary(e.op, _d(u, k), _d(v, k))
    if e.op == "mul":
        return Binary(
            "add", Binary("mul", _d(u, k), v), Binary("mul", u, _d(v, k))
        )
    if e.op == "div":
        numerator = Binary(
            "sub", Binary("mul", _d(u, k), v), Binary("mul", u, _d(v, k))
        )
        return Binary("div", numerator, Binary("pow", v, Constant(2.0)))
    c = v.value
    if c == 0:
        return Constant(0.0)
    power = Binary("pow", u, Constant(c - 1.0))
    return Binary("mul", Binary("mul", Constant(c), power), _d(u, k))


def differentiate(e: ExpressionNode, with_respect_to: int) -> ExpressionNode:
    """Exact partial derivative of ``e`` in ``x<with_respect_to>``, simplified."""
    if with_respect_to < 1:
        raise ValueError("variable index is 1-based")
    return simplify(_d(e, with_respect_to))
