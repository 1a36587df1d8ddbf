"""A small expression language for convex functions, domains and immersions.

Grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := base ("^" power)?
    power  := "-"? pbase ("^" power)?          -- must be constant
    base   := literal | ident | "(" expr ")" | func "(" expr ")"
    func   := ln | exp | sqrt | sin | cos | sinh | cosh
    ident  := "x" digits | "u" digits | "t"

``t`` is coordinate 1 and ``u2, u3, ...`` are coordinates 2, 3, ..., which is
convenient for writing parametrizations in ``(t, u2, ..., un)``.

Exponents are folded to a float at parse time, so ``x1^(1/2)`` is fine while
``x1^x2`` is rejected.  Trees are immutable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import DomainViolation, EvaluationError, InputError

__all__ = [
    "Const", "Var", "Unary", "Binary", "Pow", "Expression",
    "ParseError", "ExprSyntaxError", "UnknownIdentifier", "VariableIndexError",
    "NonConstantExponent",
    "parse", "to_source", "evaluate", "evaluate_mp", "compile_stack", "run_stack",
    "variables", "max_index", "Domain", "ConvexFunction", "convex_function",
    "FUNCTIONS",
]

FUNCTIONS = ("ln", "exp", "sqrt", "sin", "cos", "sinh", "cosh")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based
    name: str = field(default="", compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of FUNCTIONS
    arg: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str  # "+", "-", "*", "/"
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: float


Expression = Union[Const, Var, Unary, Binary, Pow]


class ParseError(InputError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class VariableIndexError(ParseError):
    pass


class NonConstantExponent(ParseError):
    pass


# -- tokenizer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}",
                                  len(source[:pos].encode()))
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), len(source[:pos].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(source.encode())))
    return toks


_IDENT = re.compile(r"(x|u)(\d+)$")


class _Parser:
    def __init__(self, source: str, dim: int):
        self.toks = _tokenize(source)
        self.i = 0
        self.dim = dim

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.tok.offset)

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.accept("-"):
            return Unary("neg", self.unary())
        return self.factor()

    def factor(self) -> Expression:
        node = self.base()
        if self.accept("^"):
            node = Pow(node, self.power())
        return node

    def power(self) -> float:
        start = self.tok.offset
        negate = self.accept("-")
        node = self.base()
        if self.accept("^"):
            node = Pow(node, self.power())
        if variables(node):
            raise NonConstantExponent("exponent must be a constant", start)
        try:
            value = evaluate(node, ())
        except EvaluationError as exc:
            raise ExprSyntaxError(f"exponent does not evaluate: {exc}", start) from None
        return -value if negate else value

    def base(self) -> Expression:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            return self.variable(tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.offset)

    def variable(self, tok: _Tok) -> Var:
        if tok.text == "t":
            index = 1
        else:
            m = _IDENT.match(tok.text)
            if m is None:
                raise UnknownIdentifier(f"unknown identifier {tok.text!r}", tok.offset)
            index = int(m.group(2))
            if m.group(1) == "u" and index < 2:
                raise UnknownIdentifier(
                    f"{tok.text!r}: u-coordinates start at u2 (use t for the first)", tok.offset)
        if not 1 <= index <= self.dim:
            raise VariableIndexError(
                f"variable {tok.text!r} out of range for dimension {self.dim}", tok.offset)
        return Var(index, tok.text)


def parse(source: str, dim: int) -> Expression:
    """Parse ``source`` into an expression tree over ``dim`` coordinates."""
    if dim < 0:
        raise InputError(f"dimension must be non-negative, got {dim}")
    return _Parser(source, dim).parse()


# -- printing ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expression) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _wrap(node: Expression, min_prec: int) -> str:
    s = to_source(node)
    return f"({s})" if _prec(node) < min_prec else s


def _num(value: float) -> str:
    s = repr(float(value))
    return f"({s})" if value < 0 or s[0] == "-" else s


def to_source(node: Expression) -> str:
    """Render a tree back to grammar text; ``parse(to_source(e))`` equals ``e``."""
    if isinstance(node, Const):
        return _num(node.value)
    if isinstance(node, Var):
        return node.name or f"x{node.index}"
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, 3)
        return f"{node.op}({to_source(node.arg)})"
    if isinstance(node, Binary):
        p = _PREC[node.op]
        return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"
    if isinstance(node, Pow):
        return f"{_wrap(node.base, 5)}^{_num(node.exponent)}"
    raise TypeError(f"not an expression node: {node!r}")


def variables(node: Expression) -> set[int]:
    """Indices of the coordinates appearing in ``node``."""
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Unary):
        return variables(node.arg)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Pow):
        return variables(node.base)
    return set()


def max_index(node: Expression) -> int:
    return max(variables(node), default=0)


# -- evaluation ----------------------------------------------------------------

def _ln(x):
    if x <= 0:
        raise ValueError("logarithm of a non-positive number")
    return math.log(x)


def _sqrt(x):
    if x < 0:
        raise ValueError("square root of a negative number")
    return math.sqrt(x)


def _div(x, y):
    if y == 0:
        raise ValueError("division by zero")
    return x / y


def _pow(x, p):
    if x == 0 and p < 0:
        raise ValueError("zero raised to a negative power")
    if x < 0 and p != int(p):
        raise ValueError("negative base with non-integer exponent")
    return math.pow(x, p)


_FLOAT_UNARY = {
    "neg": lambda x: -x,
    "ln": _ln,
    "exp": math.exp,
    "sqrt": _sqrt,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
}

_FLOAT_BINARY = {
    "+": lambda x, y: x + y,
    "-": lambda x, y: x - y,
    "*": lambda x, y: x * y,
    "/": _div,
}


def _walk(node, point, unary, binary, power, const):
    if isinstance(node, Const):
        return const(node.value)
    if isinstance(node, Var):
        return point[node.index - 1]
    try:
        if isinstance(node, Unary):
            return unary[node.op](_walk(node.arg, point, unary, binary, power, const))
        if isinstance(node, Binary):
            x = _walk(node.left, point, unary, binary, power, const)
            y = _walk(node.right, point, unary, binary, power, const)
            return binary[node.op](x, y)
        if isinstance(node, Pow):
            return power(_walk(node.base, point, unary, binary, power, const), node.exponent)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(str(exc), to_source(node)) from None
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(expr: Expression, point: Sequence[float]) -> float:
    """Evaluate by walking the tree in double precision."""
    _check_point(expr, point)
    pt = [float(v) for v in point]
    return float(_walk(expr, pt, _FLOAT_UNARY, _FLOAT_BINARY, _pow, float))


def evaluate_mp(expr: Expression, point: Sequence, dps: int = 40, ctx=None):
    """Evaluate with mpmath at ``dps`` decimal digits; returns an ``mpf``.

    Used by the finite-difference oracle, whose fourth-order stencils lose
    about twelve digits to cancellation at ``h = 1e-3``.  The work runs in a
    private ``MPContext`` (or the one passed in) because changing the global
    ``mpmath.mp`` precision is not safe when threads share it.
    """
    import mpmath

    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = dps

    def mln(x):
        if x <= 0:
            raise ValueError("logarithm of a non-positive number")
        return ctx.log(x)

    def msqrt(x):
        if x < 0:
            raise ValueError("square root of a negative number")
        return ctx.sqrt(x)

    def mpow(x, p):
        if x == 0 and p < 0:
            raise ValueError("zero raised to a negative power")
        if x < 0 and p != int(p):
            raise ValueError("negative base with non-integer exponent")
        if p == int(p):
            return x ** int(p)
        return ctx.power(x, ctx.mpf(p))

    unary = {
        "neg": lambda x: -x, "ln": mln, "exp": ctx.exp, "sqrt": msqrt,
        "sin": ctx.sin, "cos": ctx.cos, "sinh": ctx.sinh, "cosh": ctx.cosh,
    }
    _check_point(expr, point)
    pt = [ctx.mpf(v) for v in point]
    return _walk(expr, pt, unary, _FLOAT_BINARY, mpow, ctx.mpf)


def _check_point(expr, point):
    need = max_index(expr)
    if len(point) < need:
        raise InputError(f"point has {len(point)} coordinates, expression needs {need}")


# -- stack machine (independent evaluator used to cross-check the tree walk) ---

def compile_stack(expr: Expression) -> tuple:
    """Flatten a tree into postfix instructions ``(opcode, argument)``."""
    code = []

    def emit(node):
        if isinstance(node, Const):
            code.append(("push", node.value))
        elif isinstance(node, Var):
            code.append(("load", node.index - 1))
        elif isinstance(node, Unary):
            emit(node.arg)
            code.append(("call", node.op))
        elif isinstance(node, Binary):
            emit(node.left)
            emit(node.right)
            code.append(("bin", node.op))
        elif isinstance(node, Pow):
            emit(node.base)
            code.append(("pow", node.exponent))
        else:
            raise TypeError(f"not an expression node: {node!r}")

    emit(expr)
    return tuple(code)


def run_stack(code: tuple, point: Sequence[float]) -> float:
    stack: list[float] = []
    push, pop = stack.append, stack.pop
    try:
        for opcode, arg in code:
            if opcode == "push":
                push(arg)
            elif opcode == "load":
                push(float(point[arg]))
            elif opcode == "call":
                x = pop()
                if arg == "neg":
                    push(-x)
                elif arg == "ln":
                    if x <= 0:
                        raise ValueError("logarithm of a non-positive number")
                    push(math.log(x))
                elif arg == "sqrt":
                    if x < 0:
                        raise ValueError("square root of a negative number")
                    push(math.sqrt(x))
                else:
                    push(getattr(math, arg)(x))
            elif opcode == "bin":
                y = pop()
                x = pop()
                if arg == "+":
                    push(x + y)
                elif arg == "-":
                    push(x - y)
                elif arg == "*":
                    push(x * y)
                else:
                    if y == 0:
                        raise ValueError("division by zero")
                    push(x / y)
            else:
                push(_pow(pop(), arg))
    except (ValueError, OverflowError) as exc:
        raise EvaluationError(str(exc)) from None
    (result,) = stack
    return result


# -- domains and convex functions ----------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Open set ``{x : h(x) > 0 for every h in constraints}``."""

    constraints: tuple = ()

    @classmethod
    def parse(cls, sources: Sequence[str], dim: int) -> "Domain":
        return cls(tuple(parse(s, dim) for s in sources))

    def margin(self, point: Sequence[float]) -> float:
        """Smallest constraint value; ``-inf`` if some constraint cannot be evaluated."""
        values = []
        for h in self.constraints:
            try:
                values.append(evaluate(h, point))
            except EvaluationError:
                return -math.inf
        return min(values, default=math.inf)

    def contains(self, point: Sequence[float]) -> bool:
        if not all(math.isfinite(v) for v in point):
            return False
        return self.margin(point) > 0

    def __str__(self):
        return " and ".join(f"{to_source(h)} > 0" for h in self.constraints) or "everywhere"


@dataclass(frozen=True)
class ConvexFunction:
    """A function body over ``dim`` coordinates restricted to an open domain.

    Strict convexity is not assumed; :meth:`is_convex_at` checks it.
    """

    dim: int
    body: Expression
    domain: Domain = Domain()
    name: str | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise InputError(f"dimension must be at least 1, got {self.dim}")
        for e in (self.body, *self.domain.constraints):
            if max_index(e) > self.dim:
                raise InputError(f"expression uses coordinates beyond dimension {self.dim}")

    @property
    def source(self) -> str:
        return to_source(self.body)

    def require_inside(self, point: Sequence[float]) -> None:
        if len(point) != self.dim:
            raise InputError(f"point has {len(point)} coordinates, expected {self.dim}")
        if not self.domain.contains(point):
            shown = ", ".join(f"{float(x):g}" for x in point)
            raise DomainViolation(f"point ({shown}) is outside the domain {self.domain}")

    def __call__(self, point: Sequence[float]) -> float:
        self.require_inside(point)
        return evaluate(self.body, point)

    def is_convex_at(self, point: Sequence[float]) -> bool:
        import numpy as np

        from .jets import taylor_jet

        h = taylor_jet(self.body, point, order=2).d2
        try:
            np.linalg.cholesky(h)
        except np.linalg.LinAlgError:
            return False
        return True


def convex_function(source: str, dim: int, domain: Sequence[str] = (),
                    name: str | None = None) -> ConvexFunction:
    """Build a :class:`ConvexFunction` from grammar text."""
    return ConvexFunction(dim, parse(source, dim), Domain.parse(domain, dim), name)
