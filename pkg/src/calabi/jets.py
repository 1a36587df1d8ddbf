"""Fourth-order jets of expressions.

:func:`jet4` pushes the point through the expression tree in truncated
multivariate polynomial arithmetic (total degree <= 4), so every mixed
partial comes out of one pass.  Elementary functions are composed through
their univariate Taylor series.  :func:`finite_difference_jet` is an
independent oracle built from central-difference stencils evaluated in
extended precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainViolation, EvaluationError, InputError
from .expr import Binary, Const, ConvexFunction, Expression, Pow, Unary, Var, to_source

__all__ = ["SymmetricTensor", "Jet4", "taylor_jet", "jet4", "finite_difference_jet",
           "relative_deviation"]

MAX_ORDER = 4


@lru_cache(maxsize=None)
def _index_layout(n: int, order: int):
    """Non-decreasing multi-indices of one order and their packed positions."""
    keys = list(itertools.combinations_with_replacement(range(n), order))
    pos = {k: i for i, k in enumerate(keys)}
    full = np.empty((n,) * order, dtype=np.intp)
    for idx in itertools.product(range(n), repeat=order):
        full[idx] = pos[tuple(sorted(idx))]
    return keys, pos, full


class SymmetricTensor:
    """Fully symmetric tensor stored once per non-decreasing multi-index.

    ``t[i, j, k]`` sorts the indices before the lookup, so every permutation
    reads the same cell.
    """

    __slots__ = ("n", "order", "data")

    def __init__(self, n: int, order: int, data):
        self.n = n
        self.order = order
        self.data = np.asarray(data, dtype=float)
        if self.data.shape != (len(_index_layout(n, order)[0]),):
            raise ValueError("packed data has the wrong length")

    def __getitem__(self, idx):
        return self.data[self.position(idx)]

    def position(self, idx) -> int:
        if len(idx) != self.order:
            raise IndexError(f"expected {self.order} indices")
        return _index_layout(self.n, self.order)[1][tuple(sorted(idx))]

    def keys(self):
        return _index_layout(self.n, self.order)[0]

    def dense(self) -> np.ndarray:
        return self.data[_index_layout(self.n, self.order)[2]]

    @classmethod
    def from_dense(cls, arr) -> "SymmetricTensor":
        arr = np.asarray(arr, dtype=float)
        n, order = arr.shape[0], arr.ndim
        keys = _index_layout(n, order)[0]
        return cls(n, order, [arr[k] for k in keys])

    def __repr__(self):
        return f"SymmetricTensor(n={self.n}, order={self.order})"


@dataclass(frozen=True)
class Jet4:
    """Value and partial derivatives up to ``order`` at one point.

    ``d2`` is a dense symmetric matrix; ``d3``/``d4`` are packed
    :class:`SymmetricTensor` objects (``None`` above the computed order).
    """

    n: int
    value: float
    d1: np.ndarray
    d2: np.ndarray
    d3: SymmetricTensor | None = None
    d4: SymmetricTensor | None = None
    order: int = 4

    def blocks(self):
        """Derivative blocks as dense arrays, order 1 upwards."""
        out = [self.d1, self.d2]
        for t in (self.d3, self.d4):
            if t is not None:
                out.append(t.dense())
        return out[: self.order]


# -- truncated polynomial arithmetic ------------------------------------------

class _Basis:
    """Monomials of total degree <= order in n variables, and their product table."""

    def __init__(self, n: int, order: int):
        self.n = n
        self.order = order
        self.keys = [()]
        for d in range(1, order + 1):
            self.keys.extend(itertools.combinations_with_replacement(range(n), d))
        self.pos = {k: i for i, k in enumerate(self.keys)}
        self.size = len(self.keys)
        self.degree = np.array([len(k) for k in self.keys])
        ii, jj, kk = [], [], []
        for i, a in enumerate(self.keys):
            for j, b in enumerate(self.keys):
                if len(a) + len(b) <= order:
                    ii.append(i)
                    jj.append(j)
                    kk.append(self.pos[tuple(sorted(a + b))])
        self.ii = np.array(ii, dtype=np.intp)
        self.jj = np.array(jj, dtype=np.intp)
        self.kk = np.array(kk, dtype=np.intp)
        # derivative = multi-index factorial * Taylor coefficient
        self.factorial = np.array(
            [math.prod(math.factorial(k.count(v)) for v in set(k)) for k in self.keys],
            dtype=float)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.bincount(self.kk, weights=a[self.ii] * b[self.jj], minlength=self.size)


@lru_cache(maxsize=None)
def _basis(n: int, order: int) -> _Basis:
    return _Basis(n, order)


def _compose(basis: _Basis, p: np.ndarray, series: Sequence[float]) -> np.ndarray:
    """Evaluate sum_k series[k] * (p - p0)^k by Horner in truncated arithmetic."""
    delta = p.copy()
    delta[0] = 0.0
    out = np.zeros(basis.size)
    out[0] = series[-1]
    for s in reversed(series[:-1]):
        out = basis.mul(out, delta)
        out[0] += s
    return out


def _series(op: str, x0: float, order: int) -> list[float]:
    """Taylor coefficients f^(k)(x0)/k! of a univariate elementary function."""
    fact = [math.factorial(k) for k in range(order + 1)]
    if op == "exp":
        e = math.exp(x0)
        return [e / fact[k] for k in range(order + 1)]
    if op == "ln":
        if x0 <= 0:
            raise ValueError("logarithm of a non-positive number")
        return [math.log(x0)] + [(-1) ** (k + 1) / (k * x0**k) for k in range(1, order + 1)]
    if op in ("sin", "cos"):
        s, c = math.sin(x0), math.cos(x0)
        cycle = [s, c, -s, -c] if op == "sin" else [c, -s, -c, s]
        return [cycle[k % 4] / fact[k] for k in range(order + 1)]
    if op in ("sinh", "cosh"):
        s, c = math.sinh(x0), math.cosh(x0)
        cycle = [s, c] if op == "sinh" else [c, s]
        return [cycle[k % 2] / fact[k] for k in range(order + 1)]
    if op == "sqrt":
        return _power_series(x0, 0.5, order)
    raise ValueError(f"unknown function {op!r}")


def _power_series(x0: float, p: float, order: int) -> list[float]:
    if x0 <= 0:
        raise ValueError("non-integer power needs a positive base for derivatives")
    out, coef = [], 1.0
    for k in range(order + 1):
        out.append(coef * x0 ** (p - k))
        coef *= (p - k) / (k + 1)
    return out


def _reciprocal(basis: _Basis, p: np.ndarray) -> np.ndarray:
    x0 = p[0]
    if x0 == 0:
        raise ValueError("division by zero")
    return _compose(basis, p, [(-1) ** k / x0 ** (k + 1) for k in range(basis.order + 1)])


def _int_power(basis: _Basis, p: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(basis.size)
    out[0] = 1.0
    base = p
    while k:
        if k & 1:
            out = basis.mul(out, base)
        k >>= 1
        if k:
            base = basis.mul(base, base)
    return out


def _propagate(node: Expression, basis: _Basis, seeds) -> np.ndarray:
    if isinstance(node, Const):
        out = np.zeros(basis.size)
        out[0] = node.value
        return out
    if isinstance(node, Var):
        return seeds[node.index - 1]
    try:
        if isinstance(node, Unary):
            a = _propagate(node.arg, basis, seeds)
            if node.op == "neg":
                return -a
            return _compose(basis, a, _series(node.op, a[0], basis.order))
        if isinstance(node, Binary):
            a = _propagate(node.left, basis, seeds)
            b = _propagate(node.right, basis, seeds)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return basis.mul(a, b)
            return basis.mul(a, _reciprocal(basis, b))
        if isinstance(node, Pow):
            a = _propagate(node.base, basis, seeds)
            p = node.exponent
            if p == int(p) and abs(p) <= 64:
                k = int(p)
                if k >= 0:
                    return _int_power(basis, a, k)
                return _int_power(basis, _reciprocal(basis, a), -k)
            return _compose(basis, a, _power_series(a[0], p, basis.order))
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(str(exc), to_source(node)) from None
    raise TypeError(f"not an expression node: {node!r}")


def _as_expression(f) -> Expression:
    return f.body if isinstance(f, ConvexFunction) else f


def taylor_jet(expr, point: Sequence[float], order: int = MAX_ORDER) -> Jet4:
    """Derivatives of ``expr`` at ``point`` up to ``order`` (at most 4)."""
    if not 1 <= order <= MAX_ORDER:
        raise InputError(f"jet order must be in 1..{MAX_ORDER}")
    expr = _as_expression(expr)
    x = np.asarray(point, dtype=float)
    n = x.size
    if n == 0:
        raise InputError("empty point")
    basis = _basis(n, order)
    seeds = []
    for k in range(n):
        s = np.zeros(basis.size)
        s[0] = x[k]
        s[basis.pos[(k,)]] = 1.0
        seeds.append(s)
    try:
        c = _propagate(expr, basis, seeds)
    except IndexError:
        raise InputError(f"expression uses coordinates beyond dimension {n}") from None
    c = c * basis.factorial
    return _jet_from_flat(n, order, c)


def _jet_from_flat(n: int, order: int, c: np.ndarray) -> Jet4:
    sizes = [math.comb(n + d - 1, d) for d in range(order + 1)]
    offs = np.cumsum([0] + sizes)
    d1 = c[offs[1]:offs[2]].copy()
    d2 = np.zeros((n, n))
    if order >= 2:
        d2 = SymmetricTensor(n, 2, c[offs[2]:offs[3]]).dense()
    d3 = SymmetricTensor(n, 3, c[offs[3]:offs[4]]) if order >= 3 else None
    d4 = SymmetricTensor(n, 4, c[offs[4]:offs[5]]) if order >= 4 else None
    return Jet4(n, float(c[0]), d1, d2, d3, d4, order)


def jet4(expr, point: Sequence[float]) -> Jet4:
    """Full fourth-order jet; accepts an expression or a ConvexFunction."""
    return taylor_jet(expr, point, MAX_ORDER)


# -- finite-difference oracle --------------------------------------------------

# second-order-accurate central stencils for d^m/dx^m, as {offset: weight}
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def finite_difference_jet(f, point: Sequence[float], h: float = 1e-3, dps: int = 40) -> Jet4:
    """Jet from tensor-product central differences (error O(h^2) per block).

    Samples are evaluated with mpmath at ``dps`` digits so the stencils'
    cancellation does not swamp the truncation error.  When ``f`` is a
    :class:`ConvexFunction` every sample must lie inside its domain.
    """
    import mpmath

    from .expr import evaluate_mp

    if h <= 0:
        raise InputError("step h must be positive")
    expr = _as_expression(f)
    domain = f.domain if isinstance(f, ConvexFunction) else None
    x = [float(v) for v in point]
    n = len(x)
    cache = {}

    ctx = mpmath.MPContext()
    ctx.dps = dps
    hm = ctx.mpf(h)
    xm = [ctx.mpf(v) for v in x]

    def sample(offset):
        val = cache.get(offset)
        if val is None:
            pt = [xm[k] + offset[k] * hm for k in range(n)]
            if domain is not None and not domain.contains([float(p) for p in pt]):
                raise DomainViolation(f"stencil point {[float(p) for p in pt]} left the domain")
            val = cache[offset] = evaluate_mp(expr, pt, ctx=ctx)
        return val

    value = sample((0,) * n)
    blocks = []
    for order in range(1, MAX_ORDER + 1):
        keys = _index_layout(n, order)[0]
        packed = []
        for key in keys:
            counts = [key.count(v) for v in range(n)]
            acc = ctx.mpf(0)
            for combo in itertools.product(*(_STENCILS[m].items() for m in counts)):
                w = 1.0
                offset = []
                for o, wk in combo:
                    offset.append(o)
                    w *= wk
                acc += w * sample(tuple(offset))
            packed.append(float(acc / hm**order))
        blocks.append(packed)

    c1 = np.array(blocks[0])
    d2 = SymmetricTensor(n, 2, blocks[1]).dense()
    return Jet4(n, float(value), c1, d2, SymmetricTensor(n, 3, blocks[2]),
                SymmetricTensor(n, 4, blocks[3]), MAX_ORDER)


def relative_deviation(a: Jet4, b: Jet4) -> float:
    """Largest entrywise gap between two jets, each block scaled by its largest entry of ``a``."""
    worst = abs(a.value - b.value) / max(abs(a.value), 1.0)
    for x, y in zip(a.blocks(), b.blocks()):
        scale = float(np.max(np.abs(x)))
        gap = float(np.max(np.abs(x - y)))
        worst = max(worst, gap / scale if scale > 0 else gap)
    return worst
