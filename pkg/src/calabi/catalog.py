"""Named convex functions with their domains and known invariants.

========================  =====================================================
name                      graph function
========================  =====================================================
``quadratic``             ``1/2 |x|^2`` (flat, all cubic invariants vanish)
``thm13a``                ``-1/4 ln(x1 - sum_{k>=2} x_k^2/2)``  (log-paraboloid)
``thm13b``                ``-1/4 ln x1 + sum_{k>=2} x_k^2/(2 x1)``  (its Legendre partner)
``sphere_case``           ``1/4 r - 1/4 ln(r + 1)``, ``r = |x|``
``hyperbolic_case``       ``-1/4 s - 1/4 ln(s - 1)``, ``s^2 = x1^2 - sum_{k>=2} x_k^2``
``dual59``                ``-1/4 [ln(-x1 - 1/2 sum_{k>=2} x_k^2) + ln 4 + 1]``
========================  =====================================================

The last five all have constant sectional curvature -1 and maximal cubic
form 2.  Every expected value carries a ``basis``: ``"stated"`` for values
given as closed-form results in the literature, ``"derived"`` for values we
worked out from those (e.g. through a Calabi-affine equivalence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownEntry, UnsupportedDimension
from .expr import ConvexFunction, convex_function
from .legendre import AffineTransform

__all__ = ["Expected", "CatalogEntry", "get", "names", "entries", "NON_QUADRATIC"]


@dataclass(frozen=True)
class Expected:
    value: float | None
    basis: str  # "stated" | "derived"
    note: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    n: int
    label: str
    function: ConvexFunction
    expected: dict = field(default_factory=dict)
    case: str | None = None  # warped parametrization landing on this graph
    equivalence: AffineTransform | None = None  # Calabi map onto another entry's graph
    equivalent_to: str | None = None
    box: tuple = ()
    min_margin: float = 1e-3

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Rejection-sample ``count`` interior points from the entry's box."""
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        out = []
        tries = 0
        while len(out) < count:
            tries += 1
            if tries > 1000 * count + 1000:
                raise RuntimeError(f"sampler for {self.name} rejects everything")
            p = lo + (hi - lo) * rng.random(self.n)
            if self.function.domain.margin(p) >= self.min_margin:
                out.append(p)
        return np.array(out)

    @property
    def param_case(self):
        if self.case is None:
            return None
        from .warped import param_case

        return param_case(self.case, self.n)


def _sum_sq(indices, scale="") -> str:
    return " + ".join(f"{scale}x{k}^2" for k in indices)


def _hyperbolic_expected(n: int, basis_theta: str, basis_tp: str) -> dict:
    return {
        "theta": Expected(2.0, basis_theta, "maximal cubic form"),
        "sectional": Expected(-1.0, basis_theta, "constant sectional curvature"),
        "Tnorm2": Expected((n + 1) ** 2 / n**2, basis_tp, "squared Tchebychev norm"),
        "pickJ": Expected((3 * n + 1) / (n * (n - 1)), basis_tp, "relative Pick invariant"),
        "spectrum": Expected(None, basis_tp, "eigenvalues 2, 1, ..., 1 at the Tchebychev direction"),
    }


def _quadratic(n):
    f = convex_function(f"0.5*({_sum_sq(range(1, n + 1))})", n, (), "quadratic")
    exp = {
        "Tnorm2": Expected(0.0, "stated", "flat"),
        "sectional": Expected(0.0, "stated", "flat"),
        "solving_exponent": Expected(None, "stated", "every exponent: the trivial solution"),
    }
    if n >= 2:
        exp["pickJ"] = Expected(0.0, "stated", "flat")
    return dict(label="elliptic paraboloid", function=f, expected=exp,
                box=([-2.0] * n, [2.0] * n))


def _thm13a(n):
    rest = range(2, n + 1)
    g = f"x1 - ({_sum_sq(rest)})/2"
    f = convex_function(f"-0.25*ln({g})", n, [g], "thm13a")
    exp = _hyperbolic_expected(n, "stated", "stated")
    exp["solving_exponent"] = Expected(-n / (n + 1), "stated", "affine maximal type exponent")
    exp["Lsharp_at_minus1"] = Expected(-4.0 * (n + 1), "stated", "Abreu scalar curvature")
    return dict(label="log-paraboloid, complete affine maximal type solution", function=f,
                expected=exp, case="flat_minus",
                box=([1.0] + [-1.0] * (n - 1), [4.0] + [1.0] * (n - 1)), min_margin=1.0)


def _thm13b(n):
    rest = range(2, n + 1)
    f = convex_function(f"-0.25*ln(x1) + ({_sum_sq(rest)})/(2*x1)", n, ["x1"], "thm13b")
    exp = _hyperbolic_expected(n, "stated", "derived")
    exp["solving_exponent"] = Expected(-1 / (n + 1), "stated", "affine maximal type exponent")
    exp["Lsharp_at_minus1"] = Expected(-4.0 * n * (n + 1), "stated", "Abreu scalar curvature")
    return dict(label="Legendre partner of the log-paraboloid", function=f, expected=exp,
                case="flat_plus", box=([0.8] + [-1.0] * (n - 1), [3.0] + [1.0] * (n - 1)),
                min_margin=0.8)


def _sphere(n):
    r = f"sqrt({_sum_sq(range(1, n + 1))})"
    f = convex_function(f"0.25*{r} - 0.25*ln({r} + 1)", n, [_sum_sq(range(1, n + 1))],
                        "sphere_case")
    return dict(label="positively curved fibre case (radial)", function=f,
                expected=_hyperbolic_expected(n, "stated", "derived"), case="sphere",
                box=([-2.0] * n, [2.0] * n), min_margin=0.5)


def _hyperbolic(n):
    q = "x1^2 - " + " - ".join(f"x{k}^2" for k in range(2, n + 1))
    s = f"sqrt({q})"
    f = convex_function(f"-0.25*{s} - 0.25*ln({s} - 1)", n, [f"{q} - 1"], "hyperbolic_case")
    exp = _hyperbolic_expected(n, "stated", "derived")
    exp["solving_exponent"] = Expected(None, "stated", "no exponent solves the equation")
    return dict(label="negatively curved fibre case (Lorentzian radial)", function=f,
                expected=exp, case="hyperbolic",
                box=([2.0] + [-1.0] * (n - 1), [6.0] + [1.0] * (n - 1)), min_margin=3.0)


def _dual59(n):
    rest = range(2, n + 1)
    arg = f"-x1 - 0.5*({_sum_sq(rest)})"
    f = convex_function(f"-0.25*(ln({arg}) + ln(4) + 1)", n, [arg], "dual59")
    exp = _hyperbolic_expected(n, "derived", "derived")
    exp["solving_exponent"] = Expected(-n / (n + 1), "derived", "via the reflection onto thm13a")
    exp["Lsharp_at_minus1"] = Expected(-4.0 * (n + 1), "derived", "via the reflection onto thm13a")
    base = np.eye(n)
    base[0, 0] = -1.0
    shift = np.zeros(n + 1)
    shift[n] = 0.25 * (math.log(4.0) + 1.0)
    eq = AffineTransform.calabi(base, translation=shift)
    return dict(label="closed-form Legendre transform of thm13b", function=f, expected=exp,
                equivalence=eq, equivalent_to="thm13a",
                box=([-4.0] + [-1.0] * (n - 1), [-1.2] + [1.0] * (n - 1)), min_margin=1.2)


_BUILDERS = {
    "quadratic": _quadratic,
    "thm13a": _thm13a,
    "thm13b": _thm13b,
    "sphere_case": _sphere,
    "hyperbolic_case": _hyperbolic,
    "dual59": _dual59,
}

NON_QUADRATIC = ("thm13a", "thm13b", "sphere_case", "hyperbolic_case", "dual59")
CLASSIFICATION = ("sphere_case", "thm13a", "thm13b", "hyperbolic_case")

_cache: dict = {}


def names() -> tuple:
    return tuple(_BUILDERS)


def get(name: str, n: int) -> CatalogEntry:
    """Instantiate catalog entry ``name`` in dimension ``n``."""
    if name not in _BUILDERS:
        raise UnknownEntry(f"unknown catalog entry {name!r}; choose from {', '.join(_BUILDERS)}")
    min_n = 1 if name == "quadratic" else 2
    if not isinstance(n, (int, np.integer)) or n < min_n or n > 8:
        raise UnsupportedDimension(f"{name} needs {min_n} <= n <= 8, got {n}")
    key = (name, int(n))
    if key not in _cache:
        _cache[key] = CatalogEntry(name=name, n=int(n), **_BUILDERS[name](int(n)))
    return _cache[key]


def entries(n: int, include_quadratic: bool = True):
    return [get(k, n) for k in _BUILDERS if include_quadratic or k != "quadratic"]
