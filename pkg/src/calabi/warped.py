"""Riccati flow of the warping function and the four explicit parametrizations.

Along the distinguished direction the function ``eta`` obeys
``eta' = 1 - eta^2`` and the warping function ``rho = exp(int eta)``; the
combination ``cbar = rho^2 (eta^2 - 1)`` is conserved and equals the
curvature of the fibre.  Its sign picks one of four hypersurfaces, each
given by an immersion in coordinates ``(t, u2, ..., un)``:

=============  =============  ====================  ==========================
case           fibre          warping ``rho``       graph (catalog entry)
=============  =============  ====================  ==========================
``sphere``     round sphere   ``sinh t``            ``sphere_case``
``flat_minus`` flat           ``exp(-t)``           ``thm13a``
``flat_plus``  flat           ``exp(t)``            ``thm13b``
``hyperbolic`` hyperbolic     ``cosh t``            ``hyperbolic_case``
=============  =============  ====================  ==========================

Each case stores a normalizing Calabi-affine map carrying the immersion onto
the catalog graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .catalog import get
from .errors import BlowUp, DomainViolation, InputError, UnknownEntry
from .expr import Expression, evaluate, parse
from .jets import taylor_jet
from .legendre import AffineTransform

__all__ = [
    "EtaTrajectory", "integrate_eta", "eta_closed_form", "ParamCase", "param_case",
    "CASES", "immersion_point", "graph_residual", "pullback_metric", "warped_metric",
    "expected_connection", "christoffel_from_metric", "pullback_cubic_form",
    "expected_cubic_form", "sample_params",
]

BLOWUP = 1e6


# -- the Riccati flow ----------------------------------------------------------

@dataclass(frozen=True)
class EtaTrajectory:
    t: np.ndarray
    eta: np.ndarray
    rho: np.ndarray
    cbar: np.ndarray
    step: float
    method: str = "rk4"

    @property
    def samples(self):
        return list(zip(self.t, self.eta, self.rho, self.cbar))

    @property
    def cbar_drift(self) -> float:
        return float(np.max(np.abs(self.cbar - self.cbar[0])))


def _rhs(eta, rho):
    return 1.0 - eta * eta, eta * rho


def integrate_eta(eta0: float, t_end: float, step: float = 1e-3) -> EtaTrajectory:
    """Classical RK4 for ``eta' = 1 - eta^2``, ``rho' = eta rho``, ``rho(0) = 1``."""
    if not 0 < step <= 0.01:
        raise InputError("step must lie in (0, 0.01]")
    if t_end < 0:
        raise InputError("t_end must be non-negative")
    nsteps = max(1, int(round(t_end / step)))
    h = t_end / nsteps if t_end > 0 else 0.0
    t = np.empty(nsteps + 1)
    eta = np.empty(nsteps + 1)
    rho = np.empty(nsteps + 1)
    e, r = float(eta0), 1.0
    t[0], eta[0], rho[0] = 0.0, e, r
    for i in range(1, nsteps + 1):
        k1e, k1r = _rhs(e, r)
        k2e, k2r = _rhs(e + 0.5 * h * k1e, r + 0.5 * h * k1r)
        k3e, k3r = _rhs(e + 0.5 * h * k2e, r + 0.5 * h * k2r)
        k4e, k4r = _rhs(e + h * k3e, r + h * k3r)
        e += h / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
        r += h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r)
        if not abs(e) <= BLOWUP:
            raise BlowUp(f"eta left [-{BLOWUP:g}, {BLOWUP:g}] near t = {i * h:.6g}")
        t[i], eta[i], rho[i] = i * h, e, r
    return EtaTrajectory(t, eta, rho, rho**2 * (eta**2 - 1.0), h)


def eta_closed_form(eta0: float, t):
    """Exact solution through ``eta(0) = eta0``: tanh, coth or constant branch."""
    t = np.asarray(t, dtype=float)
    if abs(eta0) < 1:
        return np.tanh(t + math.atanh(eta0))
    if abs(eta0) == 1:
        return np.full_like(t, float(eta0))
    return 1.0 / np.tanh(t + math.atanh(1.0 / eta0))


# -- parametrizations ----------------------------------------------------------

CASES = ("sphere", "flat_minus", "flat_plus", "hyperbolic")
_TARGET = {"sphere": "sphere_case", "flat_minus": "thm13a", "flat_plus": "thm13b",
           "hyperbolic": "hyperbolic_case"}


@dataclass(frozen=True)
class ParamCase:
    case: str
    n: int
    sources: tuple  # grammar text of x_1 .. x_{n+1}
    immersion: tuple  # parsed components
    target: str
    normalizer: AffineTransform

    @property
    def target_entry(self):
        return get(self.target, self.n)


def _sphere_components(n, radius, first, angle_funcs):
    """Polar-type coordinates; ``angle_funcs`` gives (sin-like, cos-like) for u2 and u>=3."""
    (s2, c2), (s, c) = angle_funcs
    comps = [f"{radius}*{c2}(u2)"]
    for k in range(2, n):
        prod = "*".join([f"{s2}(u2)"] + [f"{s}(u{i})" for i in range(3, k + 1)])
        comps.append(f"{radius}*{prod}*{c}(u{k + 1})")
    if n >= 2:
        prod = "*".join([f"{s2}(u2)"] + [f"{s}(u{i})" for i in range(3, n + 1)])
        comps.append(f"{radius}*{prod}")
    comps.append(first)
    return comps


def _components(case: str, n: int) -> list[str]:
    us = [f"u{k}" for k in range(2, n + 1)]
    sq = " + ".join(f"{u}^2" for u in us)
    if case == "sphere":
        return _sphere_components(n, "(0.5*exp(2*t) - 0.5)", "0.25*exp(2*t) - t/2",
                                  (("sin", "cos"), ("sin", "cos")))
    if case == "hyperbolic":
        return _sphere_components(n, "(0.5*exp(2*t) + 0.5)", "-0.25*exp(2*t) - t/2",
                                  (("sinh", "cosh"), ("sin", "cos")))
    if case == "flat_minus":
        return [f"2*({sq}) + exp(2*t)", *us, "-0.5*t"]
    if case == "flat_plus":
        return ["exp(2*t)", *(f"exp(2*t)*{u}" for u in us), f"0.5*exp(2*t)*({sq}) - t/2"]
    raise UnknownEntry(f"unknown case {case!r}; choose from {', '.join(CASES)}")


def _normalizer(case: str, n: int) -> AffineTransform:
    # Derived by matching each immersion against its graph; checked numerically in tests.
    base = np.eye(n)
    shift = np.zeros(n + 1)
    if case in ("sphere", "hyperbolic"):
        base *= 2.0
        shift[n] = -0.25
    elif case == "flat_minus":
        base[1:, 1:] *= 2.0
    return AffineTransform.calabi(base, translation=shift)


@lru_cache(maxsize=None)
def param_case(case: str, n: int) -> ParamCase:
    if n < 2:
        raise InputError("parametrizations need n >= 2")
    sources = tuple(_components(case, n))
    return ParamCase(case, n, sources, tuple(parse(s, n) for s in sources),
                     _TARGET[case], _normalizer(case, n))


def _as_case(case, n=None) -> ParamCase:
    if isinstance(case, ParamCase):
        return case
    return param_case(case, n)


def _check_params(pc: ParamCase, params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape != (pc.n,):
        raise InputError(f"expected {pc.n} parameters (t, u2, ..., u{pc.n})")
    if pc.case == "sphere" and p[0] <= 0:
        raise DomainViolation("sphere case needs t > 0")
    if pc.case == "hyperbolic" and pc.n >= 2 and p[1] <= 0:
        raise DomainViolation("hyperbolic case needs u2 > 0")
    return p


def sample_params(case, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Parameter points where the coordinate chart is regular."""
    pc = _as_case(case, n)
    lo = np.full(n, 0.2)
    hi = np.full(n, 1.4)
    if pc.case in ("flat_minus", "flat_plus"):
        lo[0], hi[0] = -0.8, 0.8
        lo[1:], hi[1:] = -1.0, 1.0
    elif pc.case == "sphere":
        lo[0], hi[0] = 0.2, 1.5
        lo[1:], hi[1:] = 0.3, 2.8
    else:
        lo[0], hi[0] = -0.8, 0.8
        lo[1], hi[1] = 0.2, 1.2
        lo[2:], hi[2:] = 0.3, 2.8
    return lo + (hi - lo) * rng.random((count, n))


def immersion_point(case, params: Sequence[float], n: int | None = None) -> np.ndarray:
    """Position vector in R^{n+1} at ``params = (t, u2, ..., un)``."""
    pc = _as_case(case, n if n is not None else len(params))
    p = _check_params(pc, params)
    return np.array([evaluate(e, p) for e in pc.immersion])


def _normalized(pc: ParamCase, p) -> tuple[np.ndarray, np.ndarray]:
    """Normalized point and the Jacobian of its base coordinates in the parameters."""
    rows = [taylor_jet(e, p, order=1) for e in pc.immersion]
    x = np.array([r.value for r in rows])
    J = np.array([r.d1 for r in rows])
    M = pc.normalizer.matrix
    return pc.normalizer(x), (M @ J)[: pc.n]


def graph_residual(case, params: Sequence[float], n: int | None = None) -> float:
    """``|x~_{n+1} - f(x~_1..x~_n)|`` after normalizing the immersion point."""
    pc = _as_case(case, n if n is not None else len(params))
    p = _check_params(pc, params)
    xt = pc.normalizer(np.array([evaluate(e, p) for e in pc.immersion]))
    f = pc.target_entry.function
    if not f.domain.contains(xt[:-1]):
        raise DomainViolation(f"normalized point {xt[:-1]} is outside the target domain")
    return abs(xt[-1] - evaluate(f.body, xt[:-1]))


def pullback_metric(case, params: Sequence[float], n: int | None = None) -> np.ndarray:
    """``J^T Hess f(x~) J``: the Calabi metric in the coordinates ``(t, u)``."""
    pc = _as_case(case, n if n is not None else len(params))
    p = _check_params(pc, params)
    xt, J = _normalized(pc, p)
    H = taylor_jet(pc.target_entry.function.body, xt[:-1], order=2).d2
    G = J.T @ H @ J
    return 0.5 * (G + G.T)


def pullback_cubic_form(case, params: Sequence[float], n: int | None = None) -> np.ndarray:
    """Mixed Fubini-Pick tensor ``A^a_bc`` in ``(t, u)`` coordinates, index order [a, b, c]."""
    pc = _as_case(case, n if n is not None else len(params))
    p = _check_params(pc, params)
    xt, J = _normalized(pc, p)
    jet = taylor_jet(pc.target_entry.function.body, xt[:-1], order=3)
    A = -0.5 * jet.d3.dense()
    Ap = np.einsum("ijk,ia,jb,kc->abc", A, J, J, J)
    G = J.T @ jet.d2 @ J
    return np.einsum("ad,dbc->abc", np.linalg.inv(G), Ap)


# -- closed forms of the warped metrics and their connections ------------------

def _fibre_factors(case: str, u: np.ndarray) -> np.ndarray:
    """Coefficients of du_k^2 in the unit fibre metric, k = 2..n."""
    m = len(u)
    h = np.ones(m)
    for k in range(1, m):
        if case == "sphere":
            h[k] = np.prod(np.sin(u[:k]) ** 2)
        elif case == "hyperbolic":
            h[k] = np.sinh(u[0]) ** 2 * np.prod(np.sin(u[1:k]) ** 2)
    return h


def _rho(case: str, t: float) -> tuple[float, float]:
    """Warping function and its derivative."""
    if case == "sphere":
        return math.sinh(t), math.cosh(t)
    if case == "hyperbolic":
        return math.cosh(t), math.sinh(t)
    if case == "flat_minus":
        return math.exp(-t), -math.exp(-t)
    return math.exp(t), math.exp(t)


def warped_metric(case: str, params: Sequence[float]) -> np.ndarray:
    """``dt^2 + rho(t)^2 G_fibre`` as a diagonal matrix."""
    p = np.asarray(params, dtype=float)
    rho, _ = _rho(case, p[0])
    return np.diag(np.concatenate([[1.0], rho**2 * _fibre_factors(case, p[1:])]))


def christoffel_from_metric(metric, params: Sequence[float], h: float = 1e-5) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[a, b, c]`` of a metric field, by central differences."""
    p = np.asarray(params, dtype=float)
    n = p.size
    dg = np.empty((n, n, n))  # dg[d] = d metric / d p_d
    for d in range(n):
        e = np.zeros(n)
        e[d] = h
        dg[d] = (metric(p + e) - metric(p - e)) / (2 * h)
    ginv = np.linalg.inv(metric(p))
    # lower[d, b, c] = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("ad,dbc->abc", ginv, lower)


def expected_connection(case: str, params: Sequence[float]) -> np.ndarray:
    """Christoffel symbols written out entry by entry for each warped metric.

    Index 0 is ``t``; index ``k - 1`` is ``u_k``.
    """
    p = np.asarray(params, dtype=float)
    n = p.size
    t = p[0]
    G = np.zeros((n, n, n))

    def put(a, b, c, v):
        G[a, b, c] = v
        G[a, c, b] = v

    rho, drho = _rho(case, t)
    if case in ("flat_minus", "flat_plus"):
        for k in range(1, n):
            put(k, 0, k, drho / rho)
            put(0, k, k, -drho * rho)
        return G

    sc = math.sinh(t) * math.cosh(t)
    u = p  # u[k-1] is u_k
    if case == "sphere":
        for k in range(1, n):
            put(k, 0, k, 1.0 / math.tanh(t))
        for k in range(1, n):
            for j in range(k + 1, n):
                put(j, k, j, 1.0 / math.tan(u[k]))
        for k in range(1, n):
            pre = np.prod(np.sin(u[1:k]) ** 2)
            put(0, k, k, -sc * pre)
            for j in range(1, k):
                put(j, k, k, -0.5 * math.sin(2 * u[j]) * np.prod(np.sin(u[j + 1:k]) ** 2))
        return G

    if case == "hyperbolic":
        for k in range(1, n):
            put(k, 0, k, math.tanh(t))
        put(0, 1, 1, -sc)
        for k in range(2, n):
            put(k, 1, k, 1.0 / math.tanh(u[1]))
        for k in range(2, n):
            for j in range(k + 1, n):
                put(j, k, j, 1.0 / math.tan(u[k]))
        for k in range(2, n):
            pre = np.prod(np.sin(u[2:k]) ** 2)
            put(0, k, k, -pre * sc * math.sinh(u[1]) ** 2)
            put(1, k, k, -pre * 0.5 * math.sinh(2 * u[1]))
            for j in range(2, k):
                put(j, k, k, -0.5 * math.sin(2 * u[j]) * np.prod(np.sin(u[j + 1:k]) ** 2))
        return G
    raise UnknownEntry(f"unknown case {case!r}")


def expected_cubic_form(case: str, params: Sequence[float]) -> np.ndarray:
    """Mixed Fubini-Pick tensor of the normalized frame: ``A(dt) dt = 2 dt``,
    ``A(dt) du = du``, ``A(du_k) du_k = G(du_k, du_k) dt``, all else zero."""
    g = np.diag(warped_metric(case, params))
    n = g.size
    A = np.zeros((n, n, n))
    A[0, 0, 0] = 2.0
    for k in range(1, n):
        A[k, 0, k] = A[k, k, 0] = 1.0
        A[0, k, k] = g[k]
    return A
