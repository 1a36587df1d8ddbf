"""Geodesics of the Calabi metric and arc length up to the domain boundary.

Geodesics solve ``x'' + Gamma(x)[x', x'] = 0`` with the Hessian-metric
Christoffel symbols; RK4 is applied to the first-order system in
``(x, x')``.  :func:`length_to_boundary` measures the metric length of a
straight Euclidean segment that runs into the boundary, stopping where the
smallest domain inequality drops to ``eps``.  A length that keeps growing
like ``log(1/eps)`` is numerical evidence that the boundary is infinitely
far away; it is never treated as a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import connection_and_pick, metric_data
from .errors import EvaluationError, InputError, LeftDomain, NumericError
from .expr import ConvexFunction
from .jets import taylor_jet

__all__ = ["GeodesicPath", "geodesic", "LengthResult", "length_to_boundary", "romberg"]


@dataclass(frozen=True)
class GeodesicPath:
    s: np.ndarray
    position: np.ndarray  # (samples, n)
    velocity: np.ndarray
    speed: np.ndarray  # G-norm of the velocity
    arc_length: float
    speed_drift: float
    left_domain: bool = False

    @property
    def samples(self):
        return list(zip(self.s, self.position, self.velocity))

    @property
    def end(self) -> np.ndarray:
        return self.position[-1]


def _acceleration(f: ConvexFunction, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    if not f.domain.contains(x):
        raise LeftDomain("geodesic left the domain", None)
    jet = taylor_jet(f.body, x, order=3)
    gamma = connection_and_pick(jet, metric_data(jet)).Gamma
    return -np.einsum("kij,i,j->k", gamma, v, v)


def _speed(f: ConvexFunction, x: np.ndarray, v: np.ndarray) -> float:
    H = taylor_jet(f.body, x, order=2).d2
    return math.sqrt(max(float(v @ H @ v), 0.0))


def geodesic(f: ConvexFunction, start: Sequence[float], velocity: Sequence[float],
             s_end: float, step: float = 1e-3, raise_on_exit: bool = False) -> GeodesicPath:
    """Integrate the geodesic through ``start`` with initial ``velocity`` up to ``s_end``.

    If a step would leave the domain the path stops at the last interior
    sample with ``left_domain=True``; with ``raise_on_exit`` a
    :class:`LeftDomain` carrying that truncated path is raised instead.
    """
    x = np.asarray(start, dtype=float).copy()
    v = np.asarray(velocity, dtype=float).copy()
    if x.shape != (f.dim,) or v.shape != (f.dim,):
        raise InputError(f"start and velocity must have {f.dim} components")
    if not np.any(v):
        raise InputError("velocity must be nonzero")
    if not 0 < step <= 0.01:
        raise InputError("step must lie in (0, 0.01]")
    if s_end <= 0:
        raise InputError("s_end must be positive")
    f.require_inside(x)

    nsteps = max(1, int(round(s_end / step)))
    h = s_end / nsteps
    s_list, xs, vs, sp = [0.0], [x.copy()], [v.copy()], [_speed(f, x, v)]
    left = False
    for i in range(1, nsteps + 1):
        try:
            k1x, k1v = v, _acceleration(f, x, v)
            x2, v2 = x + 0.5 * h * k1x, v + 0.5 * h * k1v
            k2x, k2v = v2, _acceleration(f, x2, v2)
            x3, v3 = x + 0.5 * h * k2x, v + 0.5 * h * k2v
            k3x, k3v = v3, _acceleration(f, x3, v3)
            x4, v4 = x + h * k3x, v + h * k3v
            k4x, k4v = v4, _acceleration(f, x4, v4)
            xn = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            vn = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            if not f.domain.contains(xn):
                raise LeftDomain("geodesic left the domain", None)
            speed = _speed(f, xn, vn)
        except (LeftDomain, EvaluationError, NumericError):
            left = True
            break
        x, v = xn, vn
        s_list.append(i * h)
        xs.append(x.copy())
        vs.append(v.copy())
        sp.append(speed)

    speed = np.array(sp)
    s = np.array(s_list)
    arc = float(np.trapezoid(speed, s)) if s.size > 1 else 0.0
    path = GeodesicPath(s, np.array(xs), np.array(vs), speed, arc,
                        float(np.max(np.abs(speed - speed[0]))), left)
    if left and raise_on_exit:
        raise LeftDomain(f"geodesic left the domain after s = {s[-1]:.6g}", path)
    return path


# -- length to the boundary ----------------------------------------------------

@dataclass(frozen=True)
class LengthResult:
    length: float
    tau_boundary: float  # Euclidean distance to the boundary (or the cap)
    tau_end: float  # Euclidean distance actually integrated
    not_truncated: bool  # True when the ray never met the boundary within the cap
    evaluations: int


def romberg(func, a: float, b: float, rtol: float = 1e-8, max_levels: int = 20,
            min_levels: int = 4) -> tuple[float, int]:
    """Doubling trapezoid rule with Richardson extrapolation; returns (value, evaluations)."""
    h = b - a
    evals = 2
    prev_row = [0.5 * h * (func(a) + func(b))]
    for level in range(1, max_levels + 1):
        h *= 0.5
        count = 2 ** (level - 1)
        mids = a + h * (2 * np.arange(count) + 1)
        evals += count
        row = [0.5 * prev_row[0] + h * sum(func(m) for m in mids)]
        for j in range(1, level + 1):
            factor = 4.0**j
            row.append(row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0))
        if level >= min_levels and abs(row[-1] - prev_row[-1]) <= rtol * abs(row[-1]):
            return row[-1], evals
        prev_row = row
    raise NumericError(f"quadrature did not reach rtol {rtol:g} in {max_levels} levels")


def _bisect(g, lo: float, hi: float, iters: int = 200) -> float:
    """Last point where ``g`` is positive, for ``g(lo) > 0 >= g(hi)``."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def length_to_boundary(f: ConvexFunction, start: Sequence[float], direction: Sequence[float],
                       eps: float = 1e-6, cap: float = 100.0, rtol: float = 1e-8) -> LengthResult:
    """Calabi length of ``start + tau d`` (``|d| = 1``) until the domain margin reaches ``eps``.

    Near the boundary the integrand blows up like ``1 / distance``, so the
    integral is taken in ``sigma`` with ``tau = tau_b (1 - exp(-sigma))``,
    which makes a logarithmic singularity bounded.  If the ray never meets the
    boundary within ``cap``, the length over ``[0, cap]`` is reported with
    ``not_truncated=True``.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    x0 = np.asarray(start, dtype=float)
    d = np.asarray(direction, dtype=float)
    if x0.shape != (f.dim,) or d.shape != (f.dim,):
        raise InputError(f"start and direction must have {f.dim} components")
    norm = float(np.linalg.norm(d))
    if norm == 0:
        raise InputError("direction must be nonzero")
    d = d / norm
    f.require_inside(x0)

    def margin(tau):
        return f.domain.margin(x0 + tau * d)

    def speed(tau):
        H = taylor_jet(f.body, x0 + tau * d, order=2).d2
        return math.sqrt(max(float(d @ H @ d), 0.0))

    # bracket the boundary by doubling
    tau_hi = 1e-3
    while margin(tau_hi) > 0 and tau_hi < cap:
        tau_hi = min(2 * tau_hi, cap)
    if margin(tau_hi) > 0:
        value, evals = romberg(speed, 0.0, cap, rtol)
        return LengthResult(value, cap, cap, True, evals)

    tau_b = _bisect(margin, 0.0, tau_hi)
    if margin(0.0) <= eps:
        raise InputError("start is already within eps of the boundary")
    tau_eps = _bisect(lambda tau: margin(tau) - eps, 0.0, tau_b)
    sigma_end = -math.log1p(-tau_eps / tau_b)

    def integrand(sigma):
        rest = tau_b * math.exp(-sigma)
        return speed(tau_b - rest) * rest

    value, evals = romberg(integrand, 0.0, sigma_end, rtol)
    return LengthResult(value, tau_b, tau_eps, False, evals)
