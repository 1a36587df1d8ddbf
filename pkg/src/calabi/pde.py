"""Fourth-order operators built on ``w = det(D^2 f)^a``.

``residual_12`` is the affine maximal type operator ``f^ij w_ij`` and
``residual_11`` the cofactor form ``F^ij w_ij``; the latter equals
``-L#`` in the Abreu-type equation ``F^ij w_ij = -L#``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import MetricData, metric_data
from .errors import BadDimension, InputError, ZeroExponent
from .expr import ConvexFunction
from .jets import Jet4, jet4

__all__ = [
    "PdeReport", "det_derivatives", "pde_report", "power_identity",
    "power_identity_coefficient", "exponent_window", "in_window",
]


@dataclass(frozen=True)
class PdeReport:
    a: float
    w: float
    D: float
    gradD: np.ndarray
    hessD: np.ndarray
    residual_12: float
    residual_11: float
    normalized_residual: float
    implied_Lsharp: float


def det_derivatives(jet: Jet4, m: MetricData | None = None):
    """``(D, grad D, Hess D)`` for ``D = det(f_ij)`` by Jacobi's formula.

    With ``P_i = f^kl f_kli``:  ``D_i = D P_i`` and
    ``D_ij = D (P_i P_j - f^kp f^lq f_pqj f_kli + f^kl f_klij)``.
    """
    if m is None:
        m = metric_data(jet)
    Gi = m.Ginv
    f3 = jet.d3.dense()
    f4 = jet.d4.dense()
    P = np.einsum("kl,kli->i", Gi, f3)
    M = np.einsum("kl,lpi->kpi", Gi, f3)  # f^kl f_lpi
    second = np.einsum("kpj,pki->ij", M, M)
    fourth = np.einsum("kl,klij->ij", Gi, f4)
    D = m.detD
    hess = D * (np.outer(P, P) - second + fourth)
    return D, D * P, 0.5 * (hess + hess.T)


def pde_report(f: ConvexFunction, point: Sequence[float], a: float) -> PdeReport:
    if a == 0:
        raise ZeroExponent()
    f.require_inside(point)
    jet = jet4(f.body, point)
    m = metric_data(jet)
    D, gD, hD = det_derivatives(jet, m)
    w = D**a
    first = a * (a - 1) * D ** (a - 2) * np.outer(gD, gD)
    second = a * D ** (a - 1) * hD
    w_ij = first + second
    r12 = float(np.sum(m.Ginv * w_ij))
    r11 = float(np.sum(m.cofactor * w_ij))
    # Size of w_ij before its two terms cancel: when w is affine in x (thm13b at
    # its exponent) w_ij is pure roundoff and cannot serve as the scale.
    scale = float(np.sum(np.abs(m.Ginv)) * np.max(np.abs(first) + np.abs(second)))
    normalized = r12 / scale if scale > 0 else 0.0
    return PdeReport(float(a), float(w), D, gD, hD, r12, r11, normalized, -r11)


def power_identity_coefficient(n: int, a):
    """``4(n+1)((n+1)a^2 + na)``; exact when ``a`` is a Fraction."""
    return 4 * (n + 1) * ((n + 1) * a * a + n * a)


def power_identity(n: int, a: float, point: Sequence[float]):
    """Compare ``f^ij (D^a)_ij`` with its closed form for the log-paraboloid.

    For ``f = -1/4 ln(x1 - sum_{k>=2} x_k^2 / 2)`` one has
    ``D = 1 / (4^n g^(n+1))`` and ``f^ij (D^a)_ij = coefficient(n, a) D^a``.
    Returns ``(lhs, rhs)``; the left side is computed numerically.
    """
    from .catalog import get

    f = get("thm13a", n).function
    lhs = pde_report(f, point, a).residual_12
    g = point[0] - 0.5 * sum(x * x for x in point[1:])
    D = 1.0 / (4.0**n * g ** (n + 1))
    return lhs, power_identity_coefficient(n, a) * D**a


def exponent_window(n: int) -> tuple[float, float]:
    """Closed interval ``-1/2 -+ (n-1)/(4 sqrt n)`` outside which completeness forces a quadratic."""
    if n < 2:
        raise BadDimension(f"window needs n >= 2, got {n}")
    half = (n - 1) / (4 * math.sqrt(n))
    return -0.5 - half, -0.5 + half


def in_window(a, n: int) -> bool:
    """Exact membership test, endpoints included.

    ``|a + 1/2| <= (n-1)/(4 sqrt n)``  is decided as
    ``16 n (a + 1/2)^2 <= (n-1)^2`` in rational arithmetic, so floats and
    Fractions alike are compared without rounding.
    """
    if n < 2:
        raise BadDimension(f"window needs n >= 2, got {n}")
    try:
        q = Fraction(a)
    except (TypeError, ValueError):
        raise InputError(f"exponent must be a finite real, got {a!r}") from None
    s = q + Fraction(1, 2)
    return 16 * n * s * s <= (n - 1) ** 2
