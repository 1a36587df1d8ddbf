"""Calabi metric, Fubini-Pick tensor and curvature of a graph hypersurface.

Everything is computed in the affine coordinates of the graph ``x_{n+1} = f(x)``:

* metric ``G_ij = f_ij`` with inverse ``f^ij``, determinant ``D`` and
  cofactor matrix ``F^ij = D f^ij``;
* Levi-Civita Christoffels ``Gamma^k_ij = 1/2 f^kl f_ijl``;
* Fubini-Pick tensor ``A_ijk = -1/2 f_ijk``, Tchebychev field
  ``T^l = -1/(2n) f^kl f^ij f_ijk`` and relative Pick invariant ``J``;
* curvature ``R_ijkl = f^mh (A_jkm A_hil - A_ikm A_hjl)``.

The induced affine connection and the Weingarten tensor of the Calabi
normalization vanish identically, so they are not represented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegeneratePlane, NotConvexAtPoint
from .jets import Jet4

__all__ = [
    "MetricData", "ConnectionData", "CurvatureData",
    "metric_data", "connection_and_pick", "curvature", "sectional_curvature",
    "invariants",
]


@dataclass(frozen=True)
class MetricData:
    G: np.ndarray
    Ginv: np.ndarray
    detD: float
    cofactor: np.ndarray
    chol: np.ndarray  # lower factor, G = L L^T


@dataclass(frozen=True)
class ConnectionData:
    Gamma: np.ndarray  # Gamma[k, i, j]
    A: np.ndarray
    Tcheb: np.ndarray
    Tnorm2: float
    pickJ: float


@dataclass(frozen=True)
class CurvatureData:
    Riem: np.ndarray
    Ricci: np.ndarray
    scalar_contracted: float
    scalar_JT: float


def metric_data(jet: Jet4) -> MetricData:
    """Calabi metric of the jet's Hessian, via a Cholesky factorization."""
    G = 0.5 * (jet.d2 + jet.d2.T)
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise NotConvexAtPoint("Hessian is not positive definite at this point") from None
    diag = np.diag(L)
    if not np.all(diag > 0) or not np.all(np.isfinite(diag)):
        raise NotConvexAtPoint("Hessian is not positive definite at this point")
    Ginv = scipy.linalg.cho_solve((L, True), np.eye(jet.n))
    Ginv = 0.5 * (Ginv + Ginv.T)
    detD = float(np.prod(diag) ** 2)
    return MetricData(G, Ginv, detD, detD * Ginv, L)


def connection_and_pick(jet: Jet4, m: MetricData) -> ConnectionData:
    n = jet.n
    f3 = jet.d3.dense()
    Gi = m.Ginv
    Gamma = 0.5 * np.einsum("kl,ijl->kij", Gi, f3)
    A = -0.5 * f3
    T = -np.einsum("kl,ij,ijk->l", Gi, Gi, f3) / (2 * n)
    Tnorm2 = float(T @ m.G @ T)
    # full contraction of A with itself through the inverse metric
    normA2 = float(np.einsum("il,jp,kq,ijk,lpq->", Gi, Gi, Gi, A, A))
    pickJ = normA2 / (n * (n - 1)) if n > 1 else float("nan")
    return ConnectionData(Gamma, A, T, Tnorm2, pickJ)


def curvature(jet: Jet4, m: MetricData, c: ConnectionData) -> CurvatureData:
    n = jet.n
    A, Gi = c.A, m.Ginv
    # R_ijkl = f^{mh} (A_jkm A_hil - A_ikm A_hjl)
    AA = np.einsum("mh,jkm,hil->ijkl", Gi, A, A)
    Riem = AA - AA.transpose(1, 0, 2, 3)
    Ricci = np.einsum("jl,ijkl->ik", Gi, Riem)
    scalar = float(np.einsum("ik,ik->", Gi, Ricci))
    normA2 = float(np.einsum("il,jp,kq,ijk,lpq->", Gi, Gi, Gi, A, A))
    scalar_JT = normA2 - n * n * c.Tnorm2  # n(n-1) J - n^2 |T|^2
    return CurvatureData(Riem, 0.5 * (Ricci + Ricci.T), scalar, float(scalar_JT))


def sectional_curvature(cd: CurvatureData, m: MetricData, u, v) -> float:
    """Curvature of the plane spanned by ``u`` and ``v``.

    ``R(u, v, u, v) / (G(u,u) G(v,v) - G(u,v)^2)``; with this sign the
    hyperbolic examples come out at -1.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    gram = (u @ m.G @ u) * (v @ m.G @ v) - (u @ m.G @ v) ** 2
    if gram <= 1e-14:
        raise DegeneratePlane("vectors do not span a plane")
    return float(np.einsum("ijkl,i,j,k,l->", cd.Riem, u, v, u, v) / gram)


def invariants(jet: Jet4):
    """Convenience: ``(metric, connection, curvature)`` for one jet."""
    m = metric_data(jet)
    c = connection_and_pick(jet, m)
    return m, c, curvature(jet, m, c)
