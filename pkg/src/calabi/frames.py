"""Maximal cubic form on the metric unit sphere and the Ejiri eigen-split.

``theta(p) = max { A(u, u, u) : G(u, u) = 1 }``.  Writing ``G = L L^T`` and
``u = L^{-T} v`` turns the constraint into ``|v| = 1`` and the cubic form
into a symmetric tensor ``B`` on Euclidean space; :func:`theta_max` then runs
a shifted fixed-point (power) iteration ``v <- normalize(B[v, v, .] + s v)``
from several starts.  :func:`theta_bruteforce` scans an angular grid instead
and is only meant as a cross-check in dimensions 2 and 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import metric_data
from .errors import InputError, UnsupportedDimension, VanishingPick
from .expr import ConvexFunction
from .jets import taylor_jet

__all__ = ["EjiriData", "theta_max", "theta_bruteforce", "orthonormal_cubic"]

PICK_FLOOR = 1e-12


@dataclass(frozen=True)
class EjiriData:
    theta: float
    maximizer: np.ndarray  # G-unit
    lambda1: float
    spectrum: np.ndarray  # eigenvalues of u -> A(E1, u, .), E1 = T/|T|, descending
    maximizer_spectrum: np.ndarray  # eigenvalues on the complement of the maximizer
    iterations: int

    @property
    def mu(self) -> float:
        return self.lambda1 / 2


def orthonormal_cubic(f: ConvexFunction, point: Sequence[float]):
    """``(B, P, T)``: the cubic form in a G-orthonormal chart ``u = P v``, and T."""
    f.require_inside(point)
    jet = taylor_jet(f.body, point, order=3)
    m = metric_data(jet)
    A = -0.5 * jet.d3.dense()
    P = scipy.linalg.solve_triangular(m.chol, np.eye(jet.n), lower=True).T
    B = np.einsum("ijk,ia,jb,kc->abc", A, P, P, P)
    T = -np.einsum("kl,ij,ijk->l", m.Ginv, m.Ginv, jet.d3.dense()) / (2 * jet.n)
    return B, P, T, m


def _cubic(B, V):
    return np.einsum("nb,nbc,nc->n", V, np.tensordot(V, B, axes=(1, 0)), V)


def theta_max(f: ConvexFunction, point: Sequence[float], restarts: int = 16,
              seed: int = 42, tol: float = 1e-12, max_iter: int = 500) -> EjiriData:
    """Maximize the Fubini-Pick cubic form over the G-unit sphere at ``point``.

    The Tchebychev direction is always tried as one extra start; the other
    ``restarts`` starts are drawn from ``numpy.random.default_rng(seed)``.
    """
    if restarts < 8:
        raise InputError("theta_max needs at least 8 restarts")
    B, P, T, m = orthonormal_cubic(f, point)
    n = B.shape[0]
    normB = float(np.sqrt(np.sum(B * B)))
    if normB <= PICK_FLOOR:
        raise VanishingPick("Fubini-Pick tensor vanishes; theta is undefined")

    rng = np.random.default_rng(seed)
    starts = rng.standard_normal((restarts, n))
    Tnorm = float(np.sqrt(T @ m.G @ T))
    vT = None
    if Tnorm > PICK_FLOOR:
        vT = m.chol.T @ T / Tnorm
        starts = np.vstack([vT, starts])
    V = starts / np.linalg.norm(starts, axis=1, keepdims=True)

    # shift 2|B| makes the iteration monotone on the sphere
    shift = 2.0 * normB
    it = 0
    for it in range(1, max_iter + 1):
        G = np.tensordot(V, B, axes=(1, 0))
        W = np.einsum("nbc,nb->nc", G, V) + shift * V
        W /= np.linalg.norm(W, axis=1, keepdims=True)
        step = float(np.max(np.linalg.norm(W - V, axis=1)))
        V = W
        if step <= tol:
            break

    values = _cubic(B, V)
    best = int(np.argmax(values))
    v = V[best]
    if values[best] < 0:
        v = -v
    theta = float(np.einsum("abc,a,b,c->", B, v, v, v))

    # eigen-split at the maximizer: v itself carries theta, the rest lives on v-perp
    Sv = np.einsum("abc,a->bc", B, v)
    Q = scipy.linalg.null_space(v[None, :])
    rest = np.sort(np.linalg.eigvalsh(Q.T @ Sv @ Q))[::-1] if n > 1 else np.array([])

    e1 = vT if vT is not None else v
    spectrum = np.sort(np.linalg.eigvalsh(np.einsum("abc,a->bc", B, e1)))[::-1]
    return EjiriData(theta, P @ v, theta, spectrum, rest, it)


def theta_bruteforce(f: ConvexFunction, point: Sequence[float], resolution: int = 360,
                     refine: int = 4) -> float:
    """Grid maximum of the cubic form over the sphere (n = 2 or 3).

    ``resolution`` angular steps per coordinate, followed by ``refine``
    rounds of local grids (each 20x finer) around the best cells.
    """
    B, _, _, _ = orthonormal_cubic(f, point)
    n = B.shape[0]
    if n not in (2, 3):
        raise UnsupportedDimension("grid search is implemented for n = 2 and 3 only")
    if resolution < 360:
        raise InputError("resolution must be at least 360")

    if n == 2:
        def embed(angles):
            (phi,) = angles
            return np.stack([np.cos(phi), np.sin(phi)], axis=-1)

        axes = [np.linspace(0, 2 * np.pi, resolution, endpoint=False)]
        spacing = [2 * np.pi / resolution]
    else:
        def embed(angles):
            th, phi = angles
            s = np.sin(th)
            return np.stack([np.cos(th), s * np.cos(phi), s * np.sin(phi)], axis=-1)

        axes = [np.linspace(0, np.pi, resolution), np.linspace(0, 2 * np.pi, resolution,
                                                               endpoint=False)]
        spacing = [np.pi / (resolution - 1), 2 * np.pi / resolution]

    grid = np.meshgrid(*axes, indexing="ij")
    flat = [g.ravel() for g in grid]
    vals = _cubic(B, embed(flat))
    best = float(vals.max())
    top = np.argsort(vals)[-8:]
    centers = [np.array([a[i] for a in flat]) for i in top]
    for _ in range(refine):
        new_centers = []
        for c in centers:
            local = np.meshgrid(*[c[d] + np.linspace(-spacing[d], spacing[d], 41)
                                  for d in range(len(c))], indexing="ij")
            lf = [g.ravel() for g in local]
            lv = _cubic(B, embed(lf))
            k = int(np.argmax(lv))
            best = max(best, float(lv[k]))
            new_centers.append(np.array([a[k] for a in lf]))
        centers = new_centers
        spacing = [s / 20 for s in spacing]
    return best
