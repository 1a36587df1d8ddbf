"""Pointwise Legendre transform and the Calabi-affine transformation group.

The group consists of affine maps ``X -> M X + b`` of R^{n+1} whose linear
part fixes the vertical vector ``Y = (0, ..., 0, 1)``, i.e. whose last
column is ``(0, ..., 0, 1)^T``.  Two graphs related by such a map share all
Calabi invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InputError
from .expr import ConvexFunction
from .jets import taylor_jet

__all__ = ["AffineTransform", "LegendrePair", "legendre_point", "duality_defect",
           "apply_affine", "is_calabi"]


@dataclass(frozen=True)
class AffineTransform:
    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        b = np.array(self.translation, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or b.shape != (M.shape[0],):
            raise DimensionMismatch("matrix must be square and match the translation")
        if abs(np.linalg.det(M)) <= 1e-12:
            raise InputError("affine transform is not invertible")
        M.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "translation", b)

    @property
    def dim(self) -> int:
        """Ambient dimension n + 1."""
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, ambient: int) -> "AffineTransform":
        return cls(np.eye(ambient), np.zeros(ambient))

    @classmethod
    def calabi(cls, base, shear=None, translation=None) -> "AffineTransform":
        """Assemble ``[[base, 0], [shear, 1]]`` with the given translation."""
        base = np.atleast_2d(np.asarray(base, dtype=float))
        n = base.shape[0]
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = base
        if shear is not None:
            M[n, :n] = shear
        M[n, n] = 1.0
        b = np.zeros(n + 1) if translation is None else translation
        return cls(M, b)

    def __call__(self, p) -> np.ndarray:
        return apply_affine(self, p)

    def compose(self, other: "AffineTransform") -> "AffineTransform":
        """``self after other``."""
        if other.dim != self.dim:
            raise DimensionMismatch("transforms act on different dimensions")
        return AffineTransform(self.matrix @ other.matrix,
                               self.matrix @ other.translation + self.translation)

    def inverse(self) -> "AffineTransform":
        Minv = np.linalg.inv(self.matrix)
        return AffineTransform(Minv, -Minv @ self.translation)


def apply_affine(tr: AffineTransform, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (tr.dim,):
        raise DimensionMismatch(f"point has shape {p.shape}, transform acts on R^{tr.dim}")
    return tr.matrix @ p + tr.translation


def is_calabi(tr: AffineTransform, tol: float = 0.0) -> bool:
    """True when the linear part fixes the vertical direction."""
    col = tr.matrix[:, -1]
    target = np.zeros(tr.dim)
    target[-1] = 1.0
    return bool(np.all(np.abs(col - target) <= tol))


@dataclass(frozen=True)
class LegendrePair:
    y: np.ndarray
    x: np.ndarray
    u_value: float


def legendre_point(f: ConvexFunction, y: Sequence[float]) -> LegendrePair:
    """``x = grad f(y)`` and ``u = <y, x> - f(y)``."""
    f.require_inside(y)
    jet = taylor_jet(f.body, y, order=1)
    y = np.asarray(y, dtype=float)
    x = jet.d1.copy()
    return LegendrePair(y, x, float(y @ x - jet.value))


def duality_defect(f: ConvexFunction, conjugate: ConvexFunction, y: Sequence[float]) -> float:
    """``max|Hf(y) Hc(x) - I| + |u(y) - c(x)|`` with ``x = grad f(y)``.

    Zero exactly when ``conjugate`` is the Legendre transform of ``f`` near ``y``.
    """
    pair = legendre_point(f, y)
    conjugate.require_inside(pair.x)
    Hf = taylor_jet(f.body, pair.y, order=2).d2
    cj = taylor_jet(conjugate.body, pair.x, order=2)
    prod = Hf @ cj.d2
    return float(np.max(np.abs(prod - np.eye(f.dim))) + abs(pair.u_value - cj.value))
