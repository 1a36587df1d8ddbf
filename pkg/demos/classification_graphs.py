"""
Invariants of the four classification graphs
============================================

Four explicit graphs share the same pointwise cubic-form geometry: the
maximal value of ``A(u,u,u)`` over the unit sphere of the Calabi metric is 2,
the matrix ``A(e1)`` has eigenvalues 2, 1, ..., 1 and every sectional
curvature equals -1.  This demo measures all three at random interior points.
"""

# %%
# Setup
# -----

import numpy as np

from calabi import catalog
from calabi.core import invariants, sectional_curvature
from calabi.frames import theta_bruteforce, theta_max
from calabi.jets import jet4

rng = np.random.default_rng(0)
n = 3

# %%
# Cubic form maximum and its eigenframe
# -------------------------------------
# ``theta_max`` runs shifted power iteration with seeded restarts.  For n = 3
# a grid search over the unit sphere gives an independent value.

for name in catalog.CLASSIFICATION:
    entry = catalog.get(name, n)
    p = entry.sample(1, rng)[0]
    ej = theta_max(entry.function, p)
    grid = theta_bruteforce(entry.function, p)
    print(f"{name:16s} theta {ej.theta:.10f}  grid {grid:.6f}  spectrum {np.round(ej.spectrum, 8)}")

# %%
# Norms and curvature
# -------------------
# The Tchebychev norm and the Pick invariant are the constants ``(n+1)^2/n^2``
# and ``(3n+1)/(n(n-1))``; the sectional curvature of random planes is -1.

for name in catalog.CLASSIFICATION:
    entry = catalog.get(name, n)
    p = entry.sample(1, rng)[0]
    m, c, cd = invariants(jet4(entry.function.body, p))
    u, v = rng.standard_normal((2, n))
    K = sectional_curvature(cd, m, u, v)
    print(f"{name:16s} |T|^2 {c.Tnorm2:.12f}  J {c.pickJ:.12f}  K {K:+.12f}")
print("expected      |T|^2", (n + 1) ** 2 / n**2, " J", (3 * n + 1) / (n * (n - 1)))

# %%
# A generic convex function for contrast
# --------------------------------------
# Away from the catalog the invariants vary from point to point.

from calabi.expr import convex_function

f = convex_function("exp(x1 + 0.3*x2) + x1^2 + 2*x2^2 + exp(0.5*x3 - x1) + x3^2", 3)
for p in ([0.2, -0.3, 0.4], [-0.5, 0.5, 0.1]):
    _, c, _ = invariants(jet4(f.body, p))
    print(p, "theta", round(theta_max(f, p).theta, 6), "J", round(c.pickJ, 6))
