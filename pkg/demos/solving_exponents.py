"""
Which powers of the Hessian determinant solve the equation
==========================================================

For a convex ``f`` write ``D = det(D^2 f)`` and ``w = D^a``.  The fourth-order
equation ``f^ij w_ij = 0`` picks out special exponents ``a``.  This demo
evaluates the residual for the log-paraboloid and its partner over a sweep of
exponents and shows the sweep bottoming out at ``-n/(n+1)`` and ``-1/(n+1)``.
"""

# %%
# Two graphs and their exponents
# ------------------------------
# The catalog stores each function with its domain and the exponent it is
# expected to solve.  We use ``n = 3`` and one interior point per function.

from fractions import Fraction

import numpy as np

from calabi import catalog
from calabi.pde import exponent_window, in_window, pde_report

n = 3
log_paraboloid = catalog.get("thm13a", n)
partner = catalog.get("thm13b", n)
point_a = np.array([2.0, 0.4, -0.3])
point_b = np.array([1.5, 0.2, 0.7])
for entry in (log_paraboloid, partner):
    print(entry.name, entry.function.source, "| a =", entry.expected["solving_exponent"].value)

# %%
# Sweep the exponent
# ------------------
# The raw residual ``f^ij w_ij`` vanishes only at the solving exponent.  The
# normalized residual divides by the size of the terms that cancel.

grid = np.linspace(-1.2, -0.05, 24)
for a in grid:
    ra = pde_report(log_paraboloid.function, point_a, a).normalized_residual
    rb = pde_report(partner.function, point_b, a).normalized_residual
    print(f"a = {a:+.3f}   log-paraboloid {ra:+.2e}   partner {rb:+.2e}")

# %%
# At the exact exponents
# ----------------------
# The residual drops to rounding level.

print(pde_report(log_paraboloid.function, point_a, -n / (n + 1)).normalized_residual)
print(pde_report(partner.function, point_b, -1 / (n + 1)).normalized_residual)

# %%
# The case a = -1
# ---------------
# With ``a = -1`` the companion operator ``F^ij w_ij`` (cofactor matrix in
# place of the inverse Hessian) gives minus the scalar curvature function,
# which is constant on both graphs.

print(pde_report(log_paraboloid.function, point_a, -1.0).implied_Lsharp, -4 * (n + 1))
print(pde_report(partner.function, point_b, -1.0).implied_Lsharp, -4 * n * (n + 1))

# %%
# Where the exponents sit
# -----------------------
# Outside a window around ``-1/2`` only quadratics can be complete solutions.
# Both exponents lie inside it; membership is decided in rational arithmetic.

for m in (2, 3, 10, 50):
    lo, hi = exponent_window(m)
    inside = in_window(Fraction(-m, m + 1), m) and in_window(Fraction(-1, m + 1), m)
    print(f"n = {m:2d}  window [{lo:+.4f}, {hi:+.4f}]  both exponents inside: {inside}")
