"""
Legendre duality and distance to the boundary
=============================================

The two log-type solutions are Legendre partners up to a reflection that
keeps the vertical direction fixed.  Both have domains with a finite
Euclidean boundary, yet metric lengths toward that boundary grow like
``(1/2) ln(1/eps)``: numerical evidence, not a proof, that the boundary is at
infinite Calabi distance.
"""

# %%
# Pointwise Legendre transform
# ----------------------------
# ``x = grad f(y)`` and ``u = <y, x> - f(y)``.  The defect measures how far a
# candidate conjugate is from matching value and inverse Hessian at ``x``.

import math

import numpy as np

from calabi import catalog
from calabi.geodesics import geodesic, length_to_boundary
from calabi.legendre import duality_defect, is_calabi, legendre_point

f = catalog.get("thm13b", 2).function
conj = catalog.get("dual59", 2)
pair = legendre_point(f, [1.0, 0.0])
print("x =", pair.x, " u =", pair.u_value)
print("defect against the stored conjugate:", duality_defect(f, conj.function, [1.0, 0.0]))

# %%
# The reflection back to the log-paraboloid
# -----------------------------------------
# The conjugate's domain has ``x1 < 0``.  Flipping ``x1`` and shifting the
# height is an equiaffine map that fixes the vertical, and it carries the
# conjugate graph onto the log-paraboloid.

target = catalog.get(conj.equivalent_to, 2).function
print("map fixes the vertical and has det 1:", is_calabi(conj.equivalence))
for x in conj.sample(3, np.random.default_rng(2)):
    image = conj.equivalence(np.append(x, conj.function(x)))
    print(image[-1] - target(image[:-1]))

# %%
# A closed-form geodesic
# ----------------------
# On the axis of the log-paraboloid the geodesic from ``(1, 0)`` with
# velocity ``(2, 0)`` is ``x1 = exp(2 s)``.

path = geodesic(target, [1.0, 0.0], [2.0, 0.0], 1.0)
print("x1(1) =", path.end[0], " exp(2) =", math.exp(2.0), " speed drift", path.speed_drift)

# %%
# Length toward the boundary
# --------------------------
# The ray from ``(1, 0)`` toward ``x1 = 0`` stops where the domain margin
# reaches ``eps``.  Each factor of ten in ``eps`` adds ``(1/2) ln 10``.

for eps in (1e-2, 1e-4, 1e-6, 1e-8):
    r = length_to_boundary(target, [1.0, 0.0], [-1.0, 0.0], eps)
    print(f"eps {eps:.0e}: length {r.length:.6f}  (1/2) ln(1/eps) = {0.5 * math.log(1 / eps):.6f}")
