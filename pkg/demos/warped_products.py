"""
Warped products and the Riccati flow
====================================

Along the geodesics through the cubic-form maximizer the metric splits as
``dt^2 + rho(t)^2 G_fibre`` with ``eta = rho'/rho`` solving
``eta' = 1 - eta^2``.  The quantity ``rho^2 (eta^2 - 1)`` is conserved and
fixes the curvature of the fibre.  Each of its three signs is realized by one
of the explicit immersions checked below.
"""

# %%
# Integrating the flow
# --------------------
# RK4 with ``rho(0) = 1``.  Starting below, at and above the fixed point
# ``eta = 1`` gives a negative, zero and positive conserved value.

import math

import numpy as np

from calabi.warped import (CASES, eta_closed_form, graph_residual, integrate_eta,
                           pullback_metric, sample_params, warped_metric)

for eta0 in (0.0, 1.0, 2.0):
    traj = integrate_eta(eta0, 5.0)
    err = np.max(np.abs(traj.eta - eta_closed_form(eta0, traj.t)))
    print(f"eta0 = {eta0}: cbar = {traj.cbar[0]:+.3f}, drift {traj.cbar_drift:.1e}, "
          f"max error vs closed form {err:.1e}")
print("eta(1) from 0:", integrate_eta(0.0, 1.0).eta[-1], "tanh(1):", math.tanh(1.0))

# %%
# Fourth-order convergence
# ------------------------
# Halving the step should divide the error by about 16.

exact = float(eta_closed_form(2.0, 1.0))
e1 = abs(integrate_eta(2.0, 1.0, 0.01).eta[-1] - exact)
e2 = abs(integrate_eta(2.0, 1.0, 0.005).eta[-1] - exact)
print("step-halving factor", e1 / e2)

# %%
# Explicit immersions
# -------------------
# Each case maps parameters ``(t, u2, ..., un)`` into space.  After a
# volume-preserving normalization the image lies on a catalog graph, and the
# pulled-back metric is the warped product with ``rho`` equal to ``sinh t``,
# ``exp(-t)``, ``exp(t)`` or ``cosh t``.

rng = np.random.default_rng(1)
for case in CASES:
    worst_graph = worst_metric = 0.0
    for p in sample_params(case, 3, 10, rng):
        worst_graph = max(worst_graph, graph_residual(case, p))
        worst_metric = max(worst_metric, np.max(np.abs(pullback_metric(case, p) - warped_metric(case, p))))
    print(f"{case:11s} distance to graph {worst_graph:.1e}  metric error {worst_metric:.1e}")
