"""One-step-ahead prediction: hold out the last observation and score it.

The predictive density is a mixture over posterior draws of normals whose
moments come from integrating out the next state analytically.

    python demos/predictive_density.py
"""
from __future__ import annotations

import numpy as np

from tvpshrink import MCMCConfig, default_prior_spec, eval_pred_dens, lpds, predictive_moments, run_chain, sim_tvp
from tvpshrink.simulate import SimConfig

sim = sim_tvp(SimConfig(T=200, seed=123))
train = sim.data.head(199)
x_new, y_new = sim.data.X[-1], float(sim.data.y[-1])

fit = run_chain(train, default_prior_spec("double"), MCMCConfig(niter=10000, seed=2))
print(f"held-out y = {y_new:.3f}")
print(f"LPDS       = {lpds(fit, train, x_new, y_new):.4f}")

pm = predictive_moments(fit, train, x_new)
print(f"predictive mean {pm.yhat.mean():.3f}, sd {np.sqrt(pm.s2.mean() + pm.yhat.var()):.3f}")

grid = np.linspace(pm.yhat.mean() - 5, pm.yhat.mean() + 5, 11)
for p, dens in zip(grid, eval_pred_dens(grid, fit, train, x_new)):
    print(f"{p:8.3f} {dens:.5f} " + "#" * int(200 * dens))

# the same score from a stochastic volatility fit
fit_sv = run_chain(train, default_prior_spec("double", sv=True), MCMCConfig(niter=10000, seed=2))
print(f"LPDS with SV errors = {lpds(fit_sv, train, x_new, y_new):.4f}")
