"""Reference computations kept independent of the library's own algorithms."""
from __future__ import annotations

import math

import numpy as np

from tvpshrink.states import build_precision, sample_states


def naive_mc_lpds(fit, data, x_new, y_new, inner=20, seed=0):
    """log of the average N(y_new; x beta + F beta_tilde_{T+1}, sigma2) with the next state drawn explicitly."""
    rng = np.random.default_rng(seed)
    d = fit.draws
    dens = []
    for m in range(fit.M):
        sys = build_precision(data.y, data.X, d["beta_mean"][m], d["theta_sr"][m], np.full(data.T, d["sigma2"][m]))
        for _ in range(inner):
            bt_next = sample_states(rng, sys)[-1] + rng.standard_normal(data.d)
            mean = x_new @ d["beta_mean"][m] + (x_new * d["theta_sr"][m]) @ bt_next
            s2 = d["sigma2"][m]
            dens.append(math.exp(-0.5 * (y_new - mean) ** 2 / s2) / math.sqrt(2 * math.pi * s2))
    return math.log(np.mean(dens))


def dense_moments(sys, upto=None):
    """Mean and covariance of the last block of the leading (upto+1)-block system, by dense inversion."""
    omega, c = sys.dense()
    d = sys.d
    k = omega.shape[0] if upto is None else (upto + 1) * d
    cov = np.linalg.inv(omega[:k, :k])
    return (cov @ c[:k])[-d:], cov[-d:, -d:], np.linalg.inv(omega) @ c


def ng_prior_draws(rng, n, hyper, a=1.0, kappa2=2.0, lambda2=2.0):
    """Direct draws of (beta, theta, xi2, sigma2) under the NG prior with fixed hyperparameters, d = 1."""
    xi2 = rng.gamma(a, 2.0 / (a * kappa2), n)
    tau2 = rng.gamma(a, 2.0 / (a * lambda2), n)
    sr = rng.standard_normal(n) * np.sqrt(xi2)
    beta = rng.standard_normal(n) * np.sqrt(tau2)
    C0 = rng.gamma(hyper.g0, 1.0 / hyper.G0, n)
    sigma2 = 1.0 / rng.gamma(hyper.c0, 1.0 / C0)
    return {"beta": beta, "theta": sr ** 2, "xi2": xi2, "sigma2": sigma2,
            "theta_sr": sr, "tau2": tau2, "C0": C0}


def batch_means_se(x, n_batches=100):
    b = x[: len(x) // n_batches * n_batches].reshape(n_batches, -1).mean(axis=1)
    return float(b.std(ddof=1) / math.sqrt(n_batches))
