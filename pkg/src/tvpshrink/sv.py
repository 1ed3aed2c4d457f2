"""Stochastic volatility block: log-variances h_0..h_T and (mu, phi, sigma2_eta).

One sweep of the auxiliary mixture sampler. log(eps_t^2) = h_t + log(chi2_1),
and the log chi2_1 error is approximated by a 10-component Gaussian mixture.
Given the component indicators the model is linear Gaussian in h, and the
path is drawn in one go from its tridiagonal precision.

Parameters are updated in the centered parameterization (sigma2_eta by GIG,
phi by an independence Metropolis step, mu by a Gaussian draw). Then one
interweaving step redraws (mu, sigma_eta) as regression coefficients of the
non-centered path (h - mu) / sigma_eta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dists import sample_gig
from .model import SvHyper
from .states import PrecisionSystem, sample_states

# 10-component approximation to the log chi^2_1 density (Omori, Chib, Shephard & Nakajima, 2007)
MIX_PROB = np.array([0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                     0.18842, 0.12047, 0.05591, 0.01575, 0.00115])
MIX_MEAN = np.array([1.92677, 1.34744, 0.73504, 0.02266, -0.85173,
                     -1.97278, -3.46788, -5.55246, -8.68384, -14.65000])
MIX_VAR = np.array([0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                    0.98583, 1.57469, 2.54498, 4.16591, 7.33342])

EPS2_FLOOR = 1e-300


@dataclass(frozen=True)
class SvParams:
    mu: float = 0.0
    phi: float = 0.5
    sigma2_eta: float = 0.1

    def __post_init__(self):
        if not -1.0 < self.phi < 1.0:
            raise ValueError(f"phi must lie in (-1, 1), got {self.phi}")
        if not self.sigma2_eta > 0:
            raise ValueError("sigma2_eta must be positive")


def mixture_logpdf(z):
    """Log density of the 10-component mixture at ``z``."""
    z = np.asarray(z, dtype=float)[..., None]
    comp = np.log(MIX_PROB) - 0.5 * np.log(2 * np.pi * MIX_VAR) - 0.5 * (z - MIX_MEAN) ** 2 / MIX_VAR
    mx = comp.max(axis=-1, keepdims=True)
    return (mx + np.log(np.exp(comp - mx).sum(axis=-1, keepdims=True)))[..., 0]


def log_chi2_logpdf(z):
    """Exact log density of log(X) for X ~ chi^2_1."""
    z = np.asarray(z, dtype=float)
    return 0.5 * z - 0.5 * np.exp(z) - 0.5 * np.log(2 * np.pi)


def draw_indicators(rng: np.random.Generator, ystar: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Mixture component for each t given ystar_t = log eps_t^2 and h_t (t = 1..T)."""
    r = (ystar - h)[:, None] - MIX_MEAN
    logp = np.log(MIX_PROB) - 0.5 * np.log(MIX_VAR) - 0.5 * r * r / MIX_VAR
    logp -= logp.max(axis=1, keepdims=True)
    p = np.exp(logp)
    cdf = np.cumsum(p, axis=1)
    u = rng.random(ystar.shape[0]) * cdf[:, -1]
    return np.minimum((cdf < u[:, None]).sum(axis=1), MIX_PROB.size - 1)


def _path_system(ystar, ind, params: SvParams) -> PrecisionSystem:
    T = ystar.shape[0]
    mu, phi, s2 = params.mu, params.phi, params.sigma2_eta
    diag = np.full(T + 1, (1.0 + phi * phi) / s2)
    diag[0] = diag[-1] = 1.0 / s2
    lin = np.full(T + 1, mu * (1.0 - phi) ** 2 / s2)
    lin[0] = lin[-1] = mu * (1.0 - phi) / s2
    if T == 0:
        diag[0] = (1.0 - phi * phi) / s2
        lin[0] = mu * (1.0 - phi * phi) / s2
    v = MIX_VAR[ind]
    diag[1:] += 1.0 / v
    lin[1:] += (ystar - MIX_MEAN[ind]) / v
    off = np.full((T, 1, 1), -phi / s2)
    return PrecisionSystem(diag[:, None, None], off, lin[:, None])


def _log_beta_prior_phi(phi: float, hyper: SvHyper) -> float:
    x = 0.5 * (phi + 1.0)
    return (hyper.a_phi - 1.0) * math.log(x) + (hyper.b_phi - 1.0) * math.log(1.0 - x)


def update_sv(rng: np.random.Generator, residuals, h, params: SvParams, hyper: SvHyper,
              fixed: tuple[str, ...] = ()):
    """One sweep of the SV block.

    ``residuals`` are eps_1..eps_T; ``h`` is h_0..h_T. Names listed in
    ``fixed`` (any of ``"mu"``, ``"phi"``, ``"sigma2"``) are held at their
    current values. Returns ``(h_new, params_new, indicators)``.
    """
    eps = np.asarray(residuals, dtype=float)
    h = np.asarray(h, dtype=float)
    T = eps.shape[0]
    if h.shape != (T + 1,):
        raise ValueError(f"h must have length T+1 = {T + 1}")
    ystar = np.log(np.maximum(eps * eps, EPS2_FLOOR))

    ind = draw_indicators(rng, ystar, h[1:])
    h = sample_states(rng, _path_system(ystar, ind, params))[:, 0]

    mu, phi, s2 = params.mu, params.phi, params.sigma2_eta
    # centered parameterization
    if "sigma2" not in fixed:
        hc = h - mu
        ssq = (1.0 - phi * phi) * hc[0] ** 2 + float(np.sum((hc[1:] - phi * hc[:-1]) ** 2))
        s2 = sample_gig(rng, -0.5 * T, max(ssq, 1e-300), 1.0 / hyper.B_sigma)
    if "phi" not in fixed and T > 1:
        hc = h - mu
        sxx = float(hc[:-1] @ hc[:-1])
        if sxx > 0:
            mean = float(hc[:-1] @ hc[1:]) / sxx
            prop = mean + math.sqrt(s2 / sxx) * rng.standard_normal()
            if -1.0 < prop < 1.0:
                def log_extra(p):
                    return (_log_beta_prior_phi(p, hyper) + 0.5 * math.log(1.0 - p * p)
                            - 0.5 * (1.0 - p * p) * hc[0] ** 2 / s2)
                if math.log(rng.random()) < log_extra(prop) - log_extra(phi):
                    phi = prop
    if "mu" not in fixed:
        prec = 1.0 / hyper.B_mu + ((1.0 - phi * phi) + T * (1.0 - phi) ** 2) / s2
        lin = hyper.b_mu / hyper.B_mu + ((1.0 - phi * phi) * h[0]
                                         + (1.0 - phi) * float(np.sum(h[1:] - phi * h[:-1]))) / s2
        mu = lin / prec + rng.standard_normal() / math.sqrt(prec)

    # interweave: (mu, sigma_eta) as regression coefficients of the standardized path
    if "sigma2" not in fixed and "mu" not in fixed and T > 0:
        sigma = math.sqrt(s2)
        htilde = (h - mu) / sigma
        z = ystar - MIX_MEAN[ind]
        w = 1.0 / MIX_VAR[ind]
        ht = htilde[1:]
        P = np.array([[np.sum(w) + 1.0 / hyper.B_mu, np.sum(w * ht)],
                      [np.sum(w * ht), np.sum(w * ht * ht) + 1.0 / hyper.B_sigma]])
        b = np.array([np.sum(w * z) + hyper.b_mu / hyper.B_mu, np.sum(w * z * ht)])
        L = np.linalg.cholesky(P)
        mean = np.linalg.solve(P, b)
        coef = mean + np.linalg.solve(L.T, rng.standard_normal(2))
        mu, sigma = float(coef[0]), float(coef[1])
        h = mu + sigma * htilde
        s2 = sigma * sigma

    return h, replace(params, mu=float(mu), phi=float(phi), sigma2_eta=float(s2)), ind
