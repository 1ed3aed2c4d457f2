"""One-step-ahead predictive densities and log predictive density scores.

For each stored draw the next standardized state is integrated out
analytically: with (m_T, Sigma_T) the filtered moments of beta_tilde_T,

    y_{T+1} | draw ~ N(x beta + F m_T,  F (Sigma_T + I) F' + sigma2_{T+1}),

where F = x * sqrt(theta). The predictive density is the equal-weight
mixture of these normals over draws.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .model import DrawsStore, TimeSeriesData
from .states import build_precision, filter_moments

CHUNK = 512
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class PredictiveMoments:
    yhat: np.ndarray
    s2: np.ndarray

    def __post_init__(self):
        if self.yhat.shape != self.s2.shape:
            raise ValueError("yhat and s2 must have the same length")
        if not np.all(self.s2 > 0):
            raise ValueError("predictive variances must be positive")

    @property
    def M(self) -> int:
        return self.yhat.shape[0]


def _sigma2_next(fit: DrawsStore, rng: np.random.Generator | None) -> tuple[np.ndarray, np.ndarray]:
    """(sigma2_t paths for t=1..T, sigma2_{T+1}) per draw."""
    d = fit.draws
    if "h" in d:
        if rng is None:
            rng = np.random.default_rng(fit.cfg.seed)
        h = d["h"]
        mu, phi, s2 = d["sv_mu"], d["sv_phi"], d["sv_sigma2"]
        h_next = mu + phi * (h[:, -1] - mu) + np.sqrt(s2) * rng.standard_normal(h.shape[0])
        return np.exp(h[:, 1:]), np.exp(h_next)
    sig = d["sigma2"]
    return sig[:, None], sig


def predictive_moments(fit: DrawsStore, data: TimeSeriesData, x_new,
                       rng: np.random.Generator | None = None) -> PredictiveMoments:
    """Per-draw mean and variance of the one-step-ahead predictive normal.

    ``data`` must be the sample the chain was fitted on. Under stochastic
    volatility the next log-variance is drawn once per stored draw from
    ``rng`` (default: a generator seeded with the fit's seed, so repeated
    calls agree).
    """
    x_new = np.asarray(x_new, dtype=float).reshape(-1)
    if x_new.shape[0] != data.d or fit.draws["beta_mean"].shape[1] != data.d:
        raise ValueError(f"x_new has {x_new.shape[0]} entries, fit has d={fit.draws['beta_mean'].shape[1]}, "
                         f"data has d={data.d}")
    if fit.draws["beta_tilde"].shape[1] != data.T + 1:
        raise ValueError("data length does not match the fitted sample")
    beta = fit.draws["beta_mean"]
    sr = fit.draws["theta_sr"]
    s2_path, s2_next = _sigma2_next(fit, rng)
    M = beta.shape[0]
    yhat = np.empty(M)
    S = np.empty(M)
    for lo in range(0, M, CHUNK):
        sl = slice(lo, min(lo + CHUNK, M))
        sp = s2_path[sl] if s2_path.shape[0] == M else s2_path
        sys = build_precision(data.y, data.X, beta[sl], sr[sl], sp)
        m, Sig = filter_moments(sys)
        F = x_new * sr[sl]
        yhat[sl] = beta[sl] @ x_new + np.einsum("md,md->m", F, m)
        P = Sig + np.eye(data.d)
        S[sl] = np.einsum("mi,mij,mj->m", F, P, F) + s2_next[sl]
    return PredictiveMoments(yhat, S)


def mixture_logpdf(points, pm: PredictiveMoments) -> np.ndarray:
    """log of (1/M) sum_m N(p; yhat_m, s2_m) for each point."""
    p = np.asarray(points, dtype=float).reshape(-1)
    if p.size == 0:
        return np.empty(0)
    comp = -0.5 * (LOG_2PI + np.log(pm.s2)) - 0.5 * (p[:, None] - pm.yhat) ** 2 / pm.s2
    return logsumexp(comp, axis=1) - np.log(pm.M)


def lpds(fit: DrawsStore, data: TimeSeriesData, x_new, y_new: float,
         rng: np.random.Generator | None = None) -> float:
    """Log predictive density score of ``y_new`` at covariates ``x_new``."""
    pm = predictive_moments(fit, data, x_new, rng)
    return float(mixture_logpdf([y_new], pm)[0])


def eval_pred_dens(points, fit: DrawsStore, data: TimeSeriesData, x_new,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Predictive density at each of ``points``."""
    p = np.asarray(points, dtype=float).reshape(-1)
    if p.size == 0:
        return np.empty(0)
    pm = predictive_moments(fit, data, x_new, rng)
    return np.exp(mixture_logpdf(p, pm))
