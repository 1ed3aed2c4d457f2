from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from tvpshrink.model import SvHyper
from tvpshrink.sv import (MIX_MEAN, MIX_PROB, MIX_VAR, SvParams, _path_system, draw_indicators,
                          log_chi2_logpdf, mixture_logpdf, update_sv)


def test_mixture_close_to_log_chi2():
    f = lambda z: np.exp(log_chi2_logpdf(z)) * (log_chi2_logpdf(z) - mixture_logpdf(z))
    kl = integrate.quad(f, -25, 5, limit=400)[0]
    assert 0 <= kl < 1e-4
    assert MIX_PROB.sum() == pytest.approx(1.0, abs=1e-4)
    # mixture mean matches E log chi2_1 = -1.2704
    assert float(MIX_PROB @ MIX_MEAN) == pytest.approx(-1.2704, abs=2e-3)


def test_path_system_matches_dense_ar1():
    rng = np.random.default_rng(0)
    T = 6
    p = SvParams(mu=-0.4, phi=0.7, sigma2_eta=0.3)
    ystar = rng.standard_normal(T)
    ind = rng.integers(0, 10, T)
    t = np.arange(T + 1)
    prior_cov = p.sigma2_eta / (1 - p.phi ** 2) * p.phi ** np.abs(t[:, None] - t[None, :])
    Q = np.linalg.inv(prior_cov)
    Q[1:, 1:] += np.diag(1 / MIX_VAR[ind])
    b = np.linalg.inv(prior_cov) @ np.full(T + 1, p.mu)
    b[1:] += (ystar - MIX_MEAN[ind]) / MIX_VAR[ind]
    omega, c = _path_system(ystar, ind, p).dense()
    assert np.allclose(omega, Q) and np.allclose(c, b)


def test_indicator_frequencies():
    rng = np.random.default_rng(1)
    r = np.full(200000, -1.0)
    ind = draw_indicators(rng, r, np.zeros_like(r))
    w = MIX_PROB * np.exp(-0.5 * (-1.0 - MIX_MEAN) ** 2 / MIX_VAR) / np.sqrt(MIX_VAR)
    w /= w.sum()
    freq = np.bincount(ind, minlength=10) / r.size
    assert np.all(np.abs(freq - w) < 4 * np.sqrt(w * (1 - w) / r.size) + 1e-6)


def test_degenerate_path_sticks_to_mu():
    rng = np.random.default_rng(2)
    T = 200
    eps = np.exp(0.25) * rng.standard_normal(T)
    h, p = np.zeros(T + 1), SvParams(mu=0.0, phi=0.0, sigma2_eta=1e-8)
    worst = 0.0
    for it in range(300):
        h, p, _ = update_sv(rng, eps, h, p, SvHyper(), fixed=("phi", "sigma2"))
        if it >= 100:
            worst = max(worst, float(np.max(np.abs(h - p.mu))))
    assert worst < 0.05
    assert p.phi == 0.0 and p.sigma2_eta == 1e-8


def test_constant_volatility_level():
    rng = np.random.default_rng(3)
    T = 2000
    eps = rng.standard_normal(T)
    h, p = np.zeros(T + 1), SvParams()
    mus = []
    for it in range(1200):
        h, p, _ = update_sv(rng, eps, h, p, SvHyper())
        mus.append(p.mu)
    assert -0.3 <= np.mean(mus[300:]) <= 0.3


def test_recovers_sv_parameters():
    rng = np.random.default_rng(5)
    T, mu, phi, s2 = 2000, -1.0, 0.95, 0.04
    h = np.empty(T + 1)
    h[0] = mu + rng.standard_normal() * np.sqrt(s2 / (1 - phi ** 2))
    for t in range(1, T + 1):
        h[t] = mu + phi * (h[t - 1] - mu) + np.sqrt(s2) * rng.standard_normal()
    eps = np.exp(h[1:] / 2) * rng.standard_normal(T)
    hh, p = np.zeros(T + 1), SvParams()
    out = []
    for it in range(2000):
        hh, p, _ = update_sv(rng, eps, hh, p, SvHyper())
        out.append((p.mu, p.phi, p.sigma2_eta))
    est = np.mean(out[500:], axis=0)
    assert abs(est[0] - mu) < 0.3 and abs(est[1] - phi) < 0.05 and abs(est[2] - s2) < 0.03


def test_zero_residuals_floored():
    rng = np.random.default_rng(4)
    h, p, _ = update_sv(rng, np.zeros(20), np.zeros(21), SvParams(), SvHyper())
    assert np.all(np.isfinite(h)) and np.isfinite(p.mu)


def test_params_validation():
    with pytest.raises(ValueError):
        SvParams(phi=1.0)
    with pytest.raises(ValueError):
        SvParams(sigma2_eta=0.0)
