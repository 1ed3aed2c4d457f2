from __future__ import annotations

import functools
import math

import numpy as np
import pytest
from scipy import integrate

from tvpshrink.diagnostics import ess
from tvpshrink.gibbs import run_chain
from tvpshrink.model import DrawsStore, MCMCConfig, PriorSpec, TimeSeriesData, default_prior_spec
from tvpshrink.predict import (PredictiveMoments, eval_pred_dens, lpds, mixture_logpdf,
                               predictive_moments)
from tvpshrink.simulate import SimConfig, sim_tvp

from oracles import naive_mc_lpds


@functools.lru_cache(maxsize=None)
def t50_fit():
    sim = sim_tvp(SimConfig(T=51, seed=11))
    train = sim.data.head(50)
    fit = run_chain(train, default_prior_spec(), MCMCConfig(niter=3000, seed=11))
    return sim, train, fit


def _store(data, beta, sr, sigma2, bt=None):
    M, d = beta.shape
    bt = np.zeros((M, data.T + 1, d)) if bt is None else bt
    draws = {"beta_mean": beta, "theta_sr": sr, "sigma2": sigma2, "beta_tilde": bt}
    return DrawsStore(draws, {}, PriorSpec(), MCMCConfig(niter=2), data)


def test_zero_theta_draws():
    data = TimeSeriesData(np.arange(5.0), np.ones((5, 2)))
    beta = np.array([[1.0, 2.0], [0.5, -1.0]])
    pm = predictive_moments(_store(data, beta, np.zeros((2, 2)), np.array([0.7, 1.3])), data, [1.0, 2.0])
    assert np.array_equal(pm.s2, [0.7, 1.3])
    assert np.array_equal(pm.yhat, beta @ [1.0, 2.0])


def test_hand_system_prediction():
    data = TimeSeriesData(np.array([3.0]), np.ones((1, 1)))
    pm = predictive_moments(_store(data, np.zeros((1, 1)), np.ones((1, 1)), np.ones(1)), data, [1.0])
    # filtered beta_tilde_1 ~ N(2, 2/3); next state adds unit variance
    assert pm.yhat[0] == pytest.approx(2.0) and pm.s2[0] == pytest.approx(2 / 3 + 1 + 1)


def test_single_component_lpds():
    pm = PredictiveMoments(np.array([0.4]), np.array([1.0]))
    assert mixture_logpdf([0.4], pm)[0] == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)


def test_logsumexp_stable_under_offset():
    rng = np.random.default_rng(0)
    yhat, s2 = rng.standard_normal(100), rng.uniform(0.5, 2, 100)
    a = mixture_logpdf([0.3], PredictiveMoments(yhat, s2))[0]
    b = mixture_logpdf([1000.3], PredictiveMoments(yhat + 1000, s2))[0]
    far = mixture_logpdf([1e4], PredictiveMoments(yhat, s2))[0]
    assert a == pytest.approx(b, abs=1e-9) and np.isfinite(far)


def test_dimension_mismatch():
    sim, train, fit = t50_fit()
    with pytest.raises(ValueError):
        predictive_moments(fit, train, np.ones(2))


def test_mixture_agrees_with_naive_mc():
    sim, train, fit = t50_fit()
    x_new, y_new = sim.data.X[50], float(sim.data.y[50])
    mix = lpds(fit, train, x_new, y_new)
    naive = naive_mc_lpds(fit, train, x_new, y_new)
    assert abs(mix - naive) < 0.05


def test_lpds_equals_log_density():
    sim, train, fit = t50_fit()
    x_new, y_new = sim.data.X[50], float(sim.data.y[50])
    val = lpds(fit, train, x_new, y_new)
    dens = eval_pred_dens([y_new], fit, train, x_new)[0]
    assert math.exp(val) == pytest.approx(dens, rel=1e-12)
    assert eval_pred_dens([], fit, train, x_new).size == 0


def test_density_integrates_to_one():
    sim, train, fit = t50_fit()
    pm = predictive_moments(fit, train, sim.data.X[50])
    f = lambda p: float(np.exp(mixture_logpdf([p], pm))[0])
    half = 12 * math.sqrt(pm.s2.max())
    total = integrate.quad(f, pm.yhat.min() - half, pm.yhat.max() + half, limit=500)[0]
    assert total == pytest.approx(1.0, abs=1e-3)


def test_half_sample_consistency():
    sim, train, fit = t50_fit()
    pm = predictive_moments(fit, train, sim.data.X[50])
    y = float(sim.data.y[50])
    full = mixture_logpdf([y], pm)[0]
    half = mixture_logpdf([y], PredictiveMoments(pm.yhat[: pm.M // 2], pm.s2[: pm.M // 2]))[0]
    comp = np.exp(-0.5 * (y - pm.yhat) ** 2 / pm.s2) / np.sqrt(2 * np.pi * pm.s2)
    # draws are autocorrelated: scale the mixture-variance standard error by the effective size
    se = comp.std() / comp.mean() / math.sqrt(ess(comp[: pm.M // 2]))
    assert abs(full - half) < 3 * se


def test_sv_predictive_variance_tracks_recent_volatility():
    rng = np.random.default_rng(12)
    T = 200
    X = np.column_stack([np.ones(T), rng.standard_normal(T)])
    sd = np.where(np.arange(T) < 150, 0.5, 2.0)
    data = TimeSeriesData(X @ [1.0, 0.5] + sd * rng.standard_normal(T), X)
    x_new = np.array([1.0, 0.0])
    homo = run_chain(data, default_prior_spec(), MCMCConfig(niter=2000, seed=1))
    sv = run_chain(data, default_prior_spec(sv=True), MCMCConfig(niter=2000, seed=1))
    s_homo = predictive_moments(homo, data, x_new).s2.mean()
    s_sv = predictive_moments(sv, data, x_new).s2.mean()
    assert s_sv > s_homo
    # repeated calls reuse the fit's seed for the volatility draw
    assert np.array_equal(predictive_moments(sv, data, x_new).s2, predictive_moments(sv, data, x_new).s2)
