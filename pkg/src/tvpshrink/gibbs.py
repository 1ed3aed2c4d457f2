"""Gibbs sampler for TVP regressions under NGG / NG / ridge shrinkage.

One sweep, in order:

1. state path beta_tilde from its banded precision,
2. (beta, sqrt(theta)) jointly as a 2d-dimensional regression,
3. interweaving: theta_j from a GIG and beta_j from a normal in the centered
   parameterization, then map back,
4. local variances xi2 / tau2 (and kappa2_j / lambda2_j under NGG), then
   pole, tail and global shrinkage parameters where learned,
5. sigma2 (inverse gamma, with a gamma hyperprior on its scale) or the SV block.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dists import sample_gamma, sample_gig, sample_invgamma
from .model import (MH_PARAMS, ChainState, CheckedConfig, DrawsStore, MCMCConfig, MHTuning,
                    PriorSpec, TimeSeriesData, validate)
from .states import DegeneracyError, build_precision, sample_states
from .sv import SvParams, update_sv

SCALE_FLOOR = 1e-100
SCALE_CEIL = 1e100
THETA_SR_MIN = 1e-12


def _protect(x: float) -> float:
    return min(max(x, SCALE_FLOOR), SCALE_CEIL)


@dataclass
class AdaptiveMHState:
    """Batch-adaptive random-walk scale for one Metropolis-Hastings parameter.

    After every ``batch_size`` proposals the log proposal sd moves up by
    min(max_adapt, n**-0.5) if the batch acceptance rate exceeded
    ``target_rate``, down by the same amount if it fell short, and stays put
    on an exact tie (n = number of completed batches).
    """

    log_sd: float = 0.0
    n_batches: int = 0
    accepts_in_batch: int = 0
    proposals_in_batch: int = 0
    batch_size: int = 50
    max_adapt: float = 0.01
    target_rate: float = 0.44
    adaptive: bool = True
    total_accepts: int = 0
    total_proposals: int = 0
    batch_rates: list = field(default_factory=list)

    @classmethod
    def from_tuning(cls, tun: MHTuning) -> "AdaptiveMHState":
        return cls(log_sd=math.log(tun.initial_sd), batch_size=int(tun.batch_size),
                   max_adapt=tun.max_adapt, target_rate=tun.target_rate, adaptive=tun.adaptive)

    @property
    def sd(self) -> float:
        return math.exp(self.log_sd)

    def record(self, accepted: bool) -> None:
        self.total_proposals += 1
        self.proposals_in_batch += 1
        if accepted:
            self.total_accepts += 1
            self.accepts_in_batch += 1
        if self.proposals_in_batch < self.batch_size:
            return
        self.n_batches += 1
        rate = self.accepts_in_batch / self.proposals_in_batch
        self.batch_rates.append(rate)
        if self.adaptive:
            delta = min(self.max_adapt, self.n_batches ** -0.5)
            if rate > self.target_rate:
                self.log_sd += delta
            elif rate < self.target_rate:
                self.log_sd -= delta
        self.accepts_in_batch = 0
        self.proposals_in_batch = 0

    def summary(self) -> dict:
        return {
            "acceptance_rate": self.total_accepts / self.total_proposals if self.total_proposals else float("nan"),
            "batch_rates": list(self.batch_rates),
            "final_sd": self.sd,
        }


def _gamma_logpdf(x, shape, rate):
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * np.log(x) - rate * x


def _f_logpdf(x: float, a: float, c: float) -> float:
    """Log density of F(2a, 2c) at ``x``."""
    return (math.lgamma(a + c) - math.lgamma(a) - math.lgamma(c) + a * math.log(a / c)
            + (a - 1.0) * math.log(x) - (a + c) * math.log1p(a * x / c))


# -- step 2 -----------------------------------------------------------------

def draw_beta_theta(rng, y, X, beta_tilde, xi2, tau2, sigma2_t):
    """Joint draw of (beta, sqrt(theta)) from the regression y_t = z_t gamma + eps_t.

    z_t = (x_t, x_t * beta_tilde_t), prior gamma ~ N(0, diag(tau2, xi2)).
    """
    T, d = X.shape
    Z = np.concatenate([X, X * beta_tilde[1:]], axis=1)
    w = 1.0 / np.asarray(sigma2_t, dtype=float)
    P = (Z.T * w) @ Z
    P[np.diag_indices(2 * d)] += 1.0 / np.concatenate([tau2, xi2])
    b = Z.T @ (w * y)
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise DegeneracyError("posterior precision of (beta, sqrt(theta)) is not positive definite") from None
    v = np.linalg.solve(L, b)
    gamma = np.linalg.solve(L.T, v + rng.standard_normal(2 * d))
    return gamma[:d].copy(), gamma[d:].copy()


# -- step 3 -----------------------------------------------------------------

def asis_step(rng, beta_tilde, beta_mean, theta_sr, xi2, tau2):
    """Interweaving through the centered parameterization.

    Returns ``(beta_mean, theta_sr, beta_tilde, n_fallback)``; the centered
    paths are unchanged. Components whose redrawn |sqrt(theta)| falls below
    1e-12 keep their old values and are counted in ``n_fallback``.
    """
    n_blocks, d = beta_tilde.shape
    T = n_blocks - 1
    beta_mean = beta_mean.copy()
    theta_sr = theta_sr.copy()
    beta_tilde = beta_tilde.copy()
    fallback = 0
    lam = 0.5 - 0.5 * (T + 1)
    for j in range(d):
        path = beta_mean[j] + theta_sr[j] * beta_tilde[:, j]
        chi = float(np.sum(np.diff(path) ** 2) + (path[0] - beta_mean[j]) ** 2)
        if not chi > 0:
            fallback += 1
            continue
        theta = _protect(sample_gig(rng, lam, chi, 1.0 / xi2[j]))
        sr = math.sqrt(theta)
        if rng.random() < 0.5:
            sr = -sr
        if abs(sr) < THETA_SR_MIN:
            fallback += 1
            continue
        V = 1.0 / (1.0 / tau2[j] + 1.0 / theta)
        b = V * path[0] / theta + math.sqrt(V) * rng.standard_normal()
        beta_mean[j] = b
        theta_sr[j] = sr
        beta_tilde[:, j] = (path - b) / sr
    return beta_mean, theta_sr, beta_tilde, fallback


# -- step 4 -----------------------------------------------------------------

def draw_local_scales(rng, mod_type, theta_sr, beta_mean, a_xi, a_tau, c_xi, c_tau,
                      kappa2_j, lambda2_j, kappa2_B, lambda2_B):
    """Local prior variances and, under NGG, the component-specific scales.

    Returns ``(xi2, tau2, kappa2_j, lambda2_j)``.
    """
    d = theta_sr.shape[0]
    if mod_type == "ridge":
        return np.full(d, 2.0 / kappa2_B), np.full(d, 2.0 / lambda2_B), kappa2_j, lambda2_j
    xi2 = np.empty(d)
    tau2 = np.empty(d)
    kappa2_j = np.array(kappa2_j, dtype=float)
    lambda2_j = np.array(lambda2_j, dtype=float)
    triple = mod_type == "triple"
    for j in range(d):
        psi_xi = a_xi * (kappa2_j[j] if triple else kappa2_B)
        psi_tau = a_tau * (lambda2_j[j] if triple else lambda2_B)
        xi2[j] = _protect(sample_gig(rng, a_xi - 0.5, theta_sr[j] ** 2, psi_xi))
        tau2[j] = _protect(sample_gig(rng, a_tau - 0.5, beta_mean[j] ** 2, psi_tau))
    if triple:
        for j in range(d):
            kappa2_j[j] = _protect(sample_gamma(rng, a_xi + c_xi, a_xi * xi2[j] / 2.0 + c_xi / kappa2_B))
            lambda2_j[j] = _protect(sample_gamma(rng, a_tau + c_tau, a_tau * tau2[j] / 2.0 + c_tau / lambda2_B))
    return xi2, tau2, kappa2_j, lambda2_j


def _mh_step(rng, mh: AdaptiveMHState, z: float, log_target) -> float:
    prop = z + mh.sd * rng.standard_normal()
    lp_new = log_target(prop)
    accept = math.log(rng.random()) < lp_new - log_target(z)
    mh.record(accept)
    return prop if accept else z


def _logit(p):
    return math.log(p) - math.log1p(-p)


def _expit(z):
    return 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))


def _update_side(rng, state: ChainState, spec: PriorSpec, mh: dict, side: str) -> None:
    """Pole, tail and global parameters for one side (``"xi"`` or ``"tau"``)."""
    h = spec.hyper
    if side == "xi":
        a_name, c_name, g_name, loc_name, v_name, aux_name = "a_xi", "c_xi", "kappa2_B", "kappa2_j", "xi2", "aux_d2_xi"
        alpha_a, beta_a, alpha_c, beta_c, g1, g2 = h.alpha_a_xi, h.beta_a_xi, h.alpha_c_xi, h.beta_c_xi, h.d1, h.d2
    else:
        a_name, c_name, g_name, loc_name, v_name, aux_name = "a_tau", "c_tau", "lambda2_B", "lambda2_j", "tau2", "aux_d2_tau"
        alpha_a, beta_a, alpha_c, beta_c, g1, g2 = h.alpha_a_tau, h.beta_a_tau, h.alpha_c_tau, h.beta_c_tau, h.e1, h.e2
    v = getattr(state, v_name)
    logv_sum = float(np.sum(np.log(v)))
    v_sum = float(np.sum(v))
    d = v.shape[0]

    if spec.mod_type == "double":
        if spec.learns(a_name):
            g = getattr(state, g_name)

            def log_target(z):
                a = math.exp(z)
                if not 0 < a < math.inf:
                    return -math.inf
                return (alpha_a * z - alpha_a * beta_a * a
                        + d * (a * math.log(a * g / 2.0) - math.lgamma(a))
                        + (a - 1.0) * logv_sum - a * g / 2.0 * v_sum)

            setattr(state, a_name, math.exp(_mh_step(rng, mh[a_name], math.log(getattr(state, a_name)), log_target)))
        if spec.learns(g_name):
            a = getattr(state, a_name)
            setattr(state, g_name, _protect(sample_gamma(rng, g1 + d * a, g2 + a / 2.0 * v_sum)))
        return

    # triple gamma
    loc = getattr(state, loc_name)
    learn_g = spec.learns(g_name)
    g = getattr(state, g_name)
    if spec.learns(a_name):
        c = getattr(state, c_name)

        def log_target(z):
            two_a = _expit(z)
            a = 0.5 * two_a
            if not 0 < two_a < 1 or a == 0:
                return -math.inf
            out = (alpha_a * math.log(two_a) + beta_a * math.log1p(-two_a)
                   + float(np.sum(a * np.log(a * loc / 2.0))) - d * math.lgamma(a)
                   + (a - 1.0) * logv_sum - a / 2.0 * float(np.sum(loc * v)))
            if learn_g:
                out += _f_logpdf(g / 2.0, a, c)
            return out

        z = _mh_step(rng, mh[a_name], _logit(2.0 * getattr(state, a_name)), log_target)
        setattr(state, a_name, 0.5 * _expit(z))
    if spec.learns(c_name):
        a = getattr(state, a_name)
        loc_sum = float(np.sum(loc))
        logloc_sum = float(np.sum(np.log(loc)))

        def log_target(z):
            two_c = _expit(z)
            c = 0.5 * two_c
            if not 0 < two_c < 1 or c == 0:
                return -math.inf
            out = (alpha_c * math.log(two_c) + beta_c * math.log1p(-two_c)
                   + d * (c * math.log(c / g) - math.lgamma(c))
                   + (c - 1.0) * logloc_sum - c / g * loc_sum)
            if learn_g:
                out += _f_logpdf(g / 2.0, a, c)
            return out

        z = _mh_step(rng, mh[c_name], _logit(2.0 * getattr(state, c_name)), log_target)
        setattr(state, c_name, 0.5 * _expit(z))
    if learn_g:
        a = getattr(state, a_name)
        c = getattr(state, c_name)
        aux = sample_gamma(rng, a + c, c + a * g / 2.0)
        setattr(state, aux_name, aux)
        g_new = sample_gig(rng, a - d * c, 2.0 * c * float(np.sum(loc)), a * aux)
        setattr(state, g_name, _protect(g_new))


def draw_global_and_pole_tail(rng, state: ChainState, spec: PriorSpec, mh: dict) -> ChainState:
    """Pole, tail and global shrinkage updates for both sides, in place.

    Fixed parameters are skipped; with nothing learned this is a no-op that
    consumes no random numbers.
    """
    if spec.mod_type == "ridge":
        return state
    _update_side(rng, state, spec, mh, "xi")
    _update_side(rng, state, spec, mh, "tau")
    return state


# -- step 5 -----------------------------------------------------------------

def draw_sigma2_homoskedastic(rng, residuals, c0, C0, g0, G0):
    """sigma2 | C0 ~ InvGamma(c0 + T/2, C0 + sum r^2 / 2), then C0 | sigma2 ~ Gamma(g0 + c0, G0 + 1/sigma2)."""
    r = np.asarray(residuals, dtype=float)
    sigma2 = sample_invgamma(rng, c0 + 0.5 * r.size, C0 + 0.5 * float(r @ r))
    C0_new = sample_gamma(rng, g0 + c0, G0 + 1.0 / sigma2)
    return sigma2, C0_new


# -- driver -----------------------------------------------------------------

def residuals(data: TimeSeriesData, state: ChainState) -> np.ndarray:
    X = data.X
    return data.y - X @ state.beta_mean - np.sum(X * state.theta_sr * state.beta_tilde[1:], axis=1)


def initial_state(data: TimeSeriesData, spec: PriorSpec) -> ChainState:
    """Deterministic starting point: least-squares beta, small sqrt(theta)."""
    T, d = data.T, data.d
    coef, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    resid = data.y - data.X @ coef
    s2 = max(float(resid @ resid) / max(T - d, 1), 1e-8)
    kappa2_B, lambda2_B = spec.kappa2_B, spec.lambda2_B
    if spec.mod_type == "ridge":
        xi2, tau2 = np.full(d, 2.0 / kappa2_B), np.full(d, 2.0 / lambda2_B)
    else:
        xi2, tau2 = np.ones(d), np.full(d, 10.0)
    state = ChainState(
        beta_tilde=np.zeros((T + 1, d)),
        beta_mean=coef.astype(float),
        theta_sr=np.full(d, 0.1),
        xi2=xi2,
        tau2=tau2,
        kappa2_j=np.full(d, kappa2_B),
        lambda2_j=np.full(d, lambda2_B),
        kappa2_B=kappa2_B,
        lambda2_B=lambda2_B,
        a_xi=spec.a_xi,
        a_tau=spec.a_tau,
        c_xi=spec.c_xi,
        c_tau=spec.c_tau,
        sigma2=s2,
        C0=spec.homosked_hyper.G0,
    )
    if spec.sv:
        state.h = np.full(T + 1, math.log(s2))
        state.sv_mu = math.log(s2)
        state.sv_phi = 0.5
        state.sv_sigma2 = 0.1
    return state


def sweep(rng, state: ChainState, data: TimeSeriesData, spec: PriorSpec, mh: dict) -> dict:
    """Run one full Gibbs sweep in place; returns per-sweep diagnostics."""
    y, X = data.y, data.X
    T = data.T
    s2t = state.sigma2_t(T)

    sys = build_precision(y, X, state.beta_mean, state.theta_sr, s2t)
    state.beta_tilde = sample_states(rng, sys)

    state.beta_mean, state.theta_sr = draw_beta_theta(rng, y, X, state.beta_tilde, state.xi2, state.tau2, s2t)

    state.beta_mean, state.theta_sr, state.beta_tilde, n_fb = asis_step(
        rng, state.beta_tilde, state.beta_mean, state.theta_sr, state.xi2, state.tau2)

    state.xi2, state.tau2, state.kappa2_j, state.lambda2_j = draw_local_scales(
        rng, spec.mod_type, state.theta_sr, state.beta_mean, state.a_xi, state.a_tau,
        state.c_xi, state.c_tau, state.kappa2_j, state.lambda2_j, state.kappa2_B, state.lambda2_B)
    draw_global_and_pole_tail(rng, state, spec, mh)

    resid = residuals(data, state)
    if spec.sv:
        params = SvParams(state.sv_mu, state.sv_phi, state.sv_sigma2)
        state.h, params, state.mixture_indicators = update_sv(rng, resid, state.h, params, spec.sv_hyper)
        state.sv_mu, state.sv_phi, state.sv_sigma2 = params.mu, params.phi, params.sigma2_eta
    else:
        hh = spec.homosked_hyper
        state.sigma2, state.C0 = draw_sigma2_homoskedastic(rng, resid, hh.c0, state.C0, hh.g0, hh.G0)
    return {"asis_fallback": n_fb}


def tracked_names(spec: PriorSpec) -> list[str]:
    """Scalar/vector parameters stored for this prior, in output order."""
    names = ["beta_mean", "theta_sr", "tau2", "xi2"]
    if spec.mod_type == "triple":
        names += ["kappa2_j", "lambda2_j"]
    for p in ("a_xi", "a_tau", "c_xi", "c_tau", "kappa2_B", "lambda2_B"):
        if spec.learns(p):
            names.append(p)
    names += ["sv_mu", "sv_phi", "sv_sigma2"] if spec.sv else ["sigma2", "C0"]
    return names


def make_mh(cfg: MCMCConfig) -> dict[str, AdaptiveMHState]:
    return {name: AdaptiveMHState.from_tuning(cfg.mh_tuning[name]) for name in MH_PARAMS}


def run_chain(data: TimeSeriesData, spec: PriorSpec, cfg: MCMCConfig,
              init: ChainState | None = None) -> DrawsStore:
    """Run the sampler and keep every ``nthin``-th draw after burn-in."""
    checked: CheckedConfig = validate(spec, cfg, data)
    spec = checked.spec
    rng = np.random.default_rng(cfg.seed)
    state = init.copy() if init is not None else initial_state(data, spec)
    mh = make_mh(cfg)
    names = tracked_names(spec)
    M = cfg.n_stored
    T, d = data.T, data.d
    store: dict[str, np.ndarray] = {}
    for name in names:
        val = np.asarray(getattr(state, name), dtype=float)
        store[name] = np.empty((M,) + val.shape)
    store["beta_tilde"] = np.empty((M, T + 1, d))
    if spec.sv:
        store["h"] = np.empty((M, T + 1))

    fallbacks = 0
    m = 0
    t_start = time.perf_counter()
    for it in range(cfg.niter):
        try:
            info = sweep(rng, state, data, spec, mh)
        except DegeneracyError as err:
            err.iteration = it
            err.args = (f"iteration {it}: {err.args[0]}",)
            raise
        fallbacks += info["asis_fallback"]
        if it >= cfg.nburn and (it - cfg.nburn + 1) % cfg.nthin == 0 and m < M:
            for name in names:
                store[name][m] = getattr(state, name)
            store["beta_tilde"][m] = state.beta_tilde
            if spec.sv:
                store["h"][m] = state.h
            m += 1
    elapsed = time.perf_counter() - t_start

    mh_diag = {name: mh[name].summary() for name in MH_PARAMS if spec.learns(name)}
    diag = {"asis_fallbacks": fallbacks, "seconds": elapsed,
            "iterations_per_second": cfg.niter / elapsed if elapsed > 0 else float("inf"),
            "warnings": list(checked.warnings)}
    return DrawsStore(draws=store, mh_diag=mh_diag, priorvals=spec, cfg=cfg, data=data, diag=diag)
