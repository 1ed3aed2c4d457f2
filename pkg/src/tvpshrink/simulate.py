"""Synthetic data from the TVP model with random-walk coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import TimeSeriesData


@dataclass(frozen=True)
class SimConfig:
    """Generator settings.

    ``X`` (optional, T x d) replaces the standard-normal covariates; its first
    column is overwritten with ones either way. Setting ``sv`` to a triple
    (mu, phi, sigma2_eta) switches from constant ``sigma2`` to an AR(1)
    log-variance.
    """

    T: int = 200
    theta: tuple[float, ...] = (0.2, 0.0, 0.0)
    beta_mean: tuple[float, ...] = (1.5, -0.3, 0.0)
    sigma2: float = 1.0
    sv: tuple[float, float, float] | None = None
    seed: int = 0
    X: np.ndarray | None = None

    def __post_init__(self):
        th = tuple(float(v) for v in self.theta)
        bm = tuple(float(v) for v in self.beta_mean)
        if len(th) != len(bm) or len(th) < 1:
            raise ValueError("theta and beta_mean must have the same length d >= 1")
        if any(v < 0 for v in th):
            raise ValueError("theta must be nonnegative")
        if self.T < 1:
            raise ValueError("T must be positive")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if self.X is not None and np.shape(self.X) != (self.T, len(th)):
            raise ValueError(f"X must have shape ({self.T}, {len(th)})")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "beta_mean", bm)


@dataclass(frozen=True)
class SimResult:
    data: TimeSeriesData
    true_paths: np.ndarray      # (T+1) x d, row 0 is the initial state
    eps: np.ndarray             # observation errors, length T
    h: np.ndarray | None = None  # log-variances h_0..h_T under SV


def column_names(d: int) -> tuple[str, ...]:
    return ("Intercept",) + tuple(f"x{j}" for j in range(1, d))


def sim_tvp(cfg: SimConfig) -> SimResult:
    rng = np.random.default_rng(cfg.seed)
    T, d = cfg.T, len(cfg.theta)
    sd = np.sqrt(np.asarray(cfg.theta))
    if cfg.X is None:
        X = rng.standard_normal((T, d))
    else:
        X = np.array(cfg.X, dtype=float)
    X[:, 0] = 1.0
    steps = rng.standard_normal((T + 1, d)) * sd
    paths = np.asarray(cfg.beta_mean) + np.cumsum(steps, axis=0)
    h = None
    if cfg.sv is None:
        eps = np.sqrt(cfg.sigma2) * rng.standard_normal(T)
    else:
        mu, phi, s2 = (float(v) for v in cfg.sv)
        h = np.empty(T + 1)
        h[0] = mu + np.sqrt(s2 / (1.0 - phi * phi)) * rng.standard_normal()
        z = rng.standard_normal(T)
        for t in range(1, T + 1):
            h[t] = mu + phi * (h[t - 1] - mu) + np.sqrt(s2) * z[t - 1]
        eps = np.exp(0.5 * h[1:]) * rng.standard_normal(T)
    y = np.sum(X * paths[1:], axis=1) + eps
    data = TimeSeriesData(y, X, column_names(d), tuple(range(1, T + 1)))
    return SimResult(data, paths, eps, h)
