"""Posterior summaries: mean, sd, median, HPD interval and effective sample size."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DrawsStore

MIN_DRAWS = 10
DEFAULT_QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


@dataclass(frozen=True)
class SummaryRow:
    name: str
    mean: float
    sd: float
    median: float
    hpd_low: float
    hpd_high: float
    ess: float


def hpd_interval(draws, prob: float = 0.95) -> tuple[float, float]:
    """Shortest interval spanning ceil(prob * M) sorted draws; ties go to the lowest start."""
    x = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    M = x.size
    if M < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {M}")
    if not 0 < prob < 1:
        raise ValueError("prob must lie in (0, 1)")
    k = math.ceil(prob * M)
    widths = x[k - 1:] - x[:M - k + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + k - 1])


def _autocov(x: np.ndarray) -> np.ndarray:
    M = x.size
    n = 1 << (2 * M - 1).bit_length()
    f = np.fft.rfft(x - x.mean(), n)
    return np.fft.irfft(f * np.conj(f), n)[:M] / M


def ess(draws) -> float:
    """Effective sample size with Geyer's initial monotone sequence estimator."""
    x = np.asarray(draws, dtype=float).reshape(-1)
    M = x.size
    if M < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {M}")
    acov = _autocov(x)
    if not acov[0] > 0:
        return float(M)
    rho = acov / acov[0]
    # sums of consecutive pairs Gamma_k = rho_{2k} + rho_{2k+1}
    npairs = M // 2
    pairs = rho[0:2 * npairs:2] + rho[1:2 * npairs:2]
    pos = pairs > 0
    stop = int(np.argmin(pos)) if not pos.all() else npairs
    pairs = np.minimum.accumulate(pairs[:stop])
    tau = -1.0 + 2.0 * float(pairs.sum())
    if tau <= 0:
        return float(M)
    return float(min(M, M / tau))


def _row(name: str, x: np.ndarray) -> SummaryRow:
    x = np.asarray(x, dtype=float)
    mean = float(x.mean())
    sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
    med = float(np.median(x))
    if x.size >= MIN_DRAWS:
        lo, hi = hpd_interval(x, 0.95)
        e = ess(x)
    else:
        lo, hi = float(x.min()), float(x.max())
        e = float(x.size)
    return SummaryRow(name, mean, sd, med, lo, hi, e)


def summary_rows(fit: DrawsStore) -> list[SummaryRow]:
    """Row inventory: beta_mean, |theta_sr|, tau2, xi2, learned hyperparameters, error variance block."""
    if fit.M == 0:
        raise ValueError("empty draw store")
    names = fit.data.column_names
    d = fit.draws
    rows: list[SummaryRow] = []
    for key, label in (("beta_mean", "beta_mean_{}"), ("theta_sr", "abs(theta_sr_{})"),
                       ("tau2", "tau2_{}"), ("xi2", "xi2_{}"),
                       ("kappa2_j", "kappa2_{}"), ("lambda2_j", "lambda2_{}")):
        if key not in d:
            continue
        vals = np.abs(d[key]) if key == "theta_sr" else d[key]
        for j, nm in enumerate(names):
            rows.append(_row(label.format(nm), vals[:, j]))
    for key in ("a_xi", "a_tau", "c_xi", "c_tau", "kappa2_B", "lambda2_B",
                "sigma2", "C0", "sv_mu", "sv_phi", "sv_sigma2"):
        if key in d:
            rows.append(_row(key, d[key]))
    return rows


def quantile_paths(fit: DrawsStore, probs=DEFAULT_QUANTILES) -> np.ndarray:
    """Pointwise quantiles of the centered paths, shape (len(probs), T+1, d)."""
    return np.quantile(fit.beta_paths(), probs, axis=0)


@dataclass(frozen=True)
class Summary:
    rows: list[SummaryRow]
    quantile_probs: tuple[float, ...]
    quantiles: np.ndarray

    def row(self, name: str) -> SummaryRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def summarize(fit: DrawsStore, probs=DEFAULT_QUANTILES) -> Summary:
    probs = tuple(float(p) for p in probs)
    return Summary(summary_rows(fit), probs, quantile_paths(fit, probs))


def format_table(rows: list[SummaryRow]) -> str:
    """Fixed-width text table of summary rows."""
    w = max(len("param"), *(len(r.name) for r in rows))
    head = f"{'param':<{w}} {'mean':>10} {'sd':>10} {'median':>10} {'HPD 2.5%':>10} {'HPD 97.5%':>10} {'ESS':>8}"
    lines = [head]
    for r in rows:
        lines.append(f"{r.name:<{w}} {r.mean:>10.3f} {r.sd:>10.3f} {r.median:>10.3f} "
                     f"{r.hpd_low:>10.3f} {r.hpd_high:>10.3f} {r.ess:>8.0f}")
    return "\n".join(lines)
