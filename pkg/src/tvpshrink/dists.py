"""Random variate generators and log densities used by the samplers.

Every generator takes an explicit :class:`numpy.random.Generator`; nothing
touches global random state.

The generalized inverse Gaussian (GIG) law has density

    p(x) ∝ x**(lam - 1) * exp(-(chi / x + psi * x) / 2),   x > 0.

It is sampled in the standardized two-parameter form
``x**(lam-1) exp(-omega/2 (x + 1/x))`` with ``omega = sqrt(chi*psi)`` and then
rescaled by ``sqrt(chi/psi)``. Three rejection schemes cover the parameter
space: ratio-of-uniforms shifted to the mode (large lam or omega),
ratio-of-uniforms without shift (moderate omega), and a three-piece
piecewise hat for lam < 1 with small omega.
"""
from __future__ import annotations

import math

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


def sample_gamma(rng: np.random.Generator, shape, rate, size=None):
    """Gamma variate(s) with mean ``shape / rate``."""
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(shape <= 0) or np.any(rate <= 0):
        raise ValueError(f"gamma needs shape > 0 and rate > 0, got {shape}, {rate}")
    out = rng.gamma(shape, 1.0 / rate, size=size)
    return float(out) if np.ndim(out) == 0 else out


def sample_invgamma(rng: np.random.Generator, shape, scale, size=None):
    """Inverse-gamma variate(s), density ∝ x**(-shape-1) exp(-scale/x)."""
    g = sample_gamma(rng, shape, scale, size=size)
    return 1.0 / g


def sample_beta(rng: np.random.Generator, a, b, size=None):
    """Beta(a, b) built from two gamma variates."""
    ga = np.asarray(sample_gamma(rng, a, 1.0, size=size))
    gb = np.asarray(sample_gamma(rng, b, 1.0, size=size))
    out = ga / (ga + gb)
    return float(out) if out.ndim == 0 else out


def sample_f(rng: np.random.Generator, a, c, size=None):
    """F(2a, 2c) variate(s) as the scaled gamma ratio (G_a / a) / (G_c / c)."""
    ga = np.asarray(sample_gamma(rng, a, 1.0, size=size))
    gc = np.asarray(sample_gamma(rng, c, 1.0, size=size))
    out = (ga / a) / (gc / c)
    return float(out) if out.ndim == 0 else out


def log_normal_pdf(x, mean, variance):
    """Log density of N(mean, variance) at ``x`` (broadcasts)."""
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0):
        raise ValueError("variance must be positive")
    r = np.asarray(x, dtype=float) - mean
    out = -0.5 * (LOG_2PI + np.log(variance) + r * r / variance)
    return float(out) if np.ndim(out) == 0 else out


def gig_logpdf_unnorm(x, lam: float, chi: float, psi: float):
    """Unnormalized GIG log density (for quadrature checks)."""
    x = np.asarray(x, dtype=float)
    return (lam - 1.0) * np.log(x) - 0.5 * (chi / x + psi * x)


def gig_mean(lam: float, chi: float, psi: float) -> float:
    """Mean of GIG(lam, chi, psi) for chi, psi > 0."""
    from scipy.special import kve

    omega = math.sqrt(chi * psi)
    return math.sqrt(chi / psi) * kve(lam + 1.0, omega) / kve(lam, omega)


def _check_gig(lam: float, chi: float, psi: float) -> None:
    if not (math.isfinite(lam) and chi >= 0 and psi >= 0 and math.isfinite(chi) and math.isfinite(psi)):
        raise ValueError(f"invalid GIG parameters lam={lam}, chi={chi}, psi={psi}")
    if not ((chi > 0 or lam > 0) and (psi > 0 or lam < 0)):
        raise ValueError(f"invalid GIG parameters lam={lam}, chi={chi}, psi={psi}")


def _gig_mode(lam: float, omega: float) -> float:
    if lam >= 1.0:
        return (math.sqrt((lam - 1.0) ** 2 + omega * omega) + (lam - 1.0)) / omega
    return omega / (math.sqrt((1.0 - lam) ** 2 + omega * omega) + (1.0 - lam))


class _StdGig:
    """Rejection sampler for x**(lam-1) exp(-omega/2 (x + 1/x)), lam >= 0, omega > 0."""

    def __init__(self, lam: float, omega: float):
        self.lam = lam
        self.omega = omega
        if lam > 2.0 or omega > 3.0:
            self._setup_rou_shift()
        elif lam >= 1.0 - 2.25 * omega * omega or omega > 0.2:
            self._setup_rou_noshift()
        else:
            self._setup_piecewise()

    # ratio-of-uniforms, bounding rectangle shifted to the mode
    def _setup_rou_shift(self):
        lam, omega = self.lam, self.omega
        t = 0.5 * (lam - 1.0)
        s = 0.25 * omega
        xm = _gig_mode(lam, omega)
        nc = t * math.log(xm) - s * (xm + 1.0 / xm)
        # extrema of (x - xm) sqrt(f(x)) are roots of x^3 + a x^2 + b x + c
        a = -(2.0 * (lam + 1.0) / omega + xm)
        b = 2.0 * (lam - 1.0) * xm / omega - 1.0
        c = xm
        p = b - a * a / 3.0
        q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
        fi = math.acos(max(-1.0, min(1.0, -q / (2.0 * math.sqrt(-p ** 3 / 27.0)))))
        fak = 2.0 * math.sqrt(-p / 3.0)
        y1 = fak * math.cos(fi / 3.0) - a / 3.0
        y2 = fak * math.cos(fi / 3.0 + 4.0 / 3.0 * math.pi) - a / 3.0
        self.kind = "shift"
        self.t, self.s, self.nc, self.xm = t, s, nc, xm
        self.uplus = (y1 - xm) * math.exp(t * math.log(y1) - s * (y1 + 1.0 / y1) - nc)
        self.uminus = (y2 - xm) * math.exp(t * math.log(y2) - s * (y2 + 1.0 / y2) - nc)

    # ratio-of-uniforms, rectangle anchored at the origin
    def _setup_rou_noshift(self):
        lam, omega = self.lam, self.omega
        t = 0.5 * (lam - 1.0)
        s = 0.25 * omega
        xm = _gig_mode(lam, omega)
        nc = t * math.log(xm) - s * (xm + 1.0 / xm)
        ym = ((lam + 1.0) + math.sqrt((lam + 1.0) ** 2 + omega * omega)) / omega
        self.kind = "noshift"
        self.t, self.s, self.nc = t, s, nc
        self.um = math.exp(0.5 * (lam + 1.0) * math.log(ym) - s * (ym + 1.0 / ym) - nc)

    # constant / power / exponential hat on three intervals (lam < 1, small omega)
    def _setup_piecewise(self):
        lam, omega = self.lam, self.omega
        xm = _gig_mode(lam, omega)
        x0 = omega / (1.0 - lam)
        k0 = math.exp((lam - 1.0) * math.log(xm) - 0.5 * omega * (xm + 1.0 / xm))
        A0 = k0 * x0
        if x0 >= 2.0 / omega:
            k1 = 0.0
            A1 = 0.0
            k2 = x0 ** (lam - 1.0)
            A2 = k2 * 2.0 * math.exp(-omega * x0 / 2.0) / omega
        else:
            k1 = math.exp(-omega)
            if lam == 0.0:
                A1 = k1 * math.log(2.0 / (omega * omega))
            else:
                A1 = k1 / lam * ((2.0 / omega) ** lam - x0 ** lam)
            k2 = (2.0 / omega) ** (lam - 1.0)
            A2 = k2 * 2.0 * math.exp(-1.0) / omega
        self.kind = "piecewise"
        self.x0, self.k0, self.k1, self.k2 = x0, k0, k1, k2
        self.A = (A0, A1, A2)
        self.Atot = A0 + A1 + A2
        self.c_start = max(x0, 2.0 / omega)

    def _piecewise_candidate(self, v: float) -> tuple[float, float]:
        lam, omega = self.lam, self.omega
        A0, A1, _ = self.A
        if v <= A0:
            return self.x0 * v / A0, self.k0
        v -= A0
        if v <= A1:
            if lam == 0.0:
                x = omega * math.exp(math.exp(omega) * v)
                return x, self.k1 / x
            x = (self.x0 ** lam + lam / self.k1 * v) ** (1.0 / lam)
            return x, self.k1 * x ** (lam - 1.0)
        v -= A1
        arg = math.exp(-omega / 2.0 * self.c_start) - omega / (2.0 * self.k2) * v
        x = -2.0 / omega * math.log(arg) if arg > 0 else math.inf
        return x, self.k2 * math.exp(-omega / 2.0 * x)

    def draw(self, rng: np.random.Generator) -> float:
        if self.kind == "shift":
            t, s, nc, xm = self.t, self.s, self.nc, self.xm
            width = self.uplus - self.uminus
            while True:
                u1, v = rng.random(2)
                x = (self.uminus + u1 * width) / v + xm
                if x > 0.0 and math.log(v) <= t * math.log(x) - s * (x + 1.0 / x) - nc:
                    return x
        if self.kind == "noshift":
            t, s, nc = self.t, self.s, self.nc
            while True:
                u1, v = rng.random(2)
                x = self.um * u1 / v
                if x > 0.0 and math.log(v) <= t * math.log(x) - s * (x + 1.0 / x) - nc:
                    return x
        lam, omega = self.lam, self.omega
        while True:
            u1, u2 = rng.random(2)
            x, hx = self._piecewise_candidate(self.Atot * u1)
            if not (0.0 < x < math.inf) or hx <= 0.0:
                continue
            if math.log(u2 * hx) <= (lam - 1.0) * math.log(x) - omega / 2.0 * (x + 1.0 / x):
                return x

    def draw_many(self, rng: np.random.Generator, n: int) -> np.ndarray:
        out = np.empty(n)
        filled = 0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            while filled < n:
                m = max(64, int(1.3 * (n - filled)))
                u1 = rng.random(m)
                v = rng.random(m)
                if self.kind == "shift":
                    x = (self.uminus + u1 * (self.uplus - self.uminus)) / v + self.xm
                    ok = (x > 0) & (np.log(v) <= self.t * np.log(x) - self.s * (x + 1 / x) - self.nc)
                elif self.kind == "noshift":
                    x = self.um * u1 / v
                    ok = (x > 0) & (np.log(v) <= self.t * np.log(x) - self.s * (x + 1 / x) - self.nc)
                else:
                    x, hx = self._piecewise_candidates(self.Atot * u1)
                    ok = (x > 0) & np.isfinite(x) & (hx > 0)
                    ok &= np.log(v * hx) <= (self.lam - 1) * np.log(x) - self.omega / 2 * (x + 1 / x)
                acc = x[ok][: n - filled]
                out[filled:filled + acc.size] = acc
                filled += acc.size
        return out

    def _piecewise_candidates(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lam, omega = self.lam, self.omega
        A0, A1, _ = self.A
        x = np.empty_like(v)
        hx = np.empty_like(v)
        r0 = v <= A0
        x[r0] = self.x0 * v[r0] / A0
        hx[r0] = self.k0
        r1 = ~r0 & (v <= A0 + A1)
        w = v[r1] - A0
        if lam == 0.0:
            x[r1] = omega * np.exp(math.exp(omega) * w)
            hx[r1] = self.k1 / x[r1]
        else:
            x[r1] = (self.x0 ** lam + lam / self.k1 * w) ** (1.0 / lam)
            hx[r1] = self.k1 * x[r1] ** (lam - 1.0)
        r2 = ~(r0 | r1)
        w = v[r2] - A0 - A1
        arg = math.exp(-omega / 2.0 * self.c_start) - omega / (2.0 * self.k2) * w
        x[r2] = -2.0 / omega * np.log(arg)
        hx[r2] = self.k2 * np.exp(-omega / 2.0 * x[r2])
        return x, hx


def sample_gig(rng: np.random.Generator, lam: float, chi: float, psi: float, size: int | None = None):
    """Draw from GIG(lam, chi, psi).

    ``chi == 0`` reduces to Gamma(lam, rate psi/2) and ``psi == 0`` to
    inverse-gamma(-lam, scale chi/2); both are sampled directly.
    """
    lam, chi, psi = float(lam), float(chi), float(psi)
    _check_gig(lam, chi, psi)
    if chi == 0.0:
        return sample_gamma(rng, lam, psi / 2.0, size=size)
    if psi == 0.0:
        return sample_invgamma(rng, -lam, chi / 2.0, size=size)
    omega = math.sqrt(chi) * math.sqrt(psi)
    alpha = math.sqrt(chi) / math.sqrt(psi)
    if omega == 0.0:
        # numerically at a boundary
        if lam > 0:
            return sample_gamma(rng, lam, psi / 2.0, size=size)
        if lam < 0:
            return sample_invgamma(rng, -lam, chi / 2.0, size=size)
        raise ValueError(f"GIG parameters underflow: chi={chi}, psi={psi}")
    gen = _StdGig(abs(lam), omega)
    if size is None:
        x = gen.draw(rng)
        return alpha / x if lam < 0 else alpha * x
    x = gen.draw_many(rng, int(size))
    return alpha / x if lam < 0 else alpha * x
