"""Joint sampling of the standardized state path from its banded precision.

Conditional on everything else, beta_tilde = (beta_tilde_0, ..., beta_tilde_T)
is Gaussian with block-tridiagonal precision Omega and canonical mean vector c:

    Omega_00 = 2 I,   Omega_tt = F_t' F_t / s2_t + 2 I  (0 < t < T),
    Omega_TT = F_T' F_T / s2_T + I,   Omega_{t-1,t} = -I,
    c_0 = 0,          c_t = F_t' y*_t / s2_t,

with F_t = x_t * sqrt(theta) and y*_t = y_t - x_t beta. The factorization runs
on LAPACK's symmetric band storage, which for this matrix is exactly the
block-banded lower Cholesky factor, so cost is linear in T.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack

DEGENERACY_TOL = 1e-12


class DegeneracyError(np.linalg.LinAlgError):
    """Numerically non positive definite system; ``block`` is the offending time index."""

    def __init__(self, message: str, block: int | None = None, iteration: int | None = None):
        self.block = block
        self.iteration = iteration
        super().__init__(message)


@dataclass(frozen=True)
class PrecisionSystem:
    """Block-tridiagonal Gaussian system in canonical form.

    ``diag_blocks``: (..., T+1, d, d); ``off_blocks``: (..., T, d, d), block
    t holding Omega_{t,t+1}; ``c``: (..., T+1, d). Leading axes, when present,
    index independent systems (used for per-draw filtering).
    """

    diag_blocks: np.ndarray
    off_blocks: np.ndarray
    c: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.diag_blocks.shape[-3]

    @property
    def d(self) -> int:
        return self.diag_blocks.shape[-1]

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Full (N x N) matrix and stacked mean vector; single system only."""
        n, d = self.n_blocks, self.d
        omega = np.zeros((n * d, n * d))
        for t in range(n):
            omega[t * d:(t + 1) * d, t * d:(t + 1) * d] = self.diag_blocks[t]
        for t in range(n - 1):
            blk = self.off_blocks[t]
            omega[t * d:(t + 1) * d, (t + 1) * d:(t + 2) * d] = blk
            omega[(t + 1) * d:(t + 2) * d, t * d:(t + 1) * d] = blk.T
        return omega, self.c.reshape(-1)


def build_precision(y, X, beta_mean, theta_sr, sigma2_t) -> PrecisionSystem:
    """Assemble Omega and c for the non-centered state path.

    ``beta_mean``/``theta_sr`` may carry a leading draw axis (M, d), with
    ``sigma2_t`` then (M, T) or broadcastable to it.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    beta_mean = np.asarray(beta_mean, dtype=float)
    theta_sr = np.asarray(theta_sr, dtype=float)
    sigma2_t = np.asarray(sigma2_t, dtype=float)
    T, d = X.shape
    if y.shape != (T,) or beta_mean.shape[-1] != d or theta_sr.shape[-1] != d:
        raise ValueError(f"dimension mismatch: y {y.shape}, X {X.shape}, "
                         f"beta_mean {beta_mean.shape}, theta_sr {theta_sr.shape}")
    batch = np.broadcast_shapes(beta_mean.shape[:-1], theta_sr.shape[:-1], sigma2_t.shape[:-1])
    sigma2_t = np.broadcast_to(sigma2_t, batch + (T,))
    if np.any(sigma2_t <= 0):
        raise ValueError("sigma2_t must be positive")

    ystar = y - beta_mean @ X.T                                   # (..., T)
    F = X * theta_sr[..., None, :]                                # (..., T, d)
    w = 1.0 / sigma2_t
    eye = np.eye(d)

    diag = np.empty(batch + (T + 1, d, d))
    diag[..., 0, :, :] = 2.0 * eye
    diag[..., 1:, :, :] = (F[..., :, :, None] * F[..., :, None, :]) * w[..., :, None, None] + 2.0 * eye
    diag[..., T, :, :] -= eye
    off = np.broadcast_to(-eye, batch + (T, d, d)).copy()
    c = np.zeros(batch + (T + 1, d))
    c[..., 1:, :] = F * (w * ystar)[..., None]
    return PrecisionSystem(diag, off, c)


@lru_cache(maxsize=64)
def _band_index(n: int, d: int):
    """Scatter indices mapping block entries into lower band storage."""
    kd = 2 * d - 1
    # diagonal blocks: entry (r, i) with r >= i
    r, i = np.tril_indices(d)
    t = np.arange(n)
    diag_rows = np.broadcast_to(r - i, (n, r.size)).ravel()
    diag_cols = (t[:, None] * d + i).ravel()
    diag_src = (np.repeat(t, r.size), np.tile(r, n), np.tile(i, n))
    # sub-diagonal blocks Omega_{t+1,t} = off_t', entry (rr, i) at offset d + rr - i
    rr, ii = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    rr, ii = rr.ravel(), ii.ravel()
    s = np.arange(n - 1)
    off_rows = np.broadcast_to(d + rr - ii, (n - 1, rr.size)).ravel()
    off_cols = (s[:, None] * d + ii).ravel()
    off_src = (np.repeat(s, rr.size), np.tile(ii, n - 1), np.tile(rr, n - 1))
    return kd, (diag_rows, diag_cols), diag_src, (off_rows, off_cols), off_src


def to_band(sys: PrecisionSystem) -> np.ndarray:
    """Lower symmetric band storage ``ab[k, j] = Omega[j + k, j]``."""
    n, d = sys.n_blocks, sys.d
    kd, dpos, dsrc, opos, osrc = _band_index(n, d)
    ab = np.zeros((kd + 1, n * d))
    ab[dpos] = sys.diag_blocks[dsrc]
    if n > 1:
        ab[opos] = sys.off_blocks[osrc]
    return ab


def band_cholesky(sys: PrecisionSystem) -> np.ndarray:
    """Lower band Cholesky factor of Omega; raises :class:`DegeneracyError`."""
    d = sys.d
    ab = to_band(sys)
    L, info = lapack.dpbtrf(ab, lower=1)
    if info > 0:
        blk = (info - 1) // d
        raise DegeneracyError(f"precision matrix not positive definite at block {blk}", block=blk)
    if info < 0:
        raise ValueError(f"dpbtrf: illegal argument {-info}")
    small = np.flatnonzero(L[0] < DEGENERACY_TOL)
    if small.size:
        blk = int(small[0]) // d
        raise DegeneracyError(f"Cholesky pivot below {DEGENERACY_TOL} at block {blk}", block=blk)
    return L


def posterior_mean(sys: PrecisionSystem) -> np.ndarray:
    """Omega^{-1} c as a (T+1) x d array."""
    L = band_cholesky(sys)
    x, info = lapack.dpbtrs(L, sys.c.reshape(-1, 1), lower=1)
    return x[:, 0].reshape(sys.c.shape)


def sample_states(rng: np.random.Generator, sys: PrecisionSystem) -> np.ndarray:
    """Exact draw from N(Omega^{-1} c, Omega^{-1}), returned as (T+1) x d.

    With Omega = L L', solve L v = c, then x = L'^{-1} (v + z) for standard
    normal z.
    """
    L = band_cholesky(sys)
    v, _ = lapack.dtbtrs(L, sys.c.reshape(-1, 1), uplo="L", trans="N")
    z = rng.standard_normal(v.shape[0])
    x, _ = lapack.dtbtrs(L, v + z[:, None], uplo="L", trans="T")
    return x[:, 0].reshape(sys.c.shape)


def filter_moments(sys: PrecisionSystem, upto: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Forward block elimination up to time index ``upto`` (default: last).

    Sigma_0 = Omega_00^{-1}, m_0 = Sigma_0 c_0 and for t >= 1

        Sigma_t = (Omega_tt - Omega_{t-1,t}' Sigma_{t-1} Omega_{t-1,t})^{-1},
        m_t = Sigma_t (c_t - Omega_{t-1,t}' m_{t-1}).

    At the last index this is the posterior mean and covariance of
    beta_tilde_T. At an interior index it is the law of beta_tilde_t given
    beta_tilde_{t+1:T} = 0. Leading batch axes are carried through.
    """
    n = sys.n_blocks
    t0 = n - 1 if upto is None else int(upto)
    if not 0 <= t0 < n:
        raise ValueError(f"upto must lie in [0, {n - 1}], got {upto}")
    D = sys.diag_blocks
    O = sys.off_blocks
    c = sys.c

    def inv_pd(A, t):
        try:
            chol = np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise DegeneracyError(f"singular filtering step at block {t}", block=t) from None
        if np.any(np.diagonal(chol, axis1=-2, axis2=-1) < DEGENERACY_TOL):
            raise DegeneracyError(f"singular filtering step at block {t}", block=t)
        Linv = np.linalg.inv(chol)
        return np.swapaxes(Linv, -1, -2) @ Linv

    Sigma = inv_pd(D[..., 0, :, :], 0)
    m = (Sigma @ c[..., 0, :, None])[..., 0]
    for t in range(1, t0 + 1):
        Ot = O[..., t - 1, :, :]
        OtT = np.swapaxes(Ot, -1, -2)
        Sigma = inv_pd(D[..., t, :, :] - OtT @ Sigma @ Ot, t)
        m = (Sigma @ (c[..., t, :] - (OtT @ m[..., None])[..., 0])[..., None])[..., 0]
    return m, 0.5 * (Sigma + np.swapaxes(Sigma, -1, -2))
