"""Data containers, prior/sampler configuration and validation.

Notation used throughout the package:

* ``beta_mean`` -- the initial-state means beta_j,
* ``theta_sr`` -- the signed innovation standard deviations sqrt(theta_j),
* ``beta_tilde`` -- the standardized (non-centered) state paths,
* ``xi2`` / ``tau2`` -- local prior variances of sqrt(theta_j) / beta_j,
* ``kappa2_B`` / ``lambda2_B`` -- global shrinkage parameters,
* ``a_*`` / ``c_*`` -- pole / tail parameters.
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

MOD_TYPES = ("triple", "double", "ridge")
MH_PARAMS = ("a_xi", "a_tau", "c_xi", "c_tau")
SHRINK_PARAMS = ("a_xi", "a_tau", "c_xi", "c_tau", "kappa2_B", "lambda2_B")


class ValidationError(ValueError):
    """Raised when a configuration cannot be used; carries every problem found."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class TimeSeriesData:
    """Response ``y`` (length T) and covariates ``X`` (T x d).

    The library takes ``X`` as given; add an intercept column yourself
    (the CLI does it for you unless told otherwise).
    """

    y: np.ndarray
    X: np.ndarray
    column_names: tuple[str, ...] = ()
    time_index: tuple[Any, ...] | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise ValueError("X must be a 2-D array")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"y has {y.shape[0]} rows but X has {X.shape[0]}")
        names = tuple(self.column_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError("column_names must have one label per column of X")
        if self.time_index is not None and len(self.time_index) != y.shape[0]:
            raise ValueError("time_index must have length T")
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_names", names)
        if self.time_index is not None:
            object.__setattr__(self, "time_index", tuple(self.time_index))

    @property
    def T(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def head(self, n: int) -> "TimeSeriesData":
        """First ``n`` observations."""
        ti = None if self.time_index is None else self.time_index[:n]
        return TimeSeriesData(self.y[:n], self.X[:n], self.column_names, ti)

    def has_intercept(self) -> bool:
        return self.d > 0 and bool(np.all(self.X[:, 0] == 1.0))


@dataclass(frozen=True)
class Hyper:
    alpha_a_xi: float = 5.0
    beta_a_xi: float = 10.0
    alpha_a_tau: float = 5.0
    beta_a_tau: float = 10.0
    alpha_c_xi: float = 5.0
    beta_c_xi: float = 2.0
    alpha_c_tau: float = 5.0
    beta_c_tau: float = 2.0
    d1: float = 0.001
    d2: float = 0.001
    e1: float = 0.001
    e2: float = 0.001


@dataclass(frozen=True)
class HomoskedHyper:
    c0: float = 2.5
    g0: float = 5.0
    G0: float = 5.0 / 1.5


@dataclass(frozen=True)
class SvHyper:
    b_mu: float = 0.0
    B_mu: float = 1.0
    a_phi: float = 5.0
    b_phi: float = 1.5
    B_sigma: float = 1.0


@dataclass(frozen=True)
class PriorSpec:
    """Shrinkage prior configuration.

    Fixed values (``a_xi`` ... ``lambda2_B``) are used when the matching
    ``learn_*`` flag is off, and as chain starting values otherwise.
    """

    mod_type: str = "double"
    learn_a_xi: bool = True
    learn_a_tau: bool = True
    learn_c_xi: bool = False
    learn_c_tau: bool = False
    learn_kappa2_B: bool = True
    learn_lambda2_B: bool = True
    a_xi: float = 0.1
    a_tau: float = 0.1
    c_xi: float = 0.1
    c_tau: float = 0.1
    kappa2_B: float = 20.0
    lambda2_B: float = 20.0
    hyper: Hyper = field(default_factory=Hyper)
    sv: bool = False
    homosked_hyper: HomoskedHyper = field(default_factory=HomoskedHyper)
    sv_hyper: SvHyper = field(default_factory=SvHyper)

    def learns(self, name: str) -> bool:
        return bool(getattr(self, f"learn_{name}"))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PriorSpec":
        d = dict(d)
        nested = {"hyper": Hyper, "homosked_hyper": HomoskedHyper, "sv_hyper": SvHyper}
        for key, typ in nested.items():
            if key in d and isinstance(d[key], dict):
                d[key] = typ(**d[key])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "PriorSpec":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class MHTuning:
    adaptive: bool = True
    initial_sd: float = 1.0
    batch_size: int = 50
    max_adapt: float = 0.01
    target_rate: float = 0.44


def _default_mh() -> dict[str, MHTuning]:
    return {name: MHTuning() for name in MH_PARAMS}


@dataclass(frozen=True)
class MCMCConfig:
    niter: int = 10000
    nburn: int | None = None
    nthin: int = 1
    seed: int = 0
    mh_tuning: dict[str, MHTuning] = field(default_factory=_default_mh)

    def __post_init__(self):
        if self.nburn is None:
            object.__setattr__(self, "nburn", int(round(self.niter / 2)))
        tuning = _default_mh()
        tuning.update(self.mh_tuning)
        object.__setattr__(self, "mh_tuning", tuning)

    @property
    def n_stored(self) -> int:
        return max(0, (self.niter - self.nburn) // self.nthin)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MCMCConfig":
        d = dict(d)
        if "mh_tuning" in d:
            d["mh_tuning"] = {k: MHTuning(**v) if isinstance(v, dict) else v
                              for k, v in d["mh_tuning"].items()}
        return cls(**d)


def default_prior_spec(mod_type: str = "double", sv: bool = False) -> PriorSpec:
    """Default prior for ``mod_type`` with every applicable parameter learned."""
    if mod_type not in MOD_TYPES:
        raise ValueError(f"mod_type must be one of {MOD_TYPES}, got {mod_type!r}")
    learn_ac = mod_type != "ridge"
    learn_c = mod_type == "triple"
    return PriorSpec(
        mod_type=mod_type,
        learn_a_xi=learn_ac,
        learn_a_tau=learn_ac,
        learn_c_xi=learn_c,
        learn_c_tau=learn_c,
        learn_kappa2_B=learn_ac,
        learn_lambda2_B=learn_ac,
        sv=sv,
    )


@dataclass(frozen=True)
class CheckedConfig:
    """Output of :func:`validate`: a normalized spec plus notes on what was changed."""

    spec: PriorSpec
    cfg: MCMCConfig
    data: TimeSeriesData
    learned: dict[str, bool]
    warnings: tuple[str, ...] = ()


def _positive(name: str, value: float, errors: list[str]) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        errors.append(f"{name} must be a positive finite number, got {value!r}")


def validate(spec: PriorSpec, cfg: MCMCConfig, data: TimeSeriesData) -> CheckedConfig:
    """Check a prior/sampler/data triple and apply the ignore rules.

    Under ``ridge`` every learn flag is switched off; under ``double`` the
    tail-parameter flags are. Each switch-off of a flag that was on is
    reported in ``warnings``. All problems are collected before raising
    :class:`ValidationError`.
    """
    errors: list[str] = []
    notes: list[str] = []

    if spec.mod_type not in MOD_TYPES:
        errors.append(f"mod_type must be one of {MOD_TYPES}, got {spec.mod_type!r}")

    forced_off: tuple[str, ...] = ()
    if spec.mod_type == "ridge":
        forced_off = SHRINK_PARAMS
    elif spec.mod_type == "double":
        forced_off = ("c_xi", "c_tau")
    changes = {}
    for name in forced_off:
        if spec.learns(name):
            notes.append(f"learn_{name} ignored under mod_type={spec.mod_type}")
        changes[f"learn_{name}"] = False
    spec = dataclasses.replace(spec, **changes)

    for name in ("kappa2_B", "lambda2_B", "a_xi", "a_tau"):
        _positive(name, getattr(spec, name), errors)
    if spec.mod_type == "triple":
        for name in ("c_xi", "c_tau"):
            _positive(name, getattr(spec, name), errors)
        for name in ("a_xi", "a_tau", "c_xi", "c_tau"):
            v = getattr(spec, name)
            if spec.learns(name) and not (0 < v < 0.5):
                errors.append(f"starting value {name}={v} must lie in (0, 0.5) when learned under NGG")
    for group in (spec.hyper, spec.homosked_hyper):
        for f in dataclasses.fields(group):
            _positive(f.name, getattr(group, f.name), errors)
    sv = spec.sv_hyper
    if not math.isfinite(sv.b_mu):
        errors.append("b_mu must be finite")
    for name in ("B_mu", "a_phi", "b_phi", "B_sigma"):
        _positive(name, getattr(sv, name), errors)

    if cfg.niter < 1 or cfg.nthin < 1 or cfg.nburn < 0:
        errors.append("niter and nthin must be positive and nburn nonnegative")
    if cfg.nburn >= cfg.niter:
        errors.append(f"empty draw window: nburn={cfg.nburn} >= niter={cfg.niter}")
    for name, tun in cfg.mh_tuning.items():
        if name not in MH_PARAMS:
            errors.append(f"unknown MH parameter {name!r}")
            continue
        _positive(f"{name} initial_sd", tun.initial_sd, errors)
        _positive(f"{name} max_adapt", tun.max_adapt, errors)
        if int(tun.batch_size) < 1:
            errors.append(f"{name} batch_size must be a positive integer")
        if not 0 < tun.target_rate < 1:
            errors.append(f"{name} target_rate must lie in (0, 1)")

    if data.d == 0:
        errors.append("no covariates (d = 0)")
    if data.T < 2:
        errors.append(f"need at least 2 observations, got T={data.T}")
    if not (np.all(np.isfinite(data.y)) and np.all(np.isfinite(data.X))):
        errors.append("data contain NaN or infinite values")

    if errors:
        raise ValidationError(errors)
    for note in notes:
        warnings.warn(note, stacklevel=2)
    learned = {name: spec.learns(name) for name in SHRINK_PARAMS}
    return CheckedConfig(spec=spec, cfg=cfg, data=data, learned=learned, warnings=tuple(notes))


@dataclass
class ChainState:
    """All latent quantities of one sweep. Owned by a single chain."""

    beta_tilde: np.ndarray
    beta_mean: np.ndarray
    theta_sr: np.ndarray
    xi2: np.ndarray
    tau2: np.ndarray
    kappa2_j: np.ndarray
    lambda2_j: np.ndarray
    kappa2_B: float
    lambda2_B: float
    a_xi: float
    a_tau: float
    c_xi: float
    c_tau: float
    aux_d2_xi: float = 1.0
    aux_d2_tau: float = 1.0
    sigma2: float = 1.0
    C0: float = 1.0
    h: np.ndarray | None = None
    sv_mu: float = 0.0
    sv_phi: float = 0.5
    sv_sigma2: float = 0.1
    mixture_indicators: np.ndarray | None = None

    def copy(self) -> "ChainState":
        out = dataclasses.replace(self)
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, np.ndarray):
                setattr(out, f.name, v.copy())
        return out

    def sigma2_t(self, T: int) -> np.ndarray:
        """Observation variances for t = 1..T."""
        if self.h is not None:
            return np.exp(self.h[1:])
        return np.full(T, self.sigma2)

    def beta_paths(self) -> np.ndarray:
        """Centered state paths, (T+1) x d."""
        return self.beta_mean + self.theta_sr * self.beta_tilde


@dataclass
class DrawsStore:
    """Thinned post-burn-in draws.

    ``draws`` maps parameter names to arrays whose leading axis is the draw
    index. Vector parameters are (M, d); ``beta_tilde`` is (M, T+1, d) and
    ``h`` is (M, T+1).
    """

    draws: dict[str, np.ndarray]
    mh_diag: dict[str, dict]
    priorvals: PriorSpec
    cfg: MCMCConfig
    data: TimeSeriesData
    diag: dict[str, Any] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return int(self.draws["beta_mean"].shape[0])

    def __getitem__(self, key: str) -> np.ndarray:
        return self.draws[key]

    def __contains__(self, key: str) -> bool:
        return key in self.draws

    def beta_paths(self) -> np.ndarray:
        """Centered state paths beta_jt = beta_j + sqrt(theta_j) * beta_tilde_jt, (M, T+1, d)."""
        bt = self.draws["beta_tilde"]
        return self.draws["beta_mean"][:, None, :] + self.draws["theta_sr"][:, None, :] * bt

    def sigma2_paths(self) -> np.ndarray | None:
        if "h" not in self.draws:
            return None
        return np.exp(self.draws["h"])
