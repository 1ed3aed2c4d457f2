"""Bayesian shrinkage for time-varying parameter regressions."""
from __future__ import annotations

__version__ = "0.1.0"

from .diagnostics import SummaryRow, ess, format_table, hpd_interval, summarize
from .dists import sample_gig
from .gibbs import run_chain
from .model import (ChainState, DrawsStore, MCMCConfig, MHTuning, PriorSpec, TimeSeriesData,
                    ValidationError, default_prior_spec, validate)
from .predict import PredictiveMoments, eval_pred_dens, lpds, predictive_moments
from .simulate import SimConfig, SimResult, sim_tvp
from .states import DegeneracyError, build_precision, filter_moments, sample_states

__all__ = [
    "ChainState", "DegeneracyError", "DrawsStore", "MCMCConfig", "MHTuning", "PredictiveMoments",
    "PriorSpec", "SimConfig", "SimResult", "SummaryRow", "TimeSeriesData", "ValidationError",
    "build_precision", "default_prior_spec", "ess", "eval_pred_dens", "filter_moments",
    "format_table", "hpd_interval", "lpds", "predictive_moments", "run_chain", "sample_gig",
    "sample_states", "sim_tvp", "summarize", "validate",
]
