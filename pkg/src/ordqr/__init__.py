"""Bayesian quantile regression for ordinal outcomes."""

__version__ = "0.1.0"

from .distributions import (QuantileSpec, al_cdf, al_pdf, make_rng, sample_al, sample_gig_half,
                            sample_inverse_gamma, sample_mvn, sample_truncated_normal, spawn_rngs)
from .model import (OrdinalDataset, PriorOr1, PriorOr2, delta_to_gamma, gamma_to_delta,
                    neg_log_lik_or1, neg_log_lik_or2, outcome_probs_or1, outcome_probs_or2)
from .or1 import Or1Config, Or1Fit, fit_or1
from .or2 import Or2Config, Or2Fit, fit_or2
from .evidence import DicBundle, deviance_or1, deviance_or2, log_marg_like_or1, log_marg_like_or2
from .diagnostics import (CovEffectResult, InefficiencySummary, cov_effect_or1, cov_effect_or2,
                          inefficiency_factor, summarize, trace_export)
from .simulate import DgpSpec, generate_or1_data, generate_or2_data
from ._backend import set_backend

__all__ = [
    "QuantileSpec", "al_cdf", "al_pdf", "make_rng", "sample_al", "sample_gig_half",
    "sample_inverse_gamma", "sample_mvn", "sample_truncated_normal", "spawn_rngs",
    "OrdinalDataset", "PriorOr1", "PriorOr2", "delta_to_gamma", "gamma_to_delta",
    "neg_log_lik_or1", "neg_log_lik_or2", "outcome_probs_or1", "outcome_probs_or2",
    "Or1Config", "Or1Fit", "fit_or1", "Or2Config", "Or2Fit", "fit_or2",
    "DicBundle", "deviance_or1", "deviance_or2", "log_marg_like_or1", "log_marg_like_or2",
    "CovEffectResult", "InefficiencySummary", "cov_effect_or1", "cov_effect_or2",
    "inefficiency_factor", "summarize", "trace_export",
    "DgpSpec", "generate_or1_data", "generate_or2_data", "set_backend",
]
