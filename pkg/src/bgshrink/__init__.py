"""Exact MAP and MMSE shrinkage under a Bernoulli-Gaussian prior on unitary dictionaries."""

from .bounds import (bound_report, bounds_table, explicit_bound_map, explicit_bound_mmse,
                     risk_ratio, worst_ratio_map, worst_ratio_mmse)
from .dictionary import BandLayout, Dictionary, band_layout, make_dictionary
from .estimation import BandEstimate, LambdaSchedule, estimate_all, estimate_band
from .exact import exact_map, exact_mmse, exact_risk, support_posterior
from .model import ModelParams, sample_signal
from .risk import map_risk, mmse_risk, oracle_risk, posterior_mc_risk, risk_report
from .shrinkage import map_shrink, map_threshold, mmse_shrink, oracle_estimate

__version__ = "0.1.0"
