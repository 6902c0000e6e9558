"""Conditional mean-squared errors ``E[||xhat - x||^2 | y]`` in the unitary case.

All closed forms accept ``beta`` with arbitrary leading batch dimensions and
sum over the last (atom) axis. Risks are in the coefficient domain, which by
unitarity equals the signal-domain error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .model import ModelParams, make_rng
from .shrinkage import atom_constants, log_odds, map_shrink


def posterior_inclusion(beta, params: ModelParams) -> np.ndarray:
    """``g_k = P(k in S | y)``."""
    return expit(log_odds(beta, params))


def _g_pair(beta, params):
    lq = log_odds(beta, params)
    return expit(lq), expit(-lq)


def oracle_risk(support, params: ModelParams) -> np.ndarray:
    """Risk of the oracle that knows ``support``: ``sigma^2 * sum_{k in S} c2_k``."""
    support = np.asarray(support, dtype=bool)
    c2 = atom_constants(params).c2
    return params.sigma ** 2 * np.sum(np.where(support, c2, 0.0), axis=-1)


def oracle_term(beta, params: ModelParams) -> np.ndarray:
    """Posterior-expected oracle risk ``sigma^2 * sum_k c2_k g_k`` (MSE1)."""
    c2 = atom_constants(params).c2
    return params.sigma ** 2 * np.sum(c2 * posterior_inclusion(beta, params), axis=-1)


def excess_mmse(beta, params: ModelParams) -> np.ndarray:
    """Excess over the oracle term due to the unknown support, MMSE (MSE2)."""
    beta = np.asarray(beta, dtype=float)
    c2 = atom_constants(params).c2
    g, h = _g_pair(beta, params)
    return np.sum(c2 ** 2 * beta ** 2 * g * h, axis=-1)


def excess_map(beta, params: ModelParams, map_support=None) -> np.ndarray:
    """MAP counterpart of :func:`excess_mmse`.

    Per atom the bracket ``g + I (1 - 2g)`` is ``1 - g`` when kept and ``g``
    when dropped; both branches are evaluated without cancellation.
    """
    beta = np.asarray(beta, dtype=float)
    if map_support is None:
        map_support = map_shrink(beta, params).support
    c2 = atom_constants(params).c2
    g, h = _g_pair(beta, params)
    return np.sum(c2 ** 2 * beta ** 2 * np.where(map_support, h, g), axis=-1)


def mmse_risk(beta, params: ModelParams) -> np.ndarray:
    return oracle_term(beta, params) + excess_mmse(beta, params)


def map_risk(beta, params: ModelParams, map_support=None) -> np.ndarray:
    return oracle_term(beta, params) + excess_map(beta, params, map_support)


def expected_support_size(beta, params: ModelParams) -> np.ndarray:
    return np.sum(posterior_inclusion(beta, params), axis=-1)


def estimate_risk(beta, params: ModelParams, xhat) -> np.ndarray:
    """Risk of an arbitrary estimate, marginalizing each atom over on/off.

    ``sum_k g_k (c2_k sigma^2 + (xhat_k - c2_k beta_k)^2) + (1 - g_k) xhat_k^2``
    """
    beta = np.asarray(beta, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    c2 = atom_constants(params).c2
    g, h = _g_pair(beta, params)
    on = c2 * params.sigma ** 2 + (xhat - c2 * beta) ** 2
    return np.sum(g * on + h * xhat ** 2, axis=-1)


@dataclass
class RiskReport:
    mse_oracle: float
    mse_mmse: float
    mse_map: float
    expected_support_size: float
    per_band: dict = field(default_factory=dict)


def risk_report(beta, params: ModelParams, layout=None) -> RiskReport:
    """Oracle-term, MMSE and MAP risks for one observation, optionally per band."""
    beta = np.asarray(beta, dtype=float)
    c2 = atom_constants(params).c2
    g, h = _g_pair(beta, params)
    keep = map_shrink(beta, params).support
    oracle = params.sigma ** 2 * c2 * g
    mmse = oracle + c2 ** 2 * beta ** 2 * g * h
    map_ = oracle + c2 ** 2 * beta ** 2 * np.where(keep, h, g)
    report = RiskReport(float(oracle.sum()), float(mmse.sum()), float(map_.sum()), float(g.sum()))
    if layout is not None:
        for band in layout:
            i = band.indices
            report.per_band[band.name] = {
                "mse_oracle": float(oracle[i].sum()),
                "mse_mmse": float(mmse[i].sum()),
                "mse_map": float(map_[i].sum()),
                "expected_support_size": float(g[i].sum()),
            }
    return report


def sample_posterior(beta, params: ModelParams, samples: int, seed) -> np.ndarray:
    """Draw ``x ~ p(x | y)``: per-atom Bernoulli(g) support, then Gaussian on it."""
    beta = np.asarray(beta, dtype=float)
    rng = make_rng(seed)
    c2 = atom_constants(params).c2
    g = posterior_inclusion(beta, params)
    on = rng.random((samples, params.m)) < g
    z = rng.standard_normal((samples, params.m))
    return np.where(on, c2 * beta + np.sqrt(c2) * params.sigma * z, 0.0)


def posterior_mc_risk(beta, params: ModelParams, estimate, samples: int, seed,
                      chunk: int = 8192) -> tuple[float, float]:
    """Monte-Carlo ``E[||estimate - x||^2 | y]`` and its standard error."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    estimate = np.asarray(estimate, dtype=float)
    errs = []
    for i, start in enumerate(range(0, samples, chunk)):
        n = min(chunk, samples - start)
        x = sample_posterior(beta, params, n, make_rng(seed, i, "posterior"))
        errs.append(np.sum((estimate - x) ** 2, axis=1))
    errs = np.concatenate(errs)
    se = errs.std(ddof=1) / np.sqrt(samples) if samples > 1 else float("inf")
    return float(errs.mean()), float(se)

