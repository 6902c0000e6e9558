"""Closed-form oracle, MAP and MMSE shrinkage for unitary dictionaries.

Everything is elementwise on the transform coefficients ``beta = D^T y``.
Per-atom quantities:

* ``c2 = sigma_x**2 / (sigma_x**2 + sigma**2)``, the Wiener gain of a kept atom;
* ``G = sqrt(1 - c2) * p / (1 - p)``, the prior odds factor;
* ``log_q = c2 * beta**2 / (2 sigma**2) + log(G)``, the posterior log-odds that
  the atom is active;
* ``g = q / (1 + q)``, the posterior inclusion probability.

``q`` itself overflows for ``|beta| >~ 40 sigma / c`` so only ``log_q`` is
ever formed; ``g`` and ``1 - g`` come from the logistic function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .model import ModelParams


@dataclass(frozen=True)
class AtomConstants:
    c2: np.ndarray
    one_minus_c2: np.ndarray
    log_G: np.ndarray

    @property
    def G(self) -> np.ndarray:
        return np.exp(self.log_G)


def atom_constants(params: ModelParams) -> AtomConstants:
    vx = params.sigma_x ** 2
    v = params.sigma ** 2
    c2 = vx / (vx + v)
    one_minus_c2 = v / (vx + v)
    log_G = 0.5 * np.log(one_minus_c2) + np.log(params.p) - np.log1p(-params.p)
    return AtomConstants(c2, one_minus_c2, log_G)


def _check_beta(beta, params: ModelParams) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.shape[-1:] != (params.m,):
        raise ValueError(f"beta has shape {beta.shape}, expected trailing length {params.m}")
    return beta


def log_odds(beta, params: ModelParams) -> np.ndarray:
    """Posterior log-odds ``log q_k`` of each atom being in the support."""
    beta = _check_beta(beta, params)
    k = atom_constants(params)
    return k.c2 * beta ** 2 / (2.0 * params.sigma ** 2) + k.log_G


@dataclass(frozen=True)
class Estimate:
    xhat: np.ndarray
    support: np.ndarray | None = None


def oracle_estimate(beta, support, params: ModelParams) -> Estimate:
    beta = _check_beta(beta, params)
    support = np.asarray(support, dtype=bool)
    if support.shape != beta.shape:
        raise ValueError("support and beta lengths differ")
    c2 = atom_constants(params).c2
    return Estimate(np.where(support, c2 * beta, 0.0), support)


def map_shrink(beta, params: ModelParams) -> Estimate:
    """Hard shrinkage: keep ``c2 * beta`` where ``q > 1`` (strictly), else zero."""
    beta = _check_beta(beta, params)
    support = log_odds(beta, params) > 0
    c2 = atom_constants(params).c2
    return Estimate(np.where(support, c2 * beta, 0.0), support)


def mmse_shrink(beta, params: ModelParams) -> Estimate:
    """Soft shrinkage ``g * c2 * beta``."""
    beta = _check_beta(beta, params)
    g = expit(log_odds(beta, params))
    return Estimate(g * atom_constants(params).c2 * beta)


def map_threshold(params: ModelParams) -> np.ndarray:
    """Per-atom MAP threshold on ``|beta|``; zero where ``G >= 1`` (always kept)."""
    k = atom_constants(params)
    t = np.sqrt(2.0) * params.sigma / np.sqrt(k.c2) * np.sqrt(np.maximum(-k.log_G, 0.0))
    return t


ESTIMATORS = {"map": map_shrink, "mmse": mmse_shrink}


def shrinkage_curve(estimator: str, p: float, sigma_x: float, sigma: float, betas) -> np.ndarray:
    """Tabulate a single-atom shrinkage function as rows of ``(beta, psi(beta))``."""
    betas = np.asarray(betas, dtype=float).ravel()
    if not np.all(np.isfinite(betas)):
        raise ValueError("beta grid must be finite")
    try:
        shrink = ESTIMATORS[estimator]
    except KeyError:
        raise ValueError(f"unknown estimator {estimator!r}") from None
    params = ModelParams.homoscedastic(betas.size, p, sigma_x, sigma)
    return np.column_stack([betas, shrink(betas, params).xhat])
