"""Worst-case excess-risk ratios relative to the oracle term.

For one atom with ``s = c2 beta^2 / (2 sigma^2)`` the excess-to-oracle ratio
is ``f_mmse(s) = 2s / (1 + G e^s)`` for MMSE and ``2s`` (dropped) or
``2s / (G e^s)`` (kept) for MAP. Both decrease in ``G``, so over a whole
signal the ratio is bounded by the curve of the smallest ``G_k``.

Scalar functions here also accept numpy arrays of ``G`` and work elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .model import ModelParams
from .risk import excess_map, excess_mmse, oracle_term
from .shrinkage import atom_constants

MMSE_SWITCH = 1.0 / (4.0 * np.e ** 2)
MAP_SWITCH = np.exp(-1.0)
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def g_factor(p, sigma_x, sigma):
    """``G = sqrt(1 - c^2) p / (1 - p)`` for one atom."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("p must lie strictly between 0 and 1")
    one_minus_c2 = sigma ** 2 / (np.asarray(sigma_x, dtype=float) ** 2 + sigma ** 2)
    out = np.sqrt(one_minus_c2) * p / (1.0 - p)
    return out if out.ndim else float(out)


def _check_G(G):
    G = np.asarray(G, dtype=float)
    if np.any(~(G > 0)):
        raise ValueError("G must be positive")
    return G


def _out(x):
    return x if np.ndim(x) else float(x)


def f_mmse(s, G):
    s = np.asarray(s, dtype=float)
    return 2.0 * s * expit(-(s + np.log(G)))


def f_map(s, G):
    s = np.asarray(s, dtype=float)
    t = s + np.log(G)
    return np.where(t < 0, 2.0 * s, 2.0 * s * np.exp(-np.maximum(t, 0.0)))


def worst_ratio_mmse(G, tol: float = 1e-12, max_iter: int = 400):
    """Maximizer ``s*`` and maximum ``r*`` of ``f_mmse`` over ``s >= 0``.

    ``s*`` is the root of ``G e^s (s - 1) = 1`` on ``s > 1``, found by
    bisection on the equivalent increasing function
    ``log G + s + log(s - 1)``.
    """
    G = _check_G(G)
    logG = np.log(G)
    lo = np.ones_like(G)
    hi = np.maximum(2.0, 10.0 - logG)
    with np.errstate(divide="ignore"):
        if np.any(logG + hi + np.log(hi - 1.0) <= 0):
            raise RuntimeError("bisection bracket does not contain the root")
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            pos = logG + mid + np.log(mid - 1.0) > 0
            hi = np.where(pos, mid, hi)
            lo = np.where(pos, lo, mid)
            if np.all(hi - lo <= tol * np.maximum(1.0, hi)):
                break
        else:
            raise RuntimeError("bisection did not converge")
    s = 0.5 * (lo + hi)
    return _out(s), _out(f_mmse(s, G))


def explicit_bound_mmse(G):
    """Closed-form upper bound on the MMSE worst ratio, with its regime label."""
    G = _check_G(G)
    log_branch = G < MMSE_SWITCH
    bound = np.where(log_branch, 2.0 * np.log(1.0 / (4.0 * G)), 2.0 / (np.sqrt(G) * np.e))
    regime = np.where(log_branch, "log", "exponential")
    return _out(bound), (regime if regime.ndim else str(regime))


def _golden_max(f, lo, hi, tol, max_iter=400):
    """Elementwise golden-section maximization of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol * np.maximum(1.0, b)):
            break
        left = fc >= fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        c_new = np.where(left, b - _GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + _GOLDEN * (b - a))
        fc_new = np.where(left, f(c_new), fd)
        fd_new = np.where(left, fc, f(d_new))
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    else:
        raise RuntimeError("golden-section search did not converge")
    s = 0.5 * (a + b)
    return s, f(s)


def worst_ratio_map(G, tol: float = 1e-12):
    """Numerical maximum of ``f_map`` over ``s >= 0``.

    ``f_map`` rises linearly up to ``s0 = log(1/G)`` then follows
    ``2 s e^{-s} / G``, so it is unimodal and golden-section search applies.
    """
    G = _check_G(G)
    hi = np.maximum(2.0, 2.0 - np.log(G))
    s, r = _golden_max(lambda s: f_map(s, G), np.zeros_like(G), hi, tol)
    return _out(s), _out(r)


def explicit_bound_map(G):
    """Closed-form MAP worst ratio (attained), with its regime label."""
    G = _check_G(G)
    log_branch = G < MAP_SWITCH
    with np.errstate(divide="ignore"):
        bound = np.where(log_branch, 2.0 * np.log(1.0 / G), 2.0 / (G * np.e))
    regime = np.where(log_branch, "log", "exponential")
    return _out(bound), (regime if regime.ndim else str(regime))


def worst_s_map(G):
    G = np.asarray(G, dtype=float)
    return _out(np.where(G < MAP_SWITCH, -np.log(G), 1.0))


def risk_ratio(beta, params: ModelParams, estimator: str = "mmse"):
    """Excess-to-oracle ratio ``MSE2 / MSE1`` at this observation."""
    if estimator == "mmse":
        num = excess_mmse(beta, params)
    elif estimator == "map":
        num = excess_map(beta, params)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return _out(num / oracle_term(beta, params))


def min_G(params: ModelParams) -> float:
    """Smallest per-atom ``G_k``; governs the worst case."""
    return float(np.exp(atom_constants(params).log_G.min()))


def worst_case_beta(s_star, c2, sigma):
    """Coefficient magnitude attaining ``s*``: ``sigma * sqrt(2 s*) / c``."""
    return sigma * np.sqrt(2.0 * np.asarray(s_star) / np.asarray(c2))


@dataclass(frozen=True)
class BoundReport:
    estimator: str
    G_m: float
    s_star: float
    r_star: float
    explicit_bound: float
    regime: str

    @property
    def oracle_multiplier(self) -> float:
        return 1.0 + self.explicit_bound


def bound_report(G_m: float, estimator: str = "mmse") -> BoundReport:
    if estimator == "mmse":
        s, r = worst_ratio_mmse(G_m)
        bound, regime = explicit_bound_mmse(G_m)
    elif estimator == "map":
        s, r = worst_ratio_map(G_m)
        bound, regime = explicit_bound_map(G_m)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return BoundReport(estimator, float(G_m), s, r, bound, regime)


def bounds_table(G_grid):
    """Rows ``(G_m, r*_mmse, bound_mmse, regime_mmse, r*_map, bound_map, regime_map)``."""
    G = _check_G(np.atleast_1d(G_grid))
    _, r_mmse = worst_ratio_mmse(G)
    b_mmse, reg_mmse = explicit_bound_mmse(G)
    _, r_map = worst_ratio_map(G)
    b_map, reg_map = explicit_bound_map(G)
    return [
        (float(G[i]), float(r_mmse[i]), float(b_mmse[i]), str(reg_mmse[i]),
         float(r_map[i]), float(b_map[i]), str(reg_map[i]))
        for i in range(G.size)
    ]
