"""Brute-force reference for a general dictionary: all ``2^m`` supports.

For each support ``S`` the Gaussian model gives

* ``Q_S = V_S^{-1} + D_S^T D_S / sigma^2`` and the per-support oracle
  ``xhat_S = Q_S^{-1} D_S^T y / sigma^2`` with risk ``trace(Q_S^{-1})``;
* the unnormalized support posterior ``t_S = N(y; 0, C_S) P(S)`` where
  ``C_S = D_S V_S D_S^T + sigma^2 I``.

``det C_S`` and ``y^T C_S^{-1} y`` are obtained from the ``|S| x |S|`` matrix
``Q_S`` through the matrix inversion and determinant lemmas, never by
factorizing an ``n x n`` matrix. Weights stay in the log domain throughout.

This module is the ground truth the unitary closed forms are certified
against; it makes no use of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import logsumexp

from .model import ModelParams

MAX_ATOMS = 20
_CHUNK = 1 << 15


class EnumerationBudgetError(ValueError):
    pass


class DenseDictionary:
    """``n x m`` matrix with unit-norm columns; redundant (``m > n``) allowed."""

    def __init__(self, matrix, tol: float = 1e-12):
        if callable(getattr(matrix, "matrix", None)):
            matrix = matrix.matrix()
        mat = np.array(matrix, dtype=float)
        if mat.ndim != 2:
            raise ValueError("dictionary matrix must be 2-D")
        norms = np.linalg.norm(mat, axis=0)
        if np.any(np.abs(norms - 1.0) > tol):
            raise ValueError(f"columns must have unit norm (worst {np.abs(norms - 1).max():.3g})")
        mat.flags.writeable = False
        self.matrix = mat

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]


def _as_dense(dictionary) -> DenseDictionary:
    return dictionary if isinstance(dictionary, DenseDictionary) else DenseDictionary(dictionary)


@dataclass
class Enumeration:
    """Per-support quantities, rows sorted by bitmask (bit ``k`` = atom ``k``)."""

    masks: np.ndarray      # (N,) int64 bitmasks
    sizes: np.ndarray      # (N,) support cardinalities
    log_t: np.ndarray      # (N,) log t_S
    trace: np.ndarray      # (N,) trace(Q_S^{-1})
    xhat: np.ndarray       # (N, m) oracle estimates, zero off support
    quad: np.ndarray       # (N,) b_S^T Q_S^{-1} b_S
    logdet_C: np.ndarray   # (N,) log det C_S

    @property
    def log_norm(self) -> float:
        return float(logsumexp(self.log_t))

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_t - self.log_norm)


def enumerate_supports(y, dictionary, params: ModelParams) -> Enumeration:
    D = _as_dense(dictionary)
    y = np.asarray(y, dtype=float).ravel()
    n, m = D.n, D.m
    if m > MAX_ATOMS:
        raise EnumerationBudgetError(f"{m} atoms exceeds the enumeration budget of {MAX_ATOMS}")
    if y.size != n:
        raise ValueError(f"y has {y.size} samples, dictionary has {n} rows")
    if params.m != m:
        raise ValueError(f"params describe {params.m} atoms, dictionary has {m}")

    s2 = params.sigma ** 2
    var = params.sigma_x ** 2
    gram = D.matrix.T @ D.matrix
    b_full = D.matrix.T @ y
    yy = float(y @ y)
    log_odds_prior = np.log(params.p) - np.log1p(-params.p)
    base = np.sum(np.log1p(-params.p))

    masks, sizes, log_t, trace, quad, logdet_C, xhat = [], [], [], [], [], [], []
    for k in range(m + 1):
        combos = list(combinations(range(m), k))
        combos = np.array(combos, dtype=np.int64).reshape(len(combos), k)
        for start in range(0, combos.shape[0], _CHUNK):
            idx = combos[start:start + _CHUNK]
            N = idx.shape[0]
            x = np.zeros((N, m))
            if k == 0:
                q = np.zeros(N)
                ldq = np.zeros(N)
                tr = np.zeros(N)
            else:
                Q = gram[idx[:, :, None], idx[:, None, :]] / s2
                Q[:, np.arange(k), np.arange(k)] += 1.0 / var[idx]
                chol = np.linalg.cholesky(Q)
                ldq = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=1, axis2=2)), axis=1)
                Qinv = np.linalg.inv(Q)
                b = b_full[idx]
                z = np.einsum("nij,nj->ni", Qinv, b)
                q = np.einsum("ni,ni->n", b, z)
                tr = np.trace(Qinv, axis1=1, axis2=2)
                np.put_along_axis(x, idx, z / s2, axis=1)
            ldc = n * np.log(s2) + np.sum(np.log(var[idx]), axis=1) + ldq
            lt = -0.5 * ldc - 0.5 * (yy / s2 - q / s2 ** 2) + base + np.sum(log_odds_prior[idx], axis=1)
            masks.append(np.sum(np.left_shift(np.int64(1), idx), axis=1))
            sizes.append(np.full(N, k))
            log_t.append(lt)
            trace.append(tr)
            quad.append(q)
            logdet_C.append(ldc)
            xhat.append(x)

    masks = np.concatenate(masks)
    order = np.argsort(masks, kind="stable")
    cat = lambda parts: np.concatenate(parts)[order]  # noqa: E731
    return Enumeration(masks[order], cat(sizes), cat(log_t), cat(trace), cat(xhat), cat(quad),
                       cat(logdet_C))


@dataclass
class SupportPosterior:
    masks: np.ndarray
    probabilities: np.ndarray
    log_norm: float

    def mask_array(self, m: int) -> np.ndarray:
        return masks_to_bool(self.masks, m)


def masks_to_bool(masks, m: int) -> np.ndarray:
    return (np.asarray(masks)[:, None] >> np.arange(m)) & 1 == 1


def support_posterior(y, dictionary, params: ModelParams) -> SupportPosterior:
    """``P(S | y)`` for every support ``S``."""
    e = enumerate_supports(y, dictionary, params)
    return SupportPosterior(e.masks, e.probabilities, e.log_norm)


def exact_mmse(y, dictionary, params: ModelParams) -> np.ndarray:
    """Posterior-weighted average of the per-support oracle estimates."""
    e = enumerate_supports(y, dictionary, params)
    return e.probabilities @ e.xhat


def map_objective(y, dictionary, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """``Val(S)`` for every support, returned as ``(masks, values)``.

    ``Val(S) = ||Q_S^{-1/2} D_S^T y||^2 / (2 sigma^4) - log det(C_S) / 2 + log P(S)``,
    with the inverse square root taken from an eigendecomposition, a separate
    route from the Cholesky-based ``log t_S``.
    """
    D = _as_dense(dictionary)
    y = np.asarray(y, dtype=float).ravel()
    m = D.m
    if m > MAX_ATOMS:
        raise EnumerationBudgetError(f"{m} atoms exceeds the enumeration budget of {MAX_ATOMS}")
    s2 = params.sigma ** 2
    var = params.sigma_x ** 2
    masks, vals = [], []
    for bits in range(1 << m):
        idx = np.flatnonzero((bits >> np.arange(m)) & 1)
        Ds = D.matrix[:, idx]
        prior = np.sum(np.log(params.p[idx])) + np.sum(np.log1p(-np.delete(params.p, idx)))
        C = Ds @ np.diag(var[idx]) @ Ds.T + s2 * np.eye(D.n)
        _, logdet_C = np.linalg.slogdet(C)
        fit = 0.0
        if idx.size:
            Q = np.diag(1.0 / var[idx]) + Ds.T @ Ds / s2
            w, U = np.linalg.eigh(Q)
            r = (U / np.sqrt(w)) @ U.T @ (Ds.T @ y) / s2
            fit = 0.5 * float(r @ r)
        masks.append(bits)
        vals.append(fit - 0.5 * logdet_C + prior)
    return np.array(masks, dtype=np.int64), np.array(vals)


def _map_pick(masks, sizes, scores) -> int:
    """Index of the best score; ties go to the smaller support, then smaller bitmask."""
    best = scores.max()
    tied = np.flatnonzero(scores == best)
    return int(min(tied, key=lambda i: (sizes[i], masks[i])))


def exact_map(y, dictionary, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """MAP support (maximizing ``P(S | y)``) and the oracle estimate on it.

    Ranks supports by ``log t_S``, which differs from ``Val(S)`` only by a
    support-independent constant (see :func:`map_objective`).
    """
    e = enumerate_supports(y, dictionary, params)
    i = _map_pick(e.masks, e.sizes, e.log_t)
    support = masks_to_bool(e.masks[i:i + 1], e.xhat.shape[1])[0]
    return support, e.xhat[i].copy()


def exact_risk(y, dictionary, params: ModelParams, estimate) -> float:
    """``E[||estimate - x||^2 | y] = sum_S P(S|y) [trace(Q_S^{-1}) + ||estimate - xhat_S||^2]``."""
    e = enumerate_supports(y, dictionary, params)
    estimate = np.asarray(estimate, dtype=float)
    dev = np.sum((estimate[None, :] - e.xhat) ** 2, axis=1)
    return float(e.probabilities @ (e.trace + dev))


def all_masks(m: int) -> np.ndarray:
    """Every subset of ``m`` indices as a ``(2^m, m)`` boolean array, bitmask order."""
    return masks_to_bool(np.arange(1 << m, dtype=np.int64), m)


def product_weights(g) -> np.ndarray:
    """``prod_{i in S} g_i prod_{j not in S} (1 - g_j)`` for every subset ``S``."""
    g = np.asarray(g, dtype=float)
    masks = all_masks(g.size)
    return np.prod(np.where(masks, g, 1.0 - g), axis=1)
