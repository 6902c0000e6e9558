"""Band-wise estimation of ``(P_i, sigma_i)`` from noisy transform coefficients.

The likelihood is approximated by its dominant support. Within a band only
the support size ``k`` matters: for fixed ``k`` the best support holds the
``k`` largest ``|beta|``, and the stationary point in ``(P, sigma_i)`` is

    P = k / n,    sigma_i^2 = ||beta_top_k||^2 / k - sigma^2.

Substituting back leaves a function of ``k`` alone, maximized by an
exhaustive sweep over ``k = 0..n``. A per-atom penalty ``lambda`` (a
sparsity prior on the support size) stabilizes the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .model import ModelParams

P_FLOOR = 1e-6
SIGMA_FLOOR = 1e-6  # relative to the noise level


@dataclass(frozen=True)
class BandEstimate:
    band: str
    n: int
    k_star: int
    p_hat: float
    sigma_hat: float
    objective: float

    @property
    def active(self) -> bool:
        return self.k_star > 0


@dataclass(frozen=True)
class LambdaSchedule:
    """Penalty per included atom, one value per band (layout order)."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValueError("lambda values must be non-negative")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, layout, value: float) -> "LambdaSchedule":
        return cls((value,) * len(layout))

    @classmethod
    def default(cls, layout, lambda0: float = 2.0) -> "LambdaSchedule":
        """``lambda0`` on the coarsest bands, halved per level towards the finest.

        Detail bands at level ``l`` of an ``L``-level pyramid get
        ``lambda0 * 2**-(L - l)``; the approximation band gets ``lambda0``.
        """
        top = max(b.level for b in layout)
        return cls(tuple(lambda0 * 2.0 ** -(top - b.level) for b in layout))


def _sigma_floor(sigma):
    return SIGMA_FLOOR * sigma


def band_objective(k: int, sorted_beta_sq, sigma: float, lam: float, n_band: int) -> float:
    """Profile log-likelihood of support size ``k`` for one band.

    ``sorted_beta_sq`` holds the band's squared coefficients in descending
    order. ``k = 0`` gives 0 (with ``0 log 0 = 0``).
    """
    if not 0 <= k <= n_band:
        raise ValueError(f"k={k} outside [0, {n_band}]")
    if k == 0:
        return 0.0
    s2 = sigma ** 2
    energy = float(np.sum(sorted_beta_sq[:k]))
    var = max(energy / k - s2, _sigma_floor(sigma) ** 2)
    p = k / n_band
    return (-0.5 * k * np.log((var + s2) / s2)
            + float(xlogy(k, p) + xlogy(n_band - k, 1.0 - p))
            + energy * var / (2.0 * s2 * (s2 + var))
            - lam * k)


def objective_curve(sorted_beta_sq, sigma: float, lam: float) -> np.ndarray:
    """:func:`band_objective` for every ``k = 0..n`` at once, via prefix sums."""
    sorted_beta_sq = np.asarray(sorted_beta_sq, dtype=float)
    n = sorted_beta_sq.size
    s2 = sigma ** 2
    k = np.arange(1, n + 1, dtype=float)
    energy = np.cumsum(sorted_beta_sq)
    var = np.maximum(energy / k - s2, _sigma_floor(sigma) ** 2)
    p = k / n
    f = (-0.5 * k * np.log((var + s2) / s2)
         + xlogy(k, p) + xlogy(n - k, 1.0 - p)
         + energy * var / (2.0 * s2 * (s2 + var))
         - lam * k)
    return np.concatenate([[0.0], f])


def estimate_band(beta_band, sigma: float, lam: float, name: str = "band") -> BandEstimate:
    beta_band = np.asarray(beta_band, dtype=float).ravel()
    n = beta_band.size
    if n == 0:
        raise ValueError("band is empty")
    sq = np.sort(beta_band ** 2)[::-1]
    curve = objective_curve(sq, sigma, lam)
    k = int(np.argmax(curve))
    if k == 0:
        return BandEstimate(name, n, 0, P_FLOOR, _sigma_floor(sigma), 0.0)
    var = max(float(np.sum(sq[:k])) / k - sigma ** 2, _sigma_floor(sigma) ** 2)
    p = min(max(k / n, P_FLOOR), 1.0 - P_FLOOR)
    return BandEstimate(name, n, k, p, float(np.sqrt(var)), float(curve[k]))


def estimate_bands(beta, layout, sigma: float, schedule: LambdaSchedule) -> list[BandEstimate]:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (layout.m,):
        raise ValueError(f"beta has shape {beta.shape}, layout covers {layout.m} atoms")
    if len(schedule.values) != len(layout):
        raise ValueError("schedule and layout have different band counts")
    return [estimate_band(beta[b.indices], sigma, lam, b.name)
            for b, lam in zip(layout, schedule.values)]


def params_from_estimates(estimates, layout, sigma: float) -> ModelParams:
    return ModelParams.from_bands(layout, [e.p_hat for e in estimates],
                                  [e.sigma_hat for e in estimates], sigma)


def estimate_all(beta, layout, sigma: float, schedule: LambdaSchedule) -> ModelParams:
    """Per-atom model parameters estimated band by band."""
    return params_from_estimates(estimate_bands(beta, layout, sigma, schedule), layout, sigma)
