"""Bernoulli-Gaussian generative model: parameters and sampling.

Each atom ``k`` enters the support independently with probability ``p[k]``;
on-support coefficients are zero-mean Gaussian with standard deviation
``sigma_x[k]``; observations add white Gaussian noise of standard deviation
``sigma``.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Per-atom prior parameters plus the noise level.

    ``p`` and ``sigma_x`` are stored as float arrays of equal length ``m``.
    A single shared ``sigma_x`` is the homoscedastic special case.
    """

    p: np.ndarray
    sigma_x: np.ndarray
    sigma: float

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        sx = np.atleast_1d(np.asarray(self.sigma_x, dtype=float))
        if p.ndim != 1 or sx.ndim != 1:
            raise ValueError("p and sigma_x must be 1-D")
        if p.shape != sx.shape:
            raise ValueError(f"p has length {p.size} but sigma_x has length {sx.size}")
        if not np.all((p > 0) & (p < 1)):
            raise ValueError("every p must satisfy 0 < p < 1")
        if not np.all(np.isfinite(sx) & (sx > 0)):
            raise ValueError("every sigma_x must be positive and finite")
        sigma = float(self.sigma)
        if not (np.isfinite(sigma) and sigma > 0):
            raise ValueError("sigma must be positive and finite")
        p.flags.writeable = False
        sx.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "sigma_x", sx)
        object.__setattr__(self, "sigma", sigma)

    @property
    def m(self) -> int:
        return self.p.size

    @classmethod
    def homoscedastic(cls, m: int, p: float, sigma_x: float, sigma: float) -> "ModelParams":
        return cls(np.full(m, p), np.full(m, sigma_x), sigma)

    @classmethod
    def from_bands(cls, layout, p, sigma_x, sigma: float) -> "ModelParams":
        """Expand per-band values to per-atom vectors through a band layout."""
        return cls(layout.expand(p), layout.expand(sigma_x), sigma)

    def with_sigma(self, sigma: float) -> "ModelParams":
        return ModelParams(self.p, self.sigma_x, sigma)


def stream_tag(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def make_rng(seed, *keys) -> np.random.Generator:
    """Return a generator keyed by ``(seed, *keys)``.

    Keys may be ints or short strings (stream tags). Passing an existing
    ``Generator`` returns it unchanged, so every sampling call accepts either.
    """
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ValueError("keys cannot be combined with an existing Generator")
        return seed
    words = [int(seed)]
    for key in keys:
        words.append(stream_tag(key) if isinstance(key, str) else int(key))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def sample_support(params: ModelParams, seed) -> np.ndarray:
    """Draw a support mask, one independent biased coin per atom."""
    rng = make_rng(seed)
    return rng.random(params.m) < params.p


def sample_coefficients(params: ModelParams, support: np.ndarray, seed) -> np.ndarray:
    support = np.asarray(support, dtype=bool)
    if support.shape != (params.m,):
        raise ValueError(f"support has shape {support.shape}, expected ({params.m},)")
    rng = make_rng(seed)
    z = rng.standard_normal(params.m)
    return np.where(support, z * params.sigma_x, 0.0)


def synthesize_observation(dictionary, x: np.ndarray, sigma: float, seed) -> np.ndarray:
    """Return ``D x`` plus white Gaussian noise, shaped like the dictionary's signals."""
    x = np.asarray(x, dtype=float)
    if x.shape != (dictionary.length,):
        raise ValueError(f"x has shape {x.shape}, expected ({dictionary.length},)")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    clean = dictionary.synthesize(x)
    if sigma == 0:
        return clean
    rng = make_rng(seed)
    return clean + sigma * rng.standard_normal(clean.shape)


def sample_signal(dictionary, params: ModelParams, seed, trial: int = 0):
    """Draw ``(support, x, y)`` from the full generative model.

    Support, coefficients and noise use separate streams keyed by
    ``(seed, trial, tag)`` so trials are reproducible independently.
    """
    support = sample_support(params, make_rng(seed, trial, "support"))
    x = sample_coefficients(params, support, make_rng(seed, trial, "coeffs"))
    y = synthesize_observation(dictionary, x, params.sigma, make_rng(seed, trial, "noise"))
    return support, x, y
