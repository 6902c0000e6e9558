"""Unitary dictionaries: analysis ``beta = D^T y`` and synthesis ``D x``.

Signals keep their natural shape (1-D, or 2-D for the wavelet dictionary);
coefficients are always a flat vector of length ``m = n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

# Orthonormal Daubechies filter with 5 vanishing moments (scaling/low-pass).
DB5 = np.array([
    0.16010239797419293,
    0.6038292697971896,
    0.7243085284377729,
    0.13842814590132074,
    -0.24229488706638203,
    -0.032244869584638375,
    0.07757149384004572,
    -0.006241490212798274,
    -0.012580751999081999,
    0.0033357252854737712,
])

KINDS = ("identity", "hadamard", "dct", "db5-2d", "random-orthogonal", "explicit-matrix")


def quadrature_mirror(h: np.ndarray) -> np.ndarray:
    """High-pass partner ``g[j] = (-1)^j h[L-1-j]`` of an orthonormal low-pass filter."""
    h = np.asarray(h, dtype=float)
    return h[::-1] * (-1.0) ** np.arange(h.size)


class Dictionary:
    """Base class for square orthogonal transforms."""

    kind: str = ""

    def __init__(self, shape):
        self.shape = tuple(int(s) for s in np.atleast_1d(shape))
        self.length = int(np.prod(self.shape))

    def _check_signal(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != self.shape:
            if y.size != self.length:
                raise ValueError(f"signal has {y.size} samples, dictionary expects {self.length}")
            y = y.reshape(self.shape)
        return y

    def _check_coeffs(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.length,):
            raise ValueError(f"coefficients have shape {x.shape}, expected ({self.length},)")
        return x

    def analyze(self, y) -> np.ndarray:
        raise NotImplementedError

    def synthesize(self, x) -> np.ndarray:
        raise NotImplementedError

    def matrix(self) -> np.ndarray:
        """Dense ``n x m`` matrix whose columns are the atoms (flattened)."""
        eye = np.eye(self.length)
        return np.stack([self.synthesize(e).ravel() for e in eye], axis=1)

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape})"


class IdentityDictionary(Dictionary):
    kind = "identity"

    def analyze(self, y):
        return self._check_signal(y).ravel().copy()

    def synthesize(self, x):
        return self._check_coeffs(x).reshape(self.shape).copy()


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform in Sylvester order along the last axis."""
    a = np.array(a, dtype=float)
    n = a.shape[-1]
    h = 1
    while h < n:
        blocks = a.reshape(a.shape[:-1] + (n // (2 * h), 2, h))
        top = blocks[..., 0, :].copy()
        bot = blocks[..., 1, :]
        blocks[..., 0, :] = top + bot
        blocks[..., 1, :] = top - bot
        a = blocks.reshape(a.shape)
        h *= 2
    return a


class HadamardDictionary(Dictionary):
    kind = "hadamard"

    def __init__(self, n: int):
        if n < 1 or n & (n - 1):
            raise ValueError(f"hadamard size must be a power of two, got {n}")
        super().__init__(n)

    def analyze(self, y):
        return _fwht(self._check_signal(y)) / np.sqrt(self.length)

    # the normalized Sylvester matrix is symmetric, so synthesis is the same map
    def synthesize(self, x):
        return _fwht(self._check_coeffs(x)) / np.sqrt(self.length)


class DCTDictionary(Dictionary):
    """Orthonormal DCT-II; atoms are the DCT basis vectors."""

    kind = "dct"

    def analyze(self, y):
        return sfft.dct(self._check_signal(y).ravel(), type=2, norm="ortho")

    def synthesize(self, x):
        return sfft.idct(self._check_coeffs(x), type=2, norm="ortho").reshape(self.shape)


class MatrixDictionary(Dictionary):
    """Explicit orthogonal ``n x n`` matrix with atoms as columns."""

    def __init__(self, matrix, kind: str = "explicit-matrix", tol: float = 1e-10):
        mat = np.array(matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"matrix must be square, got shape {mat.shape}")
        err = np.abs(mat.T @ mat - np.eye(mat.shape[0])).max()
        if err > tol:
            raise ValueError(f"matrix is not orthogonal (max |M^T M - I| = {err:.3g})")
        super().__init__(mat.shape[0])
        mat.flags.writeable = False
        self._mat = mat
        self.kind = kind

    def analyze(self, y):
        return self._mat.T @ self._check_signal(y)

    def synthesize(self, x):
        return self._mat @ self._check_coeffs(x)

    def matrix(self):
        return self._mat.copy()


def random_orthogonal(n: int, seed) -> np.ndarray:
    """Orthonormalize a seeded Gaussian matrix (sign-fixed QR, Haar distributed)."""
    from .model import make_rng

    rng = make_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _analysis_1d(x: np.ndarray, h: np.ndarray, g: np.ndarray, axis: int):
    """One periodized analysis step along ``axis``: returns (low, high) halves.

    ``low[k] = sum_j h[j] x[(2k + j - o) mod n]`` with ``o = len(h) // 2 - 1``;
    the phase offset ``o`` matches the common periodization convention.
    """
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    o = h.size // 2 - 1
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(h.size)[None, :] - o) % n
    gathered = x[..., idx]
    lo = gathered @ h
    hi = gathered @ g
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesis_1d(lo: np.ndarray, hi: np.ndarray, h: np.ndarray, g: np.ndarray, axis: int):
    """Adjoint of ``_analysis_1d``."""
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    n = 2 * lo.shape[-1]
    ulo = np.zeros(lo.shape[:-1] + (n,))
    uhi = np.zeros_like(ulo)
    ulo[..., ::2] = lo
    uhi[..., ::2] = hi
    o = h.size // 2 - 1
    idx = (np.arange(n)[:, None] - np.arange(h.size)[None, :] + o) % n
    out = ulo[..., idx] @ h + uhi[..., idx] @ g
    return np.moveaxis(out, -1, axis)


class Wavelet2D(Dictionary):
    """Separable 2-D orthogonal DWT with periodic boundaries (Mallat pyramid).

    Coefficients are ordered band by band from the coarsest approximation to
    the finest details: ``LL{L}, HL{L}, LH{L}, HH{L}, ..., HL1, LH1, HH1``.
    The first letter is the filter applied along axis 0, the second along
    axis 1.
    """

    kind = "db5-2d"

    def __init__(self, shape, levels: int = 3, filt=DB5):
        shape = tuple(int(s) for s in shape)
        if len(shape) != 2:
            raise ValueError("Wavelet2D needs a 2-D shape")
        if levels < 1:
            raise ValueError("levels must be >= 1")
        step = 2 ** levels
        if shape[0] % step or shape[1] % step:
            raise ValueError(f"shape {shape} is not divisible by 2**levels = {step}")
        super().__init__(shape)
        self.levels = int(levels)
        self.h = np.asarray(filt, dtype=float)
        self.g = quadrature_mirror(self.h)
        self._bands = self._band_shapes()

    def _band_shapes(self):
        rows, cols = self.shape
        L = self.levels
        bands = [(f"LL{L}", L, (rows >> L, cols >> L))]
        for lev in range(L, 0, -1):
            sh = (rows >> lev, cols >> lev)
            bands += [(f"HL{lev}", lev, sh), (f"LH{lev}", lev, sh), (f"HH{lev}", lev, sh)]
        return bands

    def analyze(self, y):
        a = self._check_signal(y)
        details = []
        for _ in range(self.levels):
            lo, hi = _analysis_1d(a, self.h, self.g, axis=1)
            ll, hl = _analysis_1d(lo, self.h, self.g, axis=0)
            lh, hh = _analysis_1d(hi, self.h, self.g, axis=0)
            details.append((hl, lh, hh))
            a = ll
        parts = [a.ravel()]
        for hl, lh, hh in reversed(details):
            parts += [hl.ravel(), lh.ravel(), hh.ravel()]
        return np.concatenate(parts)

    def synthesize(self, x):
        x = self._check_coeffs(x)
        chunks = []
        start = 0
        for _, _, sh in self._bands:
            size = sh[0] * sh[1]
            chunks.append(x[start:start + size].reshape(sh))
            start += size
        a = chunks[0]
        for i in range(self.levels):
            hl, lh, hh = chunks[1 + 3 * i: 4 + 3 * i]
            lo = _synthesis_1d(a, hl, self.h, self.g, axis=0)
            hi = _synthesis_1d(lh, hh, self.h, self.g, axis=0)
            a = _synthesis_1d(lo, hi, self.h, self.g, axis=1)
        return a

    def __repr__(self):
        return f"Wavelet2D(shape={self.shape}, levels={self.levels})"


@dataclass(frozen=True)
class Band:
    name: str
    level: int
    indices: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class BandLayout:
    """Partition of coefficient indices into named bands, low frequency first."""

    bands: tuple
    m: int

    def __post_init__(self):
        seen = np.zeros(self.m, dtype=int)
        for band in self.bands:
            np.add.at(seen, band.indices, 1)
        if not np.all(seen == 1):
            raise ValueError("bands must be disjoint and cover every index exactly once")

    def __len__(self):
        return len(self.bands)

    def __iter__(self):
        return iter(self.bands)

    @property
    def names(self):
        return [b.name for b in self.bands]

    @property
    def sizes(self):
        return [b.size for b in self.bands]

    def expand(self, values) -> np.ndarray:
        """Per-band values (scalar or one per band) to a per-atom vector."""
        values = np.broadcast_to(np.asarray(values, dtype=float), (len(self.bands),))
        out = np.empty(self.m)
        for band, v in zip(self.bands, values):
            out[band.indices] = v
        return out

    def split(self, coeffs):
        coeffs = np.asarray(coeffs)
        return [coeffs[b.indices] for b in self.bands]


def band_layout(dictionary: Dictionary) -> BandLayout:
    if isinstance(dictionary, Wavelet2D):
        bands = []
        start = 0
        for name, lev, sh in dictionary._bands:
            size = sh[0] * sh[1]
            bands.append(Band(name, lev, np.arange(start, start + size)))
            start += size
        return BandLayout(tuple(bands), dictionary.length)
    return BandLayout((Band("all", 0, np.arange(dictionary.length)),), dictionary.length)


def make_dictionary(kind: str, n: int | None = None, shape=None, levels: int = 3,
                    seed=None, matrix=None) -> Dictionary:
    """Build a dictionary by name.

    ``n`` sets the length of 1-D kinds; ``shape`` the image shape for
    ``db5-2d``; ``seed`` is required for ``random-orthogonal``; ``matrix`` for
    ``explicit-matrix``.
    """
    if kind == "identity":
        return IdentityDictionary(shape if shape is not None else n)
    if kind == "hadamard":
        return HadamardDictionary(n)
    if kind == "dct":
        return DCTDictionary(shape if shape is not None else n)
    if kind == "db5-2d":
        if shape is None:
            raise ValueError("db5-2d needs shape=(rows, cols)")
        return Wavelet2D(shape, levels)
    if kind == "random-orthogonal":
        if seed is None:
            raise ValueError("random-orthogonal needs a seed")
        return MatrixDictionary(random_orthogonal(n, seed), kind="random-orthogonal")
    if kind == "explicit-matrix":
        return MatrixDictionary(matrix)
    raise ValueError(f"unknown dictionary kind {kind!r}; expected one of {KINDS}")
