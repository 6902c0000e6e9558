"""Binary 8-bit PGM (P5) reading and writing."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


class PGMError(ValueError):
    pass


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode P5 bytes into a float ``(rows, cols)`` array of gray levels."""
    fields, pos = [], 0
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    magic, width, height, maxval = fields
    if magic != b"P5":
        raise PGMError(f"not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise PGMError("non-integer PGM header field") from None
    if width <= 0 or height <= 0:
        raise PGMError("PGM dimensions must be positive")
    if not 0 < maxval < 256:
        raise PGMError(f"only 8-bit PGM is supported (maxval {maxval})")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PGMError("missing whitespace after PGM header")
    pixels = data[pos + 1:]
    if len(pixels) < width * height:
        raise PGMError(f"expected {width * height} pixels, found {len(pixels)}")
    img = np.frombuffer(pixels[:width * height], dtype=np.uint8).reshape(height, width)
    return img.astype(float)


def read_pgm(path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def quantize(img) -> np.ndarray:
    """Round half away from zero, then clip to ``[0, 255]``."""
    img = np.asarray(img, dtype=float)
    if not np.all(np.isfinite(img)):
        raise PGMError("image contains non-finite values")
    rounded = np.sign(img) * np.floor(np.abs(img) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def encode_pgm(img) -> bytes:
    q = quantize(img)
    if q.ndim != 2 or q.size == 0:
        raise PGMError("image must be a non-empty 2-D array")
    rows, cols = q.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + q.tobytes()


def write_pgm(path, img) -> None:
    Path(path).write_bytes(encode_pgm(img))
