"""8-bit RGB rasters, quantization and binary PPM (P6) I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import WriteError


@dataclass(frozen=True, eq=False)
class Image:
    """Row-major 8-bit RGB raster; ``pixels`` has shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if px.dtype != np.uint8 or px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"expected a non-empty (h, w, 3) uint8 array, got {px.dtype} {px.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    @classmethod
    def filled(cls, width: int, height: int, rgb) -> Image:
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[...] = rgb
        return cls(px)


def quantize(fb: np.ndarray) -> np.ndarray:
    """Linear color to bytes: clamp(round(c * 255), 0, 255), halves rounded up.

    Shaded colors are never negative, so rounding half up is rounding half
    away from zero.
    """
    scaled = np.floor(fb * 255.0 + 0.5)
    np.clip(scaled, 0.0, 255.0, out=scaled)
    return scaled.astype(np.uint8)


def encode_ppm(image: Image) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image.pixels).tobytes()


def decode_ppm(data: bytes) -> Image:
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P6" or int(tokens[3]) != 255:
        raise ValueError("only binary P6 images with maxval 255 are supported")
    width, height = int(tokens[1]), int(tokens[2])
    body = data[pos + 1:pos + 1 + width * height * 3]
    if len(body) != width * height * 3:
        raise ValueError("truncated PPM body")
    return Image(np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy())


def write_ppm(image: Image | bytes, path: str | os.PathLike) -> None:
    data = image if isinstance(image, bytes) else encode_ppm(image)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def read_ppm(path: str | os.PathLike) -> Image:
    return decode_ppm(Path(path).read_bytes())
