"""Grayscale image ingestion (PGM/PNG) and normalized gray-level histograms."""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorruptHeaderError,
    EmptyImageError,
    NonGrayscaleError,
    UnsupportedFormatError,
)

LEVELS = 256

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel image; ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"pixels must be 2-D, got shape {px.shape}")
        if px.size and (px.min() < 0 or px.max() >= LEVELS):
            raise ValueError("pixel values must lie in [0, 255]")
        px = px.astype(np.uint8, copy=True)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_flat(cls, width: int, height: int, values) -> "GrayImage":
        values = np.asarray(values)
        if values.size != width * height:
            raise ValueError(f"expected {width * height} pixels, got {values.size}")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Histogram:
    """Normalized gray-level distribution h(g) = n_g / N.

    ``bins`` usually has 256 entries; shorter toy histograms are allowed so
    thresholding routines can be exercised on small level counts.
    """

    bins: np.ndarray
    total_pixels: int

    def __post_init__(self):
        bins = np.array(self.bins, dtype=np.float64)
        if bins.ndim != 1 or bins.size == 0:
            raise ValueError("bins must be a non-empty 1-D array")
        if np.any(bins < 0) or not np.all(np.isfinite(bins)):
            raise ValueError("bins must be finite and nonnegative")
        if abs(bins.sum() - 1.0) > 1e-9:
            raise ValueError(f"bins must sum to 1, got {bins.sum()!r}")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_counts(cls, counts) -> "Histogram":
        counts = np.asarray(counts)
        if not np.issubdtype(counts.dtype, np.integer):
            raise TypeError("counts must be integers")
        total = int(counts.sum())
        if total <= 0:
            raise EmptyImageError("histogram has no pixels")
        return cls(counts.astype(np.float64) / total, total)

    @property
    def levels(self) -> int:
        return self.bins.size


def compute_histogram(image: GrayImage) -> Histogram:
    n = image.pixels.size
    if n == 0:
        raise EmptyImageError("image has zero pixels")
    counts = np.bincount(image.pixels.ravel(), minlength=LEVELS)
    return Histogram(counts / n, n)


def write_histogram_csv(hist: Histogram, path) -> None:
    with open(path, "w") as fh:
        for g, h in enumerate(hist.bins):
            fh.write(f"{g},{float(h)!r}\n")


# -- readers -----------------------------------------------------------------

def load_gray_image(path) -> GrayImage:
    """Read an 8-bit grayscale PGM (P2/P5) or PNG file.

    Color images are rejected rather than converted.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {os.fspath(path)}")
    data = path.read_bytes()
    if data.startswith(_PNG_SIGNATURE):
        return _read_png(path)
    if data[:1] == b"P" and len(data) >= 2:
        return _parse_pnm(data)
    raise UnsupportedFormatError(f"{path.name}: not a PGM or PNG file")


def _header_tokens(data: bytes, count: int, start: int):
    """Pull ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i >= n:
            raise CorruptHeaderError("truncated PNM header")
        if data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def _parse_pnm(data: bytes) -> GrayImage:
    magic = data[:2]
    if magic in (b"P3", b"P6"):
        raise NonGrayscaleError("PPM color image; convert to grayscale first")
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"unsupported PNM variant {magic.decode(errors='replace')}")
    tokens, offset = _header_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptHeaderError(f"non-integer PGM header field: {tokens}") from exc
    if width <= 0 or height <= 0 or maxval <= 0:
        raise CorruptHeaderError(f"invalid PGM dimensions {width}x{height}, maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormatError(f"maxval {maxval} > 255; only 8-bit images are supported")
    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = data[offset + 1 : offset + 1 + n]
        if len(raster) != n:
            raise CorruptHeaderError(f"expected {n} raster bytes, found {len(raster)}")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        try:
            values = np.array(data[offset:].split(), dtype=np.int64)
        except ValueError as exc:
            raise CorruptHeaderError("non-numeric sample in P2 raster") from exc
        if values.size != n:
            raise CorruptHeaderError(f"expected {n} samples, found {values.size}")
    if values.size and values.max() > maxval:
        raise CorruptHeaderError("sample exceeds declared maxval")
    return GrayImage.from_flat(width, height, values)


def _read_png(path: Path) -> GrayImage:
    from PIL import Image

    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:  # Pillow raises a zoo of types on bad files
        raise CorruptHeaderError(f"{path.name}: unreadable PNG ({exc})") from exc
    mode = img.mode
    if mode == "L":
        return GrayImage(np.asarray(img))
    if mode == "1":
        return GrayImage(np.asarray(img, dtype=np.uint8) * 255)
    if mode == "P":
        idx = np.asarray(img)
        palette = np.asarray(img.getpalette() or [], dtype=np.uint8).reshape(-1, 3)
        used = np.unique(idx)
        if used.max(initial=0) >= len(palette):
            raise CorruptHeaderError(f"{path.name}: palette index out of range")
        rgb = palette[used]
        if not (np.all(rgb[:, 0] == rgb[:, 1]) and np.all(rgb[:, 1] == rgb[:, 2])):
            raise NonGrayscaleError(f"{path.name}: palette contains color entries")
        return GrayImage(palette[idx, 0])
    if mode in ("RGB", "RGBA", "LA", "CMYK", "YCbCr", "PA"):
        raise NonGrayscaleError(f"{path.name}: {mode} image is not single-channel gray")
    raise UnsupportedFormatError(f"{path.name}: PNG mode {mode} is not 8-bit grayscale")


# -- writers -----------------------------------------------------------------

def write_pgm(pixels, path) -> None:
    """Write a 2-D uint8 array as binary PGM (P5)."""
    px = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(px.tobytes())
