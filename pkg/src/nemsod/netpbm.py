"""Binary 8-bit PGM (P5) and PPM (P6) reading and writing."""

from __future__ import annotations

import os

import numpy as np

GT_THRESHOLD = 128


class NetpbmError(ValueError):
    """Raised for unreadable or unsupported netpbm files."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


def _tokens(data: bytes, count: int, pos: int, path):
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise NetpbmError(path, "truncated header")
        out.append(data[start:pos])
    return out, pos


def read_netpbm(path) -> np.ndarray:
    """Return raw uint8 pixels: (H, W) for P5, (H, W, 3) for P6."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise NetpbmError(path, f"cannot read file ({exc.strerror})") from exc
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise NetpbmError(path, f"unsupported magic {magic!r}, expected binary P5 or P6")
    fields, pos = _tokens(data, 3, 2, path)
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise NetpbmError(path, "non-integer header field") from None
    if maxval != 255:
        raise NetpbmError(path, f"maxval {maxval} not supported, need 255")
    if width <= 0 or height <= 0:
        raise NetpbmError(path, f"bad dimensions {width}x{height}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise NetpbmError(path, "missing whitespace after header")
    pos += 1
    channels = 1 if magic == b"P5" else 3
    size = width * height * channels
    raster = data[pos:pos + size]
    if len(raster) != size:
        raise NetpbmError(path, f"raster has {len(raster)} bytes, expected {size}")
    arr = np.frombuffer(raster, dtype=np.uint8)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return arr.reshape(shape).copy()


def load_mask(path, binarize: bool = False) -> np.ndarray:
    """Load a P5 file as a float map v/255, or as a bool mask (v >= 128)
    when ``binarize`` is set."""
    raw = read_netpbm(path)
    if raw.ndim != 2:
        raise NetpbmError(path, "expected a grayscale (P5) image")
    if binarize:
        return raw >= GT_THRESHOLD
    return raw.astype(np.float64) / 255.0


def load_image(path) -> np.ndarray:
    """Load a P6 file as a (3, H, W) float tensor scaled to [-1, 1]."""
    raw = read_netpbm(path)
    if raw.ndim != 3:
        raise NetpbmError(path, "expected a colour (P6) image")
    return raw.transpose(2, 0, 1).astype(np.float64) / 127.5 - 1.0


def quantize(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.size and (np.nanmin(v) < 0.0 or np.nanmax(v) > 1.0 or np.isnan(v).any()):
        raise ValueError("map values must lie in [0, 1]")
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def _write(path, magic: bytes, raw: np.ndarray):
    h, w = raw.shape[:2]
    header = magic + b"\n%d %d\n255\n" % (w, h)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(raw).tobytes())
    os.replace(tmp, path)


def save_map(values, path) -> None:
    """Write a [0, 1] map as P5 with v = round(255 * value)."""
    v = np.asarray(values)
    if v.ndim != 2:
        raise ValueError(f"map must be 2-D, got shape {v.shape}")
    _write(path, b"P5", quantize(v))


def save_image(raw_rgb, path) -> None:
    """Write an (H, W, 3) uint8 array as P6."""
    raw = np.asarray(raw_rgb, dtype=np.uint8)
    if raw.ndim != 3 or raw.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) uint8 array, got {raw.shape}")
    _write(path, b"P6", raw)
