"""8-bit image container and lossless PNG / binary PPM I/O.

A :class:`Raster` holds a ``(height, width, channels)`` uint8 array, which in
C order is exactly the row-major, channel-interleaved layout.  A
:class:`Plane` is a single ``(height, width)`` channel used during
processing.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = [
    "ImageFormatError",
    "Plane",
    "Raster",
    "load_image",
    "merge_channels",
    "round_half_away",
    "save_image",
    "split_channels",
]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PPM_EXTENSIONS = {".ppm", ".pgm", ".pnm"}


class ImageFormatError(ValueError):
    """Raised for files that are not 8-bit gray/RGB PNG or P5/P6 PPM."""


def _frozen_uint8(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("samples must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    arr = np.ascontiguousarray(arr).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Plane:
    """A single 8-bit channel, shape ``(height, width)``."""

    data: np.ndarray

    def __post_init__(self):
        arr = _frozen_uint8(self.data, 2)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("plane must be nonempty")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"Plane({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class Raster:
    """An 8-bit image with 1 (gray) or 3 (RGB) interleaved channels.

    ``data`` may be given as ``(h, w)`` for grayscale or ``(h, w, c)``.
    It is stored as a read-only ``(h, w, c)`` uint8 array.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        arr = _frozen_uint8(arr, 3)
        h, w, c = arr.shape
        if h < 1 or w < 1:
            raise ValueError("raster must be nonempty")
        if c not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {c}")
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, samples) -> "Raster":
        buf = np.frombuffer(bytes(samples), dtype=np.uint8)
        if buf.size != width * height * channels:
            raise ValueError("sample count does not match width*height*channels")
        return cls(buf.reshape(height, width, channels))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def tobytes(self) -> bytes:
        return self.data.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return self.data.shape == other.data.shape and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"Raster({self.width}x{self.height}x{self.channels})"


def round_half_away(x):
    """Round to nearest integer, ties away from zero.

    ``x - floor(x)`` is exact in binary floating point, so the tie test
    never suffers from the ``floor(x + 0.5)`` double-rounding problem.
    """
    x = np.asarray(x, dtype=np.float64)
    mag = np.abs(x)
    fl = np.floor(mag)
    out = fl + (mag - fl >= 0.5)
    return np.copysign(out, x)


def split_channels(r: Raster) -> list[Plane]:
    return [Plane(r.data[:, :, c]) for c in range(r.channels)]


def merge_channels(planes) -> Raster:
    planes = list(planes)
    if len(planes) not in (1, 3):
        raise ValueError(f"expected 1 or 3 planes, got {len(planes)}")
    shapes = {p.data.shape for p in planes}
    if len(shapes) != 1:
        raise ValueError(f"plane dimensions differ: {sorted(shapes)}")
    return Raster(np.stack([p.data for p in planes], axis=2))


# ---------------------------------------------------------------------------
# PPM / PGM

def _ppm_tokens(raw: bytes, count: int):
    """Read ``count`` whitespace separated header tokens, skipping comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the header.
    """
    tokens = []
    pos = 0
    n = len(raw)
    while len(tokens) < count:
        while pos < n and raw[pos] in b" \t\r\n":
            pos += 1
        if pos < n and raw[pos] == ord("#"):
            while pos < n and raw[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and raw[pos] not in b" \t\r\n#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PPM header")
        tokens.append(raw[start:pos])
    return tokens, pos


def _load_ppm(raw: bytes) -> Raster:
    tokens, pos = _ppm_tokens(raw, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"unsupported PPM variant {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError("malformed PPM header") from exc
    if maxval != 255:
        raise ImageFormatError(f"unsupported bit depth (maxval {maxval})")
    channels = 1 if magic == b"P5" else 3
    body = raw[pos + 1 : pos + 1 + width * height * channels]
    if len(body) != width * height * channels:
        raise ImageFormatError("truncated PPM pixel data")
    return Raster.from_bytes(width, height, channels, body)


def _save_ppm(r: Raster, path: Path) -> None:
    magic = b"P5" if r.channels == 1 else b"P6"
    header = magic + b" %d %d\n255\n" % (r.width, r.height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(r.tobytes())


# ---------------------------------------------------------------------------
# PNG

def _png_ihdr(raw: bytes) -> tuple[int, int]:
    # IHDR is always the first chunk: length(4) type(4) w(4) h(4) depth(1) color(1)
    if len(raw) < 33 or raw[12:16] != b"IHDR":
        raise ImageFormatError("missing PNG IHDR chunk")
    depth, color_type = struct.unpack(">BB", raw[24:26])
    return depth, color_type


def _load_png(path: Path, raw: bytes) -> Raster:
    depth, color_type = _png_ihdr(raw)
    # palette images carry 8-bit RGB entries regardless of index depth
    if color_type != 3 and depth != 8:
        raise ImageFormatError(f"unsupported bit depth {depth}")
    with Image.open(path) as im:
        im.load()
        mode = im.mode
        if mode == "P":
            has_alpha = "transparency" in im.info
            im = im.convert("RGBA" if has_alpha else "RGB")
            mode = im.mode
        if mode in ("LA", "RGBA"):
            warnings.warn(f"{path}: dropping alpha channel", stacklevel=3)
            im = im.convert("L" if mode == "LA" else "RGB")
            mode = im.mode
        if mode not in ("L", "RGB"):
            raise ImageFormatError(f"unsupported color type {mode}")
        arr = np.array(im, dtype=np.uint8)
    return Raster(arr)


def load_image(path) -> Raster:
    """Load an 8-bit gray/RGB PNG or a binary P5/P6 PPM.

    Alpha channels are dropped with a warning.  16-bit data raises
    :class:`ImageFormatError` instead of being truncated.
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(PNG_SIGNATURE):
        return _load_png(path, raw)
    if raw[:2] in (b"P5", b"P6"):
        return _load_ppm(raw)
    if raw[:1] == b"P" and raw[1:2].isdigit():
        raise ImageFormatError(f"unsupported PPM variant {raw[:2]!r}")
    raise ImageFormatError(f"{path}: not a PNG or binary PPM file")


def save_image(r: Raster, path) -> None:
    """Write ``r`` as PPM/PGM (by extension) or PNG otherwise."""
    path = Path(path)
    if path.suffix.lower() in PPM_EXTENSIONS:
        _save_ppm(r, path)
        return
    data = r.data[:, :, 0] if r.channels == 1 else r.data
    Image.fromarray(np.ascontiguousarray(data)).save(path, format="PNG")
