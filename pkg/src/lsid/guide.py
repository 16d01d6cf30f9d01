"""Output geometry and the uniform-average guide image.

Each output pixel ``p`` owns a square window of half-width ``ceil(factor)``
centred at :func:`output_center`.  Windows of neighbouring output pixels
overlap; at the image border they are clipped, never padded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import Plane, round_half_away

__all__ = ["ScaleSpec", "compute_guide", "make_scale_spec", "output_center", "window_bounds"]


@dataclass(frozen=True)
class ScaleSpec:
    in_width: int
    in_height: int
    factor: float
    half: int
    out_width: int
    out_height: int

    @property
    def window_side(self) -> int:
        return 2 * self.half + 1


def make_scale_spec(in_width: int, in_height: int, factor: float) -> ScaleSpec:
    """Derive window half-width and output size for a downscale by ``factor``.

    >>> make_scale_spec(100, 100, 8.75)
    ScaleSpec(in_width=100, in_height=100, factor=8.75, half=9, out_width=11, out_height=11)
    """
    factor = float(factor)
    if not math.isfinite(factor) or factor <= 1.0:
        raise ValueError(f"factor must be > 1, got {factor}")
    if in_width < 1 or in_height < 1:
        raise ValueError("input dimensions must be positive")
    out_w = math.floor(in_width / factor)
    out_h = math.floor(in_height / factor)
    if out_w < 1 or out_h < 1:
        raise ValueError(
            f"image too small: {in_width}x{in_height} at factor {factor:g} gives {out_w}x{out_h}"
        )
    return ScaleSpec(in_width, in_height, factor, math.ceil(factor), out_w, out_h)


def _center_1d(p, factor: float, size: int):
    return np.clip(np.floor(np.asarray(p) * factor + factor / 2.0).astype(np.int64), 0, size - 1)


def output_center(p: tuple[int, int], spec: ScaleSpec) -> tuple[int, int]:
    """Input ``(row, col)`` of the window centre for output pixel ``p``."""
    row, col = p
    if not (0 <= row < spec.out_height and 0 <= col < spec.out_width):
        raise IndexError(f"output pixel {p} outside {spec.out_height}x{spec.out_width}")
    return int(_center_1d(row, spec.factor, spec.in_height)), int(_center_1d(col, spec.factor, spec.in_width))


def centers(spec: ScaleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row centres for every output row and column centres for every output column."""
    rows = _center_1d(np.arange(spec.out_height), spec.factor, spec.in_height)
    cols = _center_1d(np.arange(spec.out_width), spec.factor, spec.in_width)
    return rows, cols


def window_bounds(spec: ScaleSpec):
    """Clipped inclusive-exclusive window extents ``(r0, r1, c0, c1)`` per output row/col."""
    rows, cols = centers(spec)
    h = spec.half
    r0 = np.maximum(rows - h, 0)
    r1 = np.minimum(rows + h + 1, spec.in_height)
    c0 = np.maximum(cols - h, 0)
    c1 = np.minimum(cols + h + 1, spec.in_width)
    return r0, r1, c0, c1


def _check(plane: Plane, spec: ScaleSpec) -> None:
    if (plane.width, plane.height) != (spec.in_width, spec.in_height):
        raise ValueError(
            f"plane is {plane.width}x{plane.height} but spec expects {spec.in_width}x{spec.in_height}"
        )


def window_means(plane: Plane, spec: ScaleSpec) -> np.ndarray:
    """Unrounded mean over each output pixel's clipped window, float64."""
    _check(plane, spec)
    sat = np.zeros((spec.in_height + 1, spec.in_width + 1), dtype=np.int64)
    np.cumsum(np.cumsum(plane.data, axis=0, dtype=np.int64), axis=1, out=sat[1:, 1:])
    r0, r1, c0, c1 = window_bounds(spec)
    total = (
        sat[r1[:, None], c1[None, :]]
        - sat[r0[:, None], c1[None, :]]
        - sat[r1[:, None], c0[None, :]]
        + sat[r0[:, None], c0[None, :]]
    )
    count = (r1 - r0)[:, None] * (c1 - c0)[None, :]
    return total / count


def compute_guide(plane: Plane, spec: ScaleSpec) -> Plane:
    """Uniform window average rounded half away from zero."""
    return Plane(round_half_away(window_means(plane, spec)).astype(np.uint8))
