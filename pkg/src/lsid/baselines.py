"""Reference downscalers: box average, Keys bicubic and Lanczos-3.

Bicubic and Lanczos are separable and anti-aliased: the kernel is stretched
by the scale factor, sampled at the integer taps around the same output
centres the guide uses, normalized to unit sum, and applied with
clamp-to-edge indexing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .guide import ScaleSpec, centers, compute_guide, make_scale_spec
from .raster import Plane, Raster, merge_channels, round_half_away, split_channels

__all__ = [
    "KEYS_A",
    "LANCZOS_LOBES",
    "downscale_bicubic",
    "downscale_box",
    "downscale_lanczos",
    "keys_kernel",
    "lanczos_kernel",
    "resample_weights",
]

KEYS_A = -0.5
LANCZOS_LOBES = 3


def keys_kernel(x, a: float = KEYS_A):
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2 = x * x
    x3 = x2 * x
    near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
    far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


def lanczos_kernel(x, lobes: int = LANCZOS_LOBES):
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) < lobes, np.sinc(x) * np.sinc(x / lobes), 0.0)


def resample_weights(
    centres: np.ndarray, size: int, factor: float, kernel: Callable, support: float
) -> tuple[np.ndarray, np.ndarray]:
    """Tap indices and unit-sum weights for each output sample.

    Returns ``(index, weights)``, both ``(n_out, n_taps)``; indices are
    already clamped to ``[0, size)``.
    """
    reach = int(math.floor(support * factor))
    offsets = np.arange(-reach, reach + 1)
    weights = kernel(offsets / factor)[None, :].repeat(len(centres), axis=0)
    weights = weights / weights.sum(axis=1, keepdims=True)
    index = np.clip(centres[:, None] + offsets[None, :], 0, size - 1)
    return index, weights


def _separable(plane: Plane, spec: ScaleSpec, kernel, support: float, threads: int) -> Plane:
    img = plane.data.astype(np.float64)
    rows, cols = centers(spec)
    xi, xw = resample_weights(cols, spec.in_width, spec.factor, kernel, support)
    yi, yw = resample_weights(rows, spec.in_height, spec.factor, kernel, support)
    tmp = np.empty((spec.in_height, spec.out_width))
    out = np.empty((spec.out_height, spec.out_width))

    def horizontal(r0, r1):
        acc = np.zeros((r1 - r0, spec.out_width))
        for t in range(xi.shape[1]):
            acc += xw[None, :, t] * img[r0:r1, xi[:, t]]
        tmp[r0:r1] = acc

    def vertical(r0, r1):
        acc = np.zeros((r1 - r0, spec.out_width))
        for t in range(yi.shape[1]):
            acc += yw[r0:r1, t, None] * tmp[yi[r0:r1, t], :]
        out[r0:r1] = acc

    _banded(horizontal, spec.in_height, threads)
    _banded(vertical, spec.out_height, threads)
    return Plane(np.clip(round_half_away(out), 0, 255).astype(np.uint8))


def _banded(fn, n: int, threads: int) -> None:
    threads = max(1, min(int(threads), n))
    bounds = np.linspace(0, n, threads + 1).astype(int)
    if threads == 1:
        fn(0, n)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda i: fn(bounds[i], bounds[i + 1]), range(threads)))


def _per_channel(img: Raster, factor: float, op) -> Raster:
    spec = make_scale_spec(img.width, img.height, factor)
    return merge_channels([op(p, spec) for p in split_channels(img)])


def downscale_box(img: Raster, factor: float, threads: int = 1) -> Raster:
    """Uniform window average with the guide's geometry (LSID at alpha=0)."""
    return _per_channel(img, factor, compute_guide)


def downscale_bicubic(img: Raster, factor: float, threads: int = 1) -> Raster:
    return _per_channel(img, factor, lambda p, s: _separable(p, s, keys_kernel, 2.0, threads))


def downscale_lanczos(img: Raster, factor: float, threads: int = 1) -> Raster:
    return _per_channel(
        img, factor, lambda p, s: _separable(p, s, lanczos_kernel, float(LANCZOS_LOBES), threads)
    )
