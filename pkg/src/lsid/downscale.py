"""Co-occurrence guided kernel filtering.

Output pixel ``p`` is the weighted mean of the input pixels ``j`` in its
window, with weight ``exp(alpha * norm[G(p), I(j)])`` where ``G`` is the
uniform-average guide and ``norm`` the max-normalized co-occurrence
profile of the same channel.

Because a weight depends only on the pair ``(G(p), I(j))`` a 256x256 table
is built once per plane and the inner loop reduces to table lookups and
multiply-adds.  Offsets are visited in row-major window order for every
output pixel, so the floating point sums do not depend on how output rows
are split across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cooc import LEVELS, CoocProfile, compute_profile
from .guide import ScaleSpec, centers, compute_guide, make_scale_spec
from .raster import Plane, Raster, merge_channels, round_half_away, split_channels

__all__ = [
    "ALPHA_LIMIT",
    "LsidParams",
    "default_threads",
    "downscale_image",
    "downscale_plane",
    "filter_plane",
    "weight",
    "weight_table",
]

ALPHA_LIMIT = 50.0


@dataclass(frozen=True)
class LsidParams:
    factor: float
    alpha: float = 5.0
    k: int = 3

    def __post_init__(self):
        if not math.isfinite(self.alpha) or abs(self.alpha) > ALPHA_LIMIT:
            raise ValueError(f"alpha must be finite with |alpha| <= {ALPHA_LIMIT:g}, got {self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k}")
        if not math.isfinite(self.factor) or self.factor <= 1:
            raise ValueError(f"factor must be > 1, got {self.factor}")


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def weight(c_norm_value: float, alpha: float) -> float:
    return math.exp(alpha * c_norm_value)


def weight_table(profile: CoocProfile, alpha: float) -> np.ndarray:
    """``table[a, b] = weight(norm[a, b], alpha)`` for all intensity pairs."""
    # pairs that never co-occur have norm 0 and weight exp(0) = 1
    table = np.ones((LEVELS, LEVELS), dtype=np.float64)
    seen = profile.counts > 0
    uniq, inverse = np.unique(profile.norm[seen], return_inverse=True)
    # scalar exp keeps the table identical to weight() entry by entry
    values = np.array([weight(v, alpha) for v in uniq.tolist()], dtype=np.float64)
    table[seen] = values[inverse.ravel()]
    return table


def _filter_rows(img, guide, table, rows, cols, half, out):
    """Weighted means for the output rows described by ``rows`` into ``out``."""
    h, w = img.shape
    P = np.zeros(out.shape, dtype=np.float64)
    Q = np.zeros(out.shape, dtype=np.float64)
    lo = np.full(out.shape, 255, dtype=np.uint8)
    hi = np.zeros(out.shape, dtype=np.uint8)
    gbase = guide.astype(np.intp) * LEVELS
    for dy in range(-half, half + 1):
        r = rows + dy
        rvalid = (r >= 0) & (r < h)
        if not rvalid.any():
            continue
        rsafe = np.clip(r, 0, h - 1)
        for dx in range(-half, half + 1):
            c = cols + dx
            cvalid = (c >= 0) & (c < w)
            if not cvalid.any():
                continue
            csafe = np.clip(c, 0, w - 1)
            vals = img[rsafe[:, None], csafe[None, :]]
            wts = table.ravel()[gbase + vals]
            mask = rvalid[:, None] & cvalid[None, :]
            P += np.where(mask, wts * vals, 0.0)
            Q += np.where(mask, wts, 0.0)
            np.minimum(lo, np.where(mask, vals, 255), out=lo)
            np.maximum(hi, np.where(mask, vals, 0), out=hi)
    np.divide(P, Q, out=out)
    # P / Q can miss the window range by an ulp (e.g. 254.99999999999997 over
    # an all-255 window); clamping restores exact convexity without changing
    # any rounded value since the bounds are integers
    np.clip(out, lo, hi, out=out)


def filter_plane(
    plane: Plane,
    guide: Plane,
    profile: CoocProfile,
    params: LsidParams,
    spec: ScaleSpec,
    threads: int = 1,
) -> np.ndarray:
    """Unrounded filter output as a float64 ``(out_height, out_width)`` array."""
    if (plane.width, plane.height) != (spec.in_width, spec.in_height):
        raise ValueError("plane dimensions do not match the scale spec")
    if (guide.width, guide.height) != (spec.out_width, spec.out_height):
        raise ValueError(
            f"guide is {guide.width}x{guide.height}, expected {spec.out_width}x{spec.out_height}"
        )
    if profile.k != params.k:
        raise ValueError(f"profile was learned with k={profile.k}, params say k={params.k}")
    table = weight_table(profile, params.alpha)
    rows, cols = centers(spec)
    out = np.empty((spec.out_height, spec.out_width), dtype=np.float64)
    img = plane.data
    g = guide.data
    threads = max(1, min(int(threads), spec.out_height))
    if threads == 1:
        _filter_rows(img, g, table, rows, cols, spec.half, out)
        return out
    bounds = np.linspace(0, spec.out_height, threads + 1).astype(int)

    def band(i):
        a, b = bounds[i], bounds[i + 1]
        if a < b:
            _filter_rows(img, g[a:b], table, rows[a:b], cols, spec.half, out[a:b])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(band, range(threads)))
    return out


def downscale_plane(
    plane: Plane,
    guide: Plane,
    profile: CoocProfile,
    params: LsidParams,
    spec: ScaleSpec,
    threads: int = 1,
) -> Plane:
    values = filter_plane(plane, guide, profile, params, spec, threads=threads)
    return Plane(np.clip(round_half_away(values), 0, 255).astype(np.uint8))


def _downscale_channel(plane: Plane, params: LsidParams, spec: ScaleSpec, threads: int) -> Plane:
    profile = compute_profile(plane, params.k, threads=threads)
    guide = compute_guide(plane, spec)
    return downscale_plane(plane, guide, profile, params, spec, threads=threads)


def downscale_image(img: Raster, params: LsidParams, threads: int = 1) -> Raster:
    """Downscale every channel independently and re-interleave."""
    spec = make_scale_spec(img.width, img.height, params.factor)
    planes = split_channels(img)
    return merge_channels([_downscale_channel(p, params, spec, threads) for p in planes])
