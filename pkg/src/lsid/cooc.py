"""Co-occurrence profile learning.

For every pixel ``i`` and every offset in the square ``[-k, k]^2`` (the
zero offset included) whose target ``j`` falls inside the plane, the pair
``(I(i), I(j))`` is counted once.  Neighborhoods are clipped at the border,
so the count matrix is symmetric.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .raster import Plane, Raster, round_half_away, save_image

__all__ = [
    "LEVELS",
    "CoocProfile",
    "compute_profile",
    "export_heatmap",
    "heatmap_array",
    "merge_profiles",
]

LEVELS = 256
_BATCH = 1 << 22


@dataclass(frozen=True, eq=False)
class CoocProfile:
    """Raw pair counts of one channel and their max-normalized form."""

    counts: np.ndarray
    k: int
    norm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (LEVELS, LEVELS):
            raise ValueError(f"counts must be {LEVELS}x{LEVELS}, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        peak = int(counts.max())
        norm = counts / float(peak) if peak > 0 else np.zeros_like(counts, dtype=np.float64)
        norm.setflags(write=False)
        object.__setattr__(self, "norm", norm)

    @property
    def max_count(self) -> int:
        return int(self.counts.max())

    def __eq__(self, other):
        if not isinstance(other, CoocProfile):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.counts, other.counts)


def _accumulate_rows(img: np.ndarray, k: int, row0: int, row1: int) -> np.ndarray:
    """Counts for source pixels in rows ``[row0, row1)`` against all neighbors."""
    h, w = img.shape
    counts = np.zeros(LEVELS * LEVELS, dtype=np.int64)
    pending: list[np.ndarray] = []
    pending_size = 0
    for dy in range(-k, k + 1):
        # source rows r with r in [row0, row1) and r + dy in [0, h)
        s0 = max(row0, -dy)
        s1 = min(row1, h - dy)
        if s0 >= s1:
            continue
        for dx in range(-k, k + 1):
            c0 = max(0, -dx)
            c1 = min(w, w - dx)
            if c0 >= c1:
                continue
            src = img[s0:s1, c0:c1]
            dst = img[s0 + dy : s1 + dy, c0 + dx : c1 + dx]
            idx = (src.astype(np.intp) * LEVELS + dst).ravel()
            if idx.size >= _BATCH:
                counts += np.bincount(idx, minlength=LEVELS * LEVELS)
                continue
            # small offsets share one bincount; the batch cap bounds memory
            pending.append(idx)
            pending_size += idx.size
            if pending_size >= _BATCH:
                counts += np.bincount(np.concatenate(pending), minlength=LEVELS * LEVELS)
                pending, pending_size = [], 0
    if pending:
        counts += np.bincount(np.concatenate(pending), minlength=LEVELS * LEVELS)
    return counts.reshape(LEVELS, LEVELS)


def compute_profile(plane: Plane, k: int = 3, threads: int = 1) -> CoocProfile:
    """Learn the co-occurrence profile of ``plane`` with neighborhood radius ``k``.

    With ``threads > 1`` source rows are split into bands whose partial
    profiles are summed by :func:`merge_profiles`; integer addition keeps the
    result identical to the sequential pass.
    """
    if not isinstance(plane, Plane):
        plane = Plane(plane)
    h, w = plane.data.shape
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    if k > min(h, w):
        raise ValueError(f"k={k} exceeds the plane's smaller side ({min(h, w)})")
    img = plane.data
    threads = max(1, min(int(threads), h))
    if threads == 1:
        return CoocProfile(_accumulate_rows(img, k, 0, h), k)
    bounds = np.linspace(0, h, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda b: _accumulate_rows(img, k, b[0], b[1]), zip(bounds[:-1], bounds[1:]))
        return merge_profiles([CoocProfile(c, k) for c in parts])


def merge_profiles(parts) -> CoocProfile:
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to merge")
    ks = {p.k for p in parts}
    if len(ks) != 1:
        raise ValueError(f"cannot merge profiles with different k: {sorted(ks)}")
    total = np.zeros((LEVELS, LEVELS), dtype=np.int64)
    for p in parts:
        total += p.counts
    return CoocProfile(total, parts[0].k)


def heatmap_array(profile: CoocProfile) -> np.ndarray:
    """Log-scaled 8-bit rendering; row ``a``, column ``b`` is pair ``(a, b)``."""
    peak = profile.max_count
    if peak == 0:
        raise ValueError("profile has no counts")
    scaled = 255.0 * np.log1p(profile.counts) / math.log1p(peak)
    return np.clip(round_half_away(scaled), 0, 255).astype(np.uint8)


def export_heatmap(profile: CoocProfile, path, csv_path=None) -> tuple[Path, Path]:
    """Write the heatmap PNG and a CSV of the raw counts.

    The CSV defaults to ``path`` with a ``.csv`` suffix.  Returns both paths.
    """
    path = Path(path)
    csv_path = Path(csv_path) if csv_path is not None else path.with_suffix(".csv")
    save_image(Raster(heatmap_array(profile)), path)
    with open(csv_path, "w", newline="") as fh:
        csv.writer(fh).writerows(profile.counts.tolist())
    return path, csv_path
