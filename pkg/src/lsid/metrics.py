"""Full-reference quality metrics: MSE, PSNR and single-scale SSIM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .raster import Raster

__all__ = ["MetricReport", "compare", "gaussian_window", "mse", "psnr", "ssim"]

PEAK = 255.0
SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float


def _pair(a: Raster, b: Raster) -> tuple[np.ndarray, np.ndarray]:
    if a.data.shape != b.data.shape:
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height}x{a.channels} vs {b.width}x{b.height}x{b.channels}"
        )
    return a.data.astype(np.float64), b.data.astype(np.float64)


def mse(a: Raster, b: Raster) -> float:
    x, y = _pair(a, b)
    return float(np.mean((x - y) ** 2))


def psnr(a: Raster, b: Raster) -> float:
    """PSNR in dB for 8-bit data; ``math.inf`` when the images are identical."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def gaussian_window(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _ssim_channel(x: np.ndarray, y: np.ndarray, win: np.ndarray) -> float:
    pad = (len(win) - 1) // 2

    def blur(z):
        z = correlate1d(z, win, axis=0, mode="reflect")
        z = correlate1d(z, win, axis=1, mode="reflect")
        # only positions where the window fits entirely inside the image
        return z[pad:-pad, pad:-pad] if pad else z

    mx, my = blur(x), blur(y)
    vx = blur(x * x) - mx * mx
    vy = blur(y * y) - my * my
    cxy = blur(x * y) - mx * my
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    num = (2.0 * mx * my + c1) * (2.0 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return float(np.mean(num / den))


def ssim(a: Raster, b: Raster) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), averaged over channels.

    Only window positions fully inside the image contribute, so both sides
    must be at least 11 pixels.
    """
    x, y = _pair(a, b)
    if min(a.width, a.height) < SSIM_WIN:
        raise ValueError(f"SSIM needs images of at least {SSIM_WIN}x{SSIM_WIN}")
    win = gaussian_window()
    return float(np.mean([_ssim_channel(x[:, :, c], y[:, :, c], win) for c in range(a.channels)]))


def compare(a: Raster, b: Raster) -> MetricReport:
    return MetricReport(psnr(a, b), ssim(a, b))
