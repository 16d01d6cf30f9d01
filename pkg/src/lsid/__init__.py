"""Co-occurrence guided image downscaling."""

from .baselines import downscale_bicubic, downscale_box, downscale_lanczos
from .cooc import CoocProfile, compute_profile, export_heatmap, merge_profiles
from .downscale import LsidParams, downscale_image, downscale_plane, weight
from .guide import ScaleSpec, compute_guide, make_scale_spec, output_center
from .metrics import mse, psnr, ssim
from .raster import Plane, Raster, load_image, merge_channels, save_image, split_channels

__version__ = "0.1.0"

__all__ = [
    "CoocProfile",
    "LsidParams",
    "Plane",
    "Raster",
    "ScaleSpec",
    "compute_guide",
    "compute_profile",
    "downscale_bicubic",
    "downscale_box",
    "downscale_image",
    "downscale_lanczos",
    "downscale_plane",
    "export_heatmap",
    "load_image",
    "make_scale_spec",
    "merge_channels",
    "merge_profiles",
    "mse",
    "output_center",
    "psnr",
    "save_image",
    "split_channels",
    "ssim",
    "weight",
]
