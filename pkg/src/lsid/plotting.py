"""Annotated matplotlib rendering of co-occurrence profiles."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402

from .cooc import CoocProfile  # noqa: E402


def render_profiles(profiles, titles, path, dpi: int = 120) -> None:
    """Side-by-side log-colour maps of one or more profiles, saved to ``path``."""
    profiles = list(profiles)
    fig, axes = plt.subplots(1, len(profiles), figsize=(4.2 * len(profiles), 4), squeeze=False)
    for ax, prof, title in zip(axes[0], profiles, titles):
        counts = np.where(prof.counts > 0, prof.counts, np.nan)
        im = ax.imshow(counts, origin="upper", cmap="magma", norm=LogNorm(vmin=1, vmax=max(prof.max_count, 1)))
        ax.set_title(title)
        ax.set_xlabel("neighbour intensity b")
        ax.set_ylabel("pixel intensity a")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="count")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def render_profile(profile: CoocProfile, path, title: str = "co-occurrence", dpi: int = 120) -> None:
    render_profiles([profile], [f"{title} (k={profile.k})"], path, dpi=dpi)
