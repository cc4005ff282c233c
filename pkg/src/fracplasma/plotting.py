"""Figure rendering for radial profiles and sweep overlays.

Import this module lazily: it forces the non-interactive Agg backend so
figures render identically on headless machines, which would override an
interactive backend chosen by the embedding application.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_profile_figure", "render_sweep_figure"]


def render_profile_figure(path: str, r, u, rho, title: str | None = None) -> None:
    """Render a two-panel u(r) / rho(r) figure to ``path``."""
    r = np.asarray(r, dtype=float)
    fig, (ax_u, ax_rho) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax_u.plot(r, np.asarray(u, dtype=float), color="tab:blue")
    ax_u.set_xlabel("r")
    ax_u.set_ylabel("u(r)")
    ax_rho.plot(r, np.asarray(rho, dtype=float), color="tab:red")
    ax_rho.set_xlabel("r")
    ax_rho.set_ylabel("rho(r)")
    for ax in (ax_u, ax_rho):
        ax.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figure(path: str, curves, title: str | None = None) -> None:
    """Overlay density profiles from a sweep.

    Parameters
    ----------
    path : str
        Output image file.
    curves : sequence of (label, r, rho)
        One entry per grid point, plotted in the given order.
    title : str, optional
        Figure title.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, r, rho in curves:
        ax.plot(np.asarray(r, dtype=float), np.asarray(rho, dtype=float), label=label)
    ax.set_xlabel("r")
    ax.set_ylabel("rho(r)")
    ax.grid(True, alpha=0.3)
    if curves:
        ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
