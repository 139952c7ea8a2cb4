"""Matplotlib figures for the region map and retraction traces."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spectra import CONJUGATE_PAIR, NEGATIVE_DIAGONAL, REAL_TRIANGLE, SHADED  # noqa: E402

REGION_STYLE = {
    CONJUGATE_PAIR: dict(color="tab:blue", marker="o"),
    REAL_TRIANGLE: dict(color="tab:green", marker="s"),
    NEGATIVE_DIAGONAL: dict(color="tab:purple", marker="D"),
    SHADED: dict(color="tab:red", marker="^"),
}


def region_plane_points(lam, mu):
    """Plot coordinates: real pairs at (max, min), complex pairs at (Re, |Im|) of a root."""
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    real = np.abs(lam.imag) + np.abs(mu.imag) <= 1e-9
    x = np.where(real, np.maximum(lam.real, mu.real), lam.real)
    y = np.where(real, np.minimum(lam.real, mu.real), np.abs(lam.imag))
    return x, y


def region_map(lam, mu, regions, path, lim: float = 3.0):
    """Scatter of root pairs over the admissible regions.

    Complex pairs sit in the upper half plane inside the unit semicircle;
    real pairs sit south-east of the diagonal, in the triangle (C+) or the
    region beyond the hyperbola lam mu = 1 (C-).
    """
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    t = np.linspace(1, lim, 200)
    ax.fill_between(t, 1 / t, 1, color="0.85", zorder=0)  # mu < 1 < lam, lam mu > 1
    ax.plot(t, 1 / t, color="0.4", lw=0.8)
    ax.plot([0, 1, 1, 0], [0, 0, 1, 0], color="0.2", lw=0.8)  # triangle lam > mu >= 0
    th = np.linspace(0, np.pi, 200)
    ax.plot(np.cos(th), np.sin(th), color="0.2", lw=0.8)
    ax.plot([-lim, lim], [-lim, lim], color="0.5", lw=0.6, ls="--")
    ax.plot([-lim, 0], [-lim, 0], color="tab:purple", lw=2)  # lam = mu <= 0
    for text, xy in [("conjugate pair", (-0.9, 1.1)), ("triangle", (0.35, -0.25)),
                     ("lam = mu <= 0", (-2.6, -1.6)), ("lam mu > 1", (1.6, 1.15))]:
        ax.annotate(text, xy, fontsize=8, color="0.25")
    x, y = region_plane_points(lam, mu)
    regions = np.asarray(regions)
    for name, style in REGION_STYLE.items():
        sel = regions == name
        if sel.any():
            ax.scatter(x[sel], y[sel], s=6, alpha=0.6, label=f"{name} ({sel.sum()})", **style)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel(r"$\lambda$ (real pairs: larger root)")
    ax.set_ylabel(r"$\mu$ (real pairs) or Im $\lambda$")
    ax.legend(loc="lower left", fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def trace_plot(rows, path, title: str = ""):
    """Entries of J(t) against t for a CSV-style trace (t, 36 entries)."""
    rows = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for k in range(1, rows.shape[1]):
        if np.ptp(rows[:, k]) > 1e-12:
            ax.plot(rows[:, 0], rows[:, k], lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("entries of J(t)")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
