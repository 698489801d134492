"""Figure rendering for harness outputs.

Renders one PNG per populated metric alongside the delimited output:
capacity/iteration/group-count curves over the active sweep axis and a
heat map for the tradeoff surface.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_LABELS = {
    "capacity": ("Average capacity [bits/s/Hz]", "capacity.png"),
    "iterations": ("Average iterations", "iterations.png"),
    "groups": ("Average number of groups", "groups.png"),
    "groupcorr": ("Average group correlation", "groupcorr.png"),
}


def _curves(summaries, attr):
    out = {}
    for row in summaries:
        y = getattr(row, attr)
        if y is None:
            continue
        label = row.algorithm if row.param is None else f"{row.algorithm} {row.param:g}"
        out.setdefault(label, []).append((row.n_subcarriers, row.tau_max_us, y))
    return out


def _plot_metric(summaries, attr, ylabel, path):
    curves = _curves(summaries, attr)
    if not curves:
        return None
    ns = {p[0] for pts in curves.values() for p in pts}
    use_n = len(ns) > 1
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, pts in sorted(curves.items()):
        pts = sorted(pts)
        x = [p[0] if use_n else p[1] for p in pts]
        y = [p[2] for p in pts]
        ax.plot(x, y, marker="o", label=label)
    if use_n:
        ax.set_xscale("log", base=2)
        ax.set_xlabel("Number of subcarriers N")
    else:
        ax.set_xlabel(r"Maximum delay spread $\tau_{\max}$ [$\mu$s]")
    if attr == "avg_iterations" and all(
            p[2] > 0 for pts in curves.values() for p in pts):
        ax.set_yscale("log")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _plot_zeta(summaries, path):
    cells = [(row.tau_max_us, float(row.param), row.zeta)
             for row in summaries if row.zeta is not None and row.param is not None]
    if not cells:
        return None
    taus = sorted({c[0] for c in cells})
    gts = sorted({c[1] for c in cells})
    grid = np.full((len(taus), len(gts)), np.nan)
    for tau, gt, z in cells:
        grid[taus.index(tau), gts.index(gt)] = z
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    im = ax.imshow(grid, aspect="auto", origin="lower", cmap="viridis",
                   vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(gts)), [f"{g:g}" for g in gts])
    ax.set_yticks(range(len(taus)), [f"{t:g}" for t in taus])
    ax.set_xlabel(r"Gain threshold $G_T$ [dB]")
    ax.set_ylabel(r"Maximum delay spread $\tau_{\max}$ [$\mu$s]")
    fig.colorbar(im, ax=ax, label="Tradeoff factor")
    for i in range(len(taus)):
        for j in range(len(gts)):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.2f}", ha="center", va="center",
                        color="white", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_figures(summaries, outdir) -> list[str]:
    """Render every populated metric; returns the written figure paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    for tag, (ylabel, fname) in _LABELS.items():
        attr = {"capacity": "avg_capacity_bps_hz", "iterations": "avg_iterations",
                "groups": "avg_groups", "groupcorr": "avg_group_corr"}[tag]
        path = _plot_metric(summaries, attr, ylabel, os.path.join(outdir, fname))
        if path:
            written.append(path)
    zpath = _plot_zeta(summaries, os.path.join(outdir, "zeta.png"))
    if zpath:
        written.append(zpath)
    return written
