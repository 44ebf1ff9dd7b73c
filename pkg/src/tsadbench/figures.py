"""Static figure rendering for report outputs.

Everything draws through the Agg backend straight to files; no window,
no interactivity.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import Leaderboard

_DPI = 150


def render_cd_diagram(data: dict, path: str | Path) -> Path:
    """Draw a critical-difference diagram from cd_diagram_data output.

    Rank axis runs left (best) to right; methods hang off the axis on
    alternating sides, and each connection segment becomes a thick bar.
    """
    positions = data["positions"]
    connections = data["connections"]
    cd = data["cd"]
    k = len(positions)
    lo_rank, hi_rank = 1.0, float(max(k, 2))

    n_left = (k + 1) // 2
    bar_rows = max(len(connections), 1)
    bar_top = -0.25
    bar_step = 0.28
    label_top = bar_top - bar_rows * bar_step - 0.35
    label_step = 0.4

    fig_height = 1.8 + 0.32 * (bar_rows + n_left)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * k + 3), fig_height))
    ax.axis("off")

    ax.plot([lo_rank, hi_rank], [0, 0], color="black", lw=1.2)
    for tick in range(1, int(hi_rank) + 1):
        ax.plot([tick, tick], [0, 0.12], color="black", lw=1.0)
        ax.text(tick, 0.2, str(tick), ha="center", va="bottom", fontsize=9)

    # CD ruler above the axis
    ruler_y = 0.62
    ax.plot([lo_rank, lo_rank + cd], [ruler_y, ruler_y], color="black", lw=2.5)
    ax.plot([lo_rank, lo_rank], [ruler_y - 0.06, ruler_y + 0.06], color="black", lw=1.0)
    ax.plot(
        [lo_rank + cd, lo_rank + cd], [ruler_y - 0.06, ruler_y + 0.06], color="black", lw=1.0
    )
    ax.text(lo_rank + cd / 2, ruler_y + 0.1, f"CD = {cd:.4f}", ha="center", fontsize=9)

    for i, seg in enumerate(connections):
        y = bar_top - i * bar_step
        ax.plot([seg["lo"] - 0.05, seg["hi"] + 0.05], [y, y], color="black", lw=3.5)

    for i, pos in enumerate(positions):
        rank = pos["rank"]
        on_left = i < n_left
        depth = i if on_left else k - 1 - i
        y = label_top - depth * label_step
        x_side = lo_rank - 0.4 if on_left else hi_rank + 0.4
        ax.plot([rank, rank], [0, y], color="0.4", lw=0.8)
        ax.plot([rank, x_side], [y, y], color="0.4", lw=0.8)
        label = f"{pos['method']} ({rank:.2f})"
        ax.text(
            x_side - 0.05 if on_left else x_side + 0.05,
            y,
            label,
            ha="right" if on_left else "left",
            va="center",
            fontsize=9,
        )

    ax.set_xlim(lo_rank - 3.0, hi_rank + 3.0)
    ax.set_ylim(label_top - n_left * label_step - 0.3, 1.1)
    path = Path(path)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def render_leaderboard(board: Leaderboard, path: str | Path) -> Path:
    """Draw the leaderboard as an annotated heatmap, best method on top."""
    cells = np.asarray(board.cells, dtype=np.float64)
    masked = np.ma.masked_invalid(cells)
    n_methods, n_groups = cells.shape

    fig, ax = plt.subplots(
        figsize=(max(4.0, 1.3 * n_groups + 2.5), max(2.5, 0.45 * n_methods + 1.5))
    )
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("0.85")
    image = ax.imshow(masked, cmap=cmap, aspect="auto")
    ax.set_xticks(range(n_groups), labels=board.groups, rotation=30, ha="right", fontsize=9)
    labels = []
    for method in board.methods:
        rank = board.ranking.mean_ranks[method] if board.ranking else 1.0
        labels.append(f"{method} ({rank:.2f})")
    ax.set_yticks(range(n_methods), labels=labels, fontsize=9)
    ax.set_title(f"mean {board.metric} by {board.group_by}", fontsize=11)

    span = float(masked.max() - masked.min()) if masked.count() else 1.0
    midpoint = float(masked.min()) + span / 2 if masked.count() else 0.5
    for i in range(n_methods):
        for j in range(n_groups):
            if np.isnan(cells[i, j]):
                continue
            dark = cells[i, j] < midpoint
            ax.text(
                j,
                i,
                f"{cells[i, j]:.3f}",
                ha="center",
                va="center",
                fontsize=8,
                color="white" if dark else "black",
            )
    fig.colorbar(image, ax=ax, label=board.metric)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
