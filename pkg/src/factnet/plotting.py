"""Render the per-cycle activity curve next to the metrics CSV."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from factnet.engine import CycleMetrics  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "factnet",
}


def figure_size(width: float = 6.0) -> tuple[float, float]:
    golden = (5 ** 0.5 - 1) / 2
    return width, width * golden


def render_activity(metrics: Sequence[CycleMetrics], path: str | Path, events: Sequence[int] = ()) -> Path:
    """Activity as a line over a gray area of perceived fires; one figure file per call."""
    path = Path(path)
    cycles = [m.cycle for m in metrics]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figure_size())
        fires_ax = ax.twinx()
        fires_ax.fill_between(cycles, [m.perceived_fires for m in metrics], step="mid",
                              color="0.8", label="perceived fires")
        fires_ax.set_ylabel("perceived fires")
        ax.set_zorder(fires_ax.get_zorder() + 1)
        ax.patch.set_visible(False)
        ax.plot(cycles, [m.activity for m in metrics], color="black", lw=1.0, label="activity")
        for cycle in events:
            ax.axvline(cycle, color="0.4", ls=":", lw=0.8)
        ax.set_xlabel("cycle (simulated minutes)")
        ax.set_ylabel("activities (state changes + indicator variations + messages)")
        ax.set_xlim(cycles[0] if cycles else 0, cycles[-1] if cycles else 1)
        handles = ax.get_legend_handles_labels()[0] + fires_ax.get_legend_handles_labels()[0]
        ax.legend(handles=handles, loc="upper right", frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return path
