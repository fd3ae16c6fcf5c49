"""Bar charts of benchmark results.

Figures are written straight to file with the Agg backend. SVG output is
made reproducible by pinning the hash salt and dropping the date stamp.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricsReport, fmt_fom  # noqa: E402

__all__ = ["fom_bar_chart", "metrics_panel"]

_RC = {
    "svg.hashsalt": "scbcla",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    meta = {"Date": None} if path.suffix.lower() == ".svg" else None
    fig.savefig(path, bbox_inches="tight", metadata=meta)
    plt.close(fig)
    return path


def _short(name: str) -> str:
    return name.replace("Homogeneous ", "Homog.\n").replace("Hybrid ", "Hybrid\n")


def fom_bar_chart(reports: Sequence[MetricsReport], path: str | Path, title: str = "Figure of merit") -> Path:
    """One bar per design, labelled with its FOM; the best bar is filled dark."""
    rows = [r for r in reports if r.fom is not None]
    if not rows:
        raise ValueError("no report carries a FOM")
    best = max(r.fom for r in rows)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(rows)), 3.2))
        xs = range(len(rows))
        colors = ["0.2" if r.fom == best else "0.7" for r in rows]
        bars = ax.bar(xs, [r.fom for r in rows], color=colors, edgecolor="black", linewidth=0.5)
        for b, r in zip(bars, rows):
            ax.annotate(fmt_fom(r.fom), (b.get_x() + b.get_width() / 2, b.get_height()),
                        ha="center", va="bottom", fontsize=7, xytext=(0, 2), textcoords="offset points")
        ax.set_xticks(list(xs))
        ax.set_xticklabels([_short(r.name) for r in rows], fontsize=7)
        ax.set_ylabel("FOM (x10^6 / (P D A))")
        ax.set_title(title)
        ax.set_ylim(0, best * 1.15)
        return _save(fig, path)


def metrics_panel(reports: Sequence[MetricsReport], path: str | Path) -> Path:
    """Power, delay and area side by side, one subplot each."""
    rows = [r for r in reports if None not in (r.power, r.delay, r.area)]
    if not rows:
        raise ValueError("no complete report to plot")
    u = rows[0].units
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 3, figsize=(max(9.0, 2.4 * len(rows)), 3.0))
        for ax, attr, label in zip(
            axes,
            ("power", "delay", "area"),
            (f"power ({u.get('power', '')})", f"delay ({u.get('time', '')})", f"area ({u.get('area', '')})"),
        ):
            ax.bar(range(len(rows)), [getattr(r, attr) for r in rows], color="0.6", edgecolor="black", linewidth=0.5)
            ax.set_xticks(range(len(rows)))
            ax.set_xticklabels([_short(r.name) for r in rows], fontsize=6)
            ax.set_title(label)
        fig.tight_layout()
        return _save(fig, path)
