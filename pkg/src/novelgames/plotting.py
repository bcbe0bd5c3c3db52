"""Figure rendering for the report command."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def scatter_with_fit(x, y, path, *, xlabel: str, ylabel: str, title: str = "") -> None:
    """Scatter of ``y`` against ``x`` with the least-squares line; SVG output is byte-stable."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    with plt.rc_context({"svg.hashsalt": "novelgames", "svg.fonttype": "none",
                         "font.size": 10}):
        fig, ax = plt.subplots(figsize=(4.5, 4.0))
        ax.scatter(x, y, s=14, alpha=0.7, color="tab:blue", edgecolor="none")
        if len(x) >= 2 and np.ptp(x) > 0:
            slope, intercept = np.polyfit(x, y, 1)
            xs = np.array([x.min(), x.max()])
            ax.plot(xs, slope * xs + intercept, color="black", lw=1)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.spines[["top", "right"]].set_visible(False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
        plt.close(fig)
