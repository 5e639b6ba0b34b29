"""Matplotlib figures for reduction reports.

Only the ``reduce`` command's report path uses this, and it imports
lazily so the rest of the package never loads matplotlib.
"""

from __future__ import annotations

from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "svg.hashsalt": "zcolor",
}


def _save(fig, path):
    # no timestamps or version strings, so reruns give identical bytes
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def diff_histogram(before: dict[int, int], after: dict[int, int], path) -> None:
    """Bar chart of how many crossings carry each diff, before and after."""
    cb, ca = Counter(before.values()), Counter(after.values())
    keys = sorted(set(cb) | set(ca))
    xs = range(len(keys))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        ax.bar([x - 0.2 for x in xs], [cb.get(k, 0) for k in keys], width=0.4, label="input")
        ax.bar([x + 0.2 for x in xs], [ca.get(k, 0) for k in keys], width=0.4, label="output")
        ax.set_xticks(list(xs))
        ax.set_xticklabels([str(k) for k in keys])
        ax.set_xlabel("crossing diff")
        ax.set_ylabel("crossings")
        counts = [v for v in list(cb.values()) + list(ca.values()) if v]
        if counts and max(counts) > 20 * min(counts):
            ax.set_yscale("log")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def measure_history(history: list[list[int]], path) -> None:
    """Largest normalized diff and number of nonzero crossings per outer step."""
    steps = list(range(len(history)))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        ax.step(steps, [max(h) if h else 0 for h in history], where="post", label="largest diff / gcd")
        ax.set_xlabel("outer iteration")
        ax.set_ylabel("largest diff / gcd")
        ax.xaxis.set_major_locator(MaxNLocator(integer=True))
        ax.yaxis.set_major_locator(MaxNLocator(integer=True))
        ax2 = ax.twinx()
        ax2.plot(steps, [len(h) for h in history], color="C1", marker=".", label="nonzero crossings")
        ax2.set_ylabel("nonzero crossings")
        ax2.spines["top"].set_visible(False)
        lines = ax.get_lines() + ax2.get_lines()
        ax.legend(lines, [ln.get_label() for ln in lines], frameon=False, loc="center right")
        fig.tight_layout()
        _save(fig, path)
