"""SVG line charts for the CLI reports.

Figures are rendered off-screen and written with a fixed hash salt and no
date stamp, so identical data gives identical SVG bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"svg.hashsalt": "bgshrink", "svg.fonttype": "path", "figure.figsize": (6.4, 4.2)}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_synthetic(rows, estimators, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        data = np.array([r for r in rows], dtype=float)
        sig = data[:, 0]
        for i, est in enumerate(estimators):
            line, = ax.plot(sig, data[:, 1 + 2 * i], "o", label=f"{est} (empirical)")
            ax.plot(sig, data[:, 2 + 2 * i], "-", color=line.get_color(),
                    label=f"{est} (theoretical)")
        ax.set_xlabel("noise std sigma")
        ax.set_ylabel("relative MSE")
        ax.legend(fontsize="small")
        ax.grid(alpha=0.3)
        _save(fig, path)


def plot_bounds(rows, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        G = np.array([r[0] for r in rows])
        for col, label, style in ((1, "MMSE worst ratio", "-"), (2, "MMSE explicit bound", "--"),
                                  (4, "MAP worst ratio", "-"), (5, "MAP explicit bound", "--")):
            ax.loglog(G, [r[col] for r in rows], style, label=label)
        ax.set_xlabel("G_m")
        ax.set_ylabel("excess / oracle risk")
        ax.legend(fontsize="small")
        ax.grid(alpha=0.3, which="both")
        _save(fig, path)


def plot_curves(rows, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        keys = list(dict.fromkeys((r[0], r[1]) for r in rows))
        for method, sigma in keys:
            pts = np.array([(r[2], r[3]) for r in rows if r[0] == method and r[1] == sigma])
            ax.plot(pts[:, 0], pts[:, 1], "-" if method == "mmse" else "--",
                    label=f"{method}, sigma={sigma:g}")
        ax.plot(ax.get_xlim(), ax.get_xlim(), ":", color="gray", linewidth=0.8)
        ax.set_xlabel("beta")
        ax.set_ylabel("shrunk coefficient")
        ax.legend(fontsize="small")
        ax.grid(alpha=0.3)
        _save(fig, path)


def plot_bands(names, columns: dict, path, ylabel: str) -> None:
    """Grouped per-band values, one line per entry of ``columns``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        x = np.arange(len(names))
        for label, vals in columns.items():
            ax.plot(x, vals, "o-", label=label)
        ax.set_xticks(x)
        ax.set_xticklabels(names, rotation=45)
        ax.set_ylabel(ylabel)
        ax.legend(fontsize="small")
        ax.grid(alpha=0.3)
        _save(fig, path)
