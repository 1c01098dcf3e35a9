"""Figure rendering for CLI reports.  Only the CLI imports this module."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def table1_figure(rows: list[dict], path) -> Path:
    """Normalized MSE against condition number, one marker per algorithm."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in rows:
        marker = "o" if r["algorithm"].startswith("sfc") else "s" if r["algorithm"].startswith("wino") else "^"
        ax.scatter(float(r["kappa"]), float(r["mse_normalized"]), marker=marker)
        ax.annotate(r["label"], (float(r["kappa"]), float(r["mse_normalized"])), fontsize=7,
                    xytext=(3, 3), textcoords="offset points")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("condition number")
    ax.set_ylabel("fp16 MSE (direct = 1)")
    return _save(fig, path)


def energy_figure(grid: np.ndarray, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(4, 3.5))
    im = ax.imshow(np.log10(np.maximum(grid, 1e-12)), cmap="viridis")
    fig.colorbar(im, ax=ax, label="log10 mean energy")
    ax.set_title(title, fontsize=9)
    return _save(fig, path)


def ablation_figure(rows: list[dict], path) -> Path:
    """Mean MSE per bit width for each grouping pair; unsupported layers are skipped."""
    rows = [r for r in rows if r.get("filter_grouping") and r.get("mse") not in (None, "", "unsupported")]
    groups = sorted({(r["filter_grouping"], r["act_grouping"]) for r in rows})
    bits = sorted({int(r["bits"]) for r in rows}, reverse=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(len(groups), 1)
    for i, g in enumerate(groups):
        means = [np.mean([float(r["mse"]) for r in rows
                          if (r["filter_grouping"], r["act_grouping"]) == g and int(r["bits"]) == b])
                 for b in bits]
        ax.bar(np.arange(len(bits)) + i * width, means, width, label=f"filter {g[0]} / act {g[1]}")
    ax.set_xticks(np.arange(len(bits)) + width * (len(groups) - 1) / 2)
    ax.set_xticklabels([f"int{b}" for b in bits])
    ax.set_yscale("log")
    ax.set_ylabel("output MSE")
    ax.legend(fontsize=7)
    return _save(fig, path)
