"""PNG renderings of sweep results. Uses the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sweep import SweepResult  # noqa: E402

__all__ = ["plot_curves", "plot_phase_diagram", "plot_result"]

_CURVE_QUANTITIES = (("concurrence", "concurrence"), ("abs_rho34", r"$|\rho_{34}|$"), ("I2", r"$I_2$"))


def plot_curves(result: SweepResult, path: str | Path) -> Path:
    """Each quantity against the last axis, one line per combination of the other axes."""
    cfg = result.config
    x_axis = cfg.axes[-1]
    x = np.array(x_axis.values)
    shape = cfg.shape
    fig, axes = plt.subplots(1, len(_CURVE_QUANTITIES), figsize=(4.2 * len(_CURVE_QUANTITIES), 3.4))
    for ax, (col, label) in zip(axes, _CURVE_QUANTITIES):
        data = result.column(col).reshape(-1, shape[-1])
        for k, curve in enumerate(data):
            idx = np.unravel_index(k, shape[:-1]) if len(shape) > 1 else ()
            tag = ", ".join(f"{a.name}={a.values[i]:g}" for a, i in zip(cfg.axes[:-1], idx))
            ax.plot(x, curve, label=tag or None)
        ax.set_xlabel(x_axis.name)
        ax.set_ylabel(label)
        if len(shape) > 1:
            ax.legend(fontsize=7)
    fig.suptitle(cfg.name)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_phase_diagram(result: SweepResult, path: str | Path, quantity: str = "concurrence") -> Path:
    """Filled contours over the two axes; hatched cells mark positivity violations."""
    cfg = result.config
    xa, ya = cfg.axes
    z = result.grid(quantity)
    bad = ~result.grid("positivity_ok").astype(bool) & ~np.isnan(z)
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    cs = ax.contourf(xa.values, ya.values, z.T, levels=20, cmap="viridis")
    fig.colorbar(cs, ax=ax, label=quantity)
    if bad.any():
        ax.contourf(xa.values, ya.values, bad.T.astype(float), levels=[0.5, 1.5], colors="none", hatches=["///"])
    ax.set_xlabel(xa.name)
    ax.set_ylabel(ya.name)
    ax.set_title(cfg.name)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_result(result: SweepResult, path: str | Path) -> Path:
    if result.config.phase_diagram:
        return plot_phase_diagram(result, path)
    return plot_curves(result, path)
