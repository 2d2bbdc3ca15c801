"""Figure rendering for reports.

Figures are built on :class:`matplotlib.figure.Figure` with the Agg canvas,
so nothing touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib as mpl
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}
WIDTH_IN = 6.5


def _figure(nrows: int, height_per_row: float = 1.6) -> tuple[Figure, np.ndarray]:
    with mpl.rc_context(STYLE):
        fig = Figure(figsize=(WIDTH_IN, height_per_row * nrows + 0.4))
        FigureCanvasAgg(fig)
        axes = fig.subplots(nrows, 1, sharex=True, squeeze=False)[:, 0]
    return fig, axes


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    with mpl.rc_context(STYLE):
        fig.savefig(path)
    return path


def plot_timeseries(series, metrics, path) -> Path:
    """PoC voltage, current command, dc voltage and PLL frequency vs. time."""
    t = series.array("t")
    fig, (ax_v, ax_i, ax_dc, ax_f) = _figure(4)
    with mpl.rc_context(STYLE):
        ax_v.plot(t, series.array("v_poc"), label="PoC voltage")
        if math.isfinite(metrics.v_star):
            ax_v.axhline(metrics.v_star, ls="--", c="k", lw=0.8, label=f"optimum {metrics.v_star:.4f}")
        ax_v.set_ylabel("V (pu)")
        ax_v.legend(loc="lower right")
        ax_v.set_title(f"{metrics.scenario} / {metrics.strategy}")

        ax_i.plot(t, series.array("id_cmd"), label="id")
        ax_i.plot(t, series.array("iq_cmd"), label="iq")
        ax_i.set_ylabel("current (pu)")
        ax_i.legend(loc="lower right")

        ax_dc.plot(t, series.array("vdc"), label="vdc")
        ax_dc.plot(t, series.array("vdc_filt"), ls=":", label="filtered")
        ax_dc.axhline(metrics.vdc_ref, ls="--", c="k", lw=0.8)
        ax_dc.set_ylabel("dc (pu)")
        ax_dc.legend(loc="lower right")

        ax_f.plot(t, series.array("f_pll"))
        ax_f.set_ylabel("f PLL (Hz)")
        ax_f.set_xlabel("time (s)")
        if metrics.mode_switch_time is not None:
            for ax in (ax_v, ax_i, ax_dc, ax_f):
                ax.axvline(metrics.mode_switch_time, c="tab:red", lw=0.6, alpha=0.6)
        fig.align_ylabels()
    return _save(fig, path)


def plot_sweep(rows: Sequence[dict], x_key: str, y_keys: Sequence[str], path) -> Path:
    fig, (ax,) = _figure(1, 2.6)
    with mpl.rc_context(STYLE):
        x = np.array([r[x_key] for r in rows], dtype=float)
        order = np.argsort(x)
        for key in y_keys:
            y = np.array([r[key] for r in rows], dtype=float)
            ax.plot(x[order], y[order], marker=".", label=key)
        ax.set_xlabel(x_key)
        ax.legend()
    return _save(fig, path)


def plot_convergence(errors: dict[str, np.ndarray], path) -> Path:
    """Normalised distance to the optimiser vs. iteration, one band per schedule.

    ``errors`` maps a schedule label to an array of shape ``(n_scenarios, n_iters)``.
    """
    fig, (ax,) = _figure(1, 2.8)
    with mpl.rc_context(STYLE):
        for label, e in errors.items():
            k = np.arange(e.shape[1])
            med = np.median(e, axis=0)
            ax.semilogy(k, np.maximum(med, 1e-6), label=f"{label} median")
            ax.fill_between(k, np.maximum(e.min(axis=0), 1e-6), np.maximum(e.max(axis=0), 1e-6), alpha=0.2)
        ax.axhline(0.01, ls="--", c="k", lw=0.8)
        ax.set_xlabel("iteration")
        ax.set_ylabel("|x - x*| / range")
        ax.legend()
    return _save(fig, path)
