"""Matplotlib rendering of error time series, written next to the CSVs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLES = {"tq": "-", "twosample": "--", "rk4": "-."}
_FLOOR = 1e-18  # keeps exact zeros plottable on the log axis


def _curve(records, extract):
    t = np.array([r.t for r in records])
    y = np.maximum(np.abs(np.array([extract(r) for r in records])), _FLOOR)
    return t, y


def render_error_figures(records_by_algo: dict, out_dir, dpi: int = 150) -> list[Path]:
    """Write attitude/velocity/position error figures; returns the file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    channels = [
        ("attitude_errors.png", "Principal angle error [rad]", lambda r: r.att_err),
        ("velocity_errors.png", "Velocity error [m/s]", lambda r: np.linalg.norm(r.vel_err)),
        ("position_errors.png", "Position error [m]", lambda r: np.linalg.norm(r.pos_err)),
    ]
    paths = []
    for fname, ylabel, extract in channels:
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        for name, records in records_by_algo.items():
            if not records:
                continue
            t, y = _curve(records, extract)
            ax.semilogy(t, y, _STYLES.get(name, "-"), label=name, linewidth=1.2)
        ax.set_xlabel("time [s]")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        if records_by_algo:
            ax.legend(loc="best")
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=dpi)
        plt.close(fig)
        paths.append(path)
    return paths
