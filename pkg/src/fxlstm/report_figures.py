"""Figure rendering for the report path. Writes PNG files, never shows."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .perf_model import (
    DEVICE_BRAM_18K_TOTAL,
    DEVICE_DSP_TOTAL,
    DEVICE_LUT_TOTAL,
    REFERENCE_POINTS,
)


def render_utilization_figure(sweep_rows: list[dict], path: str, title: str) -> None:
    """Resource utilisation versus hidden size, one line per resource."""
    hs = [r["hidden_size"] for r in sweep_rows]
    dsp = [100.0 * r["dsp_used"] / DEVICE_DSP_TOTAL for r in sweep_rows]
    lut = [100.0 * r["lut_used"] / DEVICE_LUT_TOTAL for r in sweep_rows]
    bram = [100.0 * r["bram_18k_used"] / DEVICE_BRAM_18K_TOTAL for r in sweep_rows]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(hs, bram, "o--", color="tab:blue", label="BRAM (18 Kbit blocks)")
    ax.plot(hs, lut, "s-", color="tab:orange", label="logic LUTs")
    ax.plot(hs, dsp, "^-", color="tab:green", label="DSP slices")
    ax.axhline(100.0, color="gray", linewidth=0.8, linestyle=":")
    ax.set_xlabel("hidden size")
    ax.set_ylabel("utilisation [%]")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_design_points_figure(path: str) -> None:
    """Recorded operating points: throughput bars with the clock overlaid."""
    names = [p.name for p in REFERENCE_POINTS]
    tput = [p.throughput_gops for p in REFERENCE_POINTS]
    clock = [p.clock_mhz for p in REFERENCE_POINTS]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    xs = range(len(names))
    ax.bar(xs, tput, color="tab:blue", alpha=0.75, label="throughput [GOP/s]")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("throughput [GOP/s]")
    ax.grid(alpha=0.3, axis="y")

    ax2 = ax.twinx()
    ax2.plot(list(xs), clock, "o-", color="tab:red", label="clock [MHz]")
    ax2.set_ylabel("clock [MHz]")

    lines1, labels1 = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines1 + lines2, labels1 + labels2, loc="upper left")
    ax.set_title("recorded design points")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
