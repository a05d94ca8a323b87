"""Optional PNG figures rendered next to the CSV outputs.

matplotlib is imported lazily so the library and CSV paths work without it.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}
REF_COLOR = "#1f4e79"
EMU_COLOR = "#c0504d"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(STYLE)
    return plt


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    import matplotlib.pyplot as plt

    plt.close(fig)
    return Path(path)


def validation_figures(report, out_dir, neuron_reports=None, max_traces: int = 4):
    """Trace overlay, scatter with trend line, raster and density for one validation run."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    paths = []
    shown = (neuron_reports or [report])[:max_traces]

    fig, axes = plt.subplots(len(shown), 1, figsize=(6, 1.6 * len(shown) + 0.6), squeeze=False)
    for ax, rep in zip(axes[:, 0], shown):
        s = rep.series
        ax.plot(s.t_ms, s.V_ref, color=REF_COLOR, lw=1.2, label="reference")
        ax.plot(s.t_ms, s.V_emu, color=EMU_COLOR, lw=0.8, ls="--", label="emulator (mapped)")
        ax.set_ylabel("V (mV)")
    axes[0, 0].legend(loc="best", frameon=False)
    axes[-1, 0].set_xlabel("t (ms)")
    paths.append(_save(fig, out_dir / "traces.png"))

    s = report.series
    fig, ax = plt.subplots(figsize=(3.6, 3.4))
    ax.scatter(s.V_ref, s.V_emu, s=3, c=s.t_ms, cmap="viridis", alpha=0.7)
    slope, intercept = np.polyfit(s.V_ref, s.V_emu, 1) if np.ptp(s.V_ref) > 0 else (1.0, 0.0)
    x = np.array([s.V_ref.min(), s.V_ref.max()])
    ax.plot(x, slope * x + intercept, color="k", lw=0.8)
    r = report.pearson_r
    ax.set_title(f"r = {r:.6f}" if report.correlation_defined else "r undefined")
    ax.set_xlabel("reference V (mV)")
    ax.set_ylabel("emulator V (mV)")
    paths.append(_save(fig, out_dir / "scatter.png"))

    reps = neuron_reports or [report]
    fig, ax = plt.subplots(figsize=(6, 2.4))
    for i, rep in enumerate(reps):
        ax.plot(rep.spikes_ref_ms, np.full(rep.spikes_ref_ms.size, i - 0.15), "|", color=REF_COLOR)
        ax.plot(rep.spikes_emu_ms, np.full(rep.spikes_emu_ms.size, i + 0.15), "|", color=EMU_COLOR)
    ax.set_xlabel("t (ms)")
    ax.set_ylabel("neuron")
    paths.append(_save(fig, out_dir / "raster.png"))

    edges, count_ref, count_emu = report.histogram
    centers = 0.5 * (edges[1:] + edges[:-1])
    width = edges[1] - edges[0]
    fig, ax = plt.subplots(figsize=(4, 2.6))
    ax.plot(centers, count_ref / (count_ref.sum() * width), color=REF_COLOR, label="reference")
    ax.plot(centers, count_emu / (count_emu.sum() * width), color=EMU_COLOR, ls="--", label="emulator")
    ax.set_xlabel("V (mV)")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    paths.append(_save(fig, out_dir / "density.png"))
    return paths


def sweep_figure(results, out_path, neuron_ids=None):
    """RMSE of voltage and current against log10 of the swept precision."""
    plt = _pyplot()
    fig, (ax_v, ax_u) = plt.subplots(1, 2, figsize=(6.4, 2.6))
    for k, res in enumerate(results):
        x = np.log10(np.asarray(res.axis))
        label = f"neuron {neuron_ids[k]}" if neuron_ids is not None else None
        ax_v.plot(x, res.rmse_v, "o-", ms=3, label=label)
        ax_u.plot(x, res.rmse_u, "o-", ms=3, label=label)
    name = results[0].axis_name if results else ""
    for ax, what in ((ax_v, "RMSE V (mV)"), (ax_u, "RMSE I (nA)")):
        ax.set_xlabel(f"log10 {name}")
        ax.set_ylabel(what)
    if neuron_ids is not None and len(results) <= 8:
        ax_v.legend(frameon=False)
    return _save(fig, out_path)


def bench_figure(rows, out_path):
    from .bench import timing_table

    plt = _pyplot()
    sizes, table = timing_table(rows)
    fig, ax = plt.subplots(figsize=(4, 3))
    for engine, seconds in table.items():
        ax.loglog(sizes, seconds, "o-", ms=3, label=engine)
    ax.set_xlabel("network size (neurons)")
    ax.set_ylabel("CPU time (s)")
    ax.legend(frameon=False)
    return _save(fig, out_path)
