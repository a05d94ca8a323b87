"""Command-line entry point: simulate, validate, sweep, bench, map-params."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import DEFAULT_SIZES, bench_scaling
from .errors import ConfigError, LifmapError, OutputError
from .loihi import run_loihi
from .network import ExternalInput, StimulusProgram, translate_network
from .outputs import ensure_dir, fmt, write_csv, write_manifest, write_matrix_csv
from .params import derive_loihi_params, inverse_transform
from .reference import run_reference_network
from .specfile import NetworkSpec, build_experiment, load_spec, parse_spec
from .validation import DEFAULT_DTS, DEFAULT_SCALES, compare_network, sweep_temporal, sweep_voltage

OUT_ENV = "LIFMAP_OUT"
DEFAULT_OUT = "lifmap-out"

METRIC_HEADER = [
    "scope",
    "neuron_id",
    "pearson_r",
    "correlation_defined",
    "rmse_mV",
    "rmse_subthreshold_mV",
    "rmse_current_nA",
    "n_samples",
    "spike_count_ref",
    "spike_count_emu",
    "max_spike_time_offset_steps",
]


def _load(args) -> NetworkSpec:
    spec = load_spec(args.spec)
    if getattr(args, "seed", None) is not None:
        data = spec.resolved()
        data["run"]["seed"] = args.seed
        spec = parse_spec(data)
    return spec


def _out_dir(args) -> Path:
    return ensure_dir(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _stride(interval, dt):
    stride = int(round(interval / dt))
    if stride < 1 or abs(stride * dt - interval) > 1e-9 * interval:
        raise ConfigError(f"output interval {interval} ms must be a multiple of dt {dt} ms")
    return stride


def cmd_simulate(args) -> int:
    spec = _load(args)
    out = _out_dir(args)
    graph, stim, cfg = build_experiment(spec)
    T = spec.run.duration_ms
    interval = spec.output_interval_ms
    resolved = spec.resolved()
    engines = ("reference", "loihi") if args.engine == "both" else (args.engine,)
    e_rest = np.array([p.e_rest_mV for p in graph.neurons])
    v_reset = np.array([p.v_reset_mV for p in graph.neurons])
    n = graph.n_neurons

    for engine in engines:
        if engine == "reference":
            res = run_reference_network(
                graph, stim, T, step_ms=spec.ref_step_ms, output_interval_ms=interval, v0_mV=e_rest
            )
            header = ["t_ms"] + [f"n{i}_V_mV" for i in range(n)]
            traces = write_matrix_csv(
                out / "reference_traces.csv", header, [res.t_ms, *res.V_mV.T]
            )
            spikes = write_csv(
                out / "reference_spikes.csv",
                ["neuron_id", "t_ms"],
                [(i, t) for i, tr in enumerate(res.spikes) for t in tr.times],
            )
            write_manifest(
                out / "manifest_reference.json",
                "simulate",
                resolved,
                [traces, spikes],
                engine="reference",
                seed=spec.run.seed,
            )
        else:
            lnet = translate_network(graph, cfg, stim)
            steps = int(round(T / cfg.dt_ms))
            stride = _stride(interval, cfg.dt_ms)
            v0 = np.rint((e_rest - v_reset) / cfg.v_scale_mV).astype(np.int64)
            res = run_loihi(lnet, steps, n_cores=spec.mapping.n_cores, v0=v0)
            rows = np.arange(stride - 1, steps, stride)
            t_ms = (rows + 1) * cfg.dt_ms
            v = res.v[rows].astype(float)
            mapped = inverse_transform(v, v_reset, cfg.v_scale_mV)
            header = ["t_ms"]
            columns = [t_ms]
            for i in range(n):
                header += [f"n{i}_v_levels", f"n{i}_V_mV_mapped"]
                columns += [v[:, i], mapped[:, i]]
            traces = write_matrix_csv(out / "loihi_traces.csv", header, columns)
            spikes = write_csv(
                out / "loihi_spikes.csv",
                ["neuron_id", "step", "t_ms"],
                [
                    (i, int(k), (k + 1) * cfg.dt_ms)
                    for i, tr in enumerate(res.spikes)
                    for k in tr.times
                ],
            )
            write_manifest(
                out / "manifest_loihi.json",
                "simulate",
                resolved,
                [traces, spikes],
                engine="loihi",
                seed=spec.run.seed,
                n_cores=res.layout.n_cores,
                warnings=lnet.warnings,
            )
    print(f"simulate: wrote {', '.join(engines)} outputs to {out}")
    return 0


def _metric_row(scope, neuron_id, rep):
    s = rep.summary()
    return [scope, neuron_id] + [s[k] for k in METRIC_HEADER[2:]]


def cmd_validate(args) -> int:
    spec = _load(args)
    out = _out_dir(args)
    graph, stim, cfg = build_experiment(spec)
    report = compare_network(
        graph,
        stim,
        cfg,
        spec.run.duration_ms,
        exclude_spike_samples=spec.run.exclude_spike_samples,
        n_cores=spec.mapping.n_cores,
    )
    pooled = report.pooled
    rows = [_metric_row("neuron", i, r) for i, r in enumerate(report.per_neuron)]
    rows.append(_metric_row("pooled", None, pooled))
    files = [write_csv(out / "metrics.csv", METRIC_HEADER, rows)]
    files.append(
        write_csv(
            out / "scatter.csv",
            ["neuron_id", "t_ms", "V_ref_mV", "V_emu_mV", "I_ref_nA", "I_emu_nA", "subthreshold"],
            [
                (i, *vals)
                for i, r in enumerate(report.per_neuron)
                for vals in zip(
                    r.series.t_ms,
                    r.series.V_ref,
                    r.series.V_emu,
                    r.series.I_ref,
                    r.series.I_emu,
                    r.series.mask,
                )
            ],
        )
    )
    raster = []
    for i, r in enumerate(report.per_neuron):
        raster += [("reference", i, t) for t in r.spikes_ref_ms]
        raster += [("loihi", i, t) for t in r.spikes_emu_ms]
    files.append(write_csv(out / "raster.csv", ["engine", "neuron_id", "t_ms"], raster))
    edges, c_ref, c_emu = pooled.histogram
    files.append(
        write_csv(
            out / "density.csv",
            ["bin_lo_mV", "bin_hi_mV", "count_ref", "count_emu"],
            zip(edges[:-1], edges[1:], c_ref, c_emu),
        )
    )
    if args.figures:
        from .plots import validation_figures

        files += validation_figures(pooled, out, neuron_reports=report.per_neuron)
    write_manifest(
        out / "manifest_validate.json",
        "validate",
        spec.resolved(),
        files,
        seed=spec.run.seed,
        warnings=report.warnings,
    )
    r_text = f"{pooled.pearson_r:.6f}" if pooled.correlation_defined else "undefined (constant series)"
    print(
        f"validate: r={r_text} rmse={pooled.rmse:.6g} mV "
        f"rmse_subthreshold={pooled.rmse_subthreshold:.6g} mV "
        f"spikes ref/emu={pooled.spike_count_ref}/{pooled.spike_count_emu}"
    )
    return 0


def neuron_stimulus(stim: StimulusProgram, i: int) -> StimulusProgram:
    """The part of a network stimulus that targets neuron ``i``, re-indexed to 0."""
    ext = [ExternalInput(0, s.train, s.weight_nA) for s in stim.external if s.target == i]
    return StimulusProgram(bias_nA=stim.bias_nA[i : i + 1], external=ext)


def _parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_sweep(args) -> int:
    spec = _load(args)
    out = _out_dir(args)
    graph, stim, cfg = build_experiment(spec)
    T = spec.run.duration_ms
    if args.axis == "dt":
        values = _parse_floats(args.values) if args.values else list(DEFAULT_DTS)
        run = lambda nrn, st: sweep_temporal(
            nrn, st, T, values, v_scale_mV=cfg.v_scale_mV, workers=args.workers
        )
    else:
        values = _parse_floats(args.values) if args.values else list(DEFAULT_SCALES)
        run = lambda nrn, st: sweep_voltage(nrn, st, T, values, dt_ms=cfg.dt_ms, workers=args.workers)
    results = [run(nrn, neuron_stimulus(stim, i)) for i, nrn in enumerate(graph.neurons)]
    axis_name = results[0].axis_name
    rows = [
        (i, x, rv, ru, steps, ok, note)
        for i, res in enumerate(results)
        for x, rv, ru, steps, ok, note in zip(
            res.axis, res.rmse_v, res.rmse_u, res.steps, res.representable, res.notes
        )
    ]
    files = [
        write_csv(
            out / f"sweep_{args.axis}.csv",
            ["neuron_id", axis_name, "rmse_v_mV", "rmse_u_nA", "steps", "representable", "note"],
            rows,
        )
    ]
    if args.figures:
        from .plots import sweep_figure

        files.append(
            sweep_figure(results, out / f"sweep_{args.axis}.png", list(range(len(results))))
        )
    write_manifest(
        out / f"manifest_sweep_{args.axis}.json",
        "sweep",
        spec.resolved(),
        files,
        axis=args.axis,
        values=values,
        seed=spec.run.seed,
    )
    print(f"sweep: {len(rows)} rows over {axis_name} written to {files[0]}")
    return 0


def cmd_bench(args) -> int:
    out = _out_dir(args)
    sizes = [int(x) for x in _parse_floats(args.sizes)] if args.sizes else list(DEFAULT_SIZES)
    rows = bench_scaling(sizes, args.duration, seed=args.seed or 0, repeats=args.repeats)
    files = [
        write_csv(
            out / "bench.csv",
            ["size", "engine", "cpu_seconds", "steps", "n_synapses", "spikes"],
            [(r.size, r.engine, r.cpu_seconds, r.steps, r.n_synapses, r.spikes) for r in rows],
        )
    ]
    if args.figures:
        from .plots import bench_figure

        files.append(bench_figure(rows, out / "bench.png"))
    for r in rows:
        print(f"{r.size:>6} {r.engine:<9} {r.cpu_seconds:.4f} s")
    return 0


def cmd_map_params(args) -> int:
    spec = _load(args)
    graph, _, cfg = build_experiment(spec)
    header = [
        "neuron_id",
        "decay_v",
        "decay_u",
        "bias",
        "threshold",
        "weight_scale",
        "dt_ms",
        "v_scale_mV",
    ]
    print(",".join(header))
    for i, neuron in enumerate(graph.neurons):
        try:
            p = derive_loihi_params(neuron, cfg)
        except LifmapError as exc:
            exc.args = (f"neuron {i}: {exc.args[0]}",)
            exc.neuron_index = i
            raise
        vals = [i, p.decay_v, p.decay_u, p.bias, p.threshold, p.weight_scale, p.source_dt_ms,
                p.source_v_scale_mV]
        print(",".join(fmt(v) for v in vals))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lifmap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lifmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("spec", help="network spec JSON (or a run manifest to replay)")
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--figures", action="store_true", help="also render PNG figures")

    p = sub.add_parser("simulate", help="run one or both engines and write traces")
    common(p)
    p.add_argument("--engine", choices=["reference", "loihi", "both"], default="both")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare engines; write metric and plot-data CSVs")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="temporal (dt) or voltage (vs) precision sweep")
    common(p)
    p.add_argument("--axis", choices=["dt", "vs"], required=True)
    p.add_argument("--values", help="comma-separated sweep values (default: 0.1,1,10 or 1e-3,1e-4,1e-5)")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="CPU-time scaling over network size")
    common(p, spec=False)
    p.add_argument("--sizes", help="comma-separated sizes (default: 20,100,500,1000,5000,10000)")
    p.add_argument("--duration", type=float, default=500.0, help="simulated ms per run")
    p.add_argument("--repeats", type=int, default=1, help="report the minimum of N runs")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("map-params", help="print derived compartment parameters")
    p.add_argument("spec")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_map_params)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LifmapError as exc:
        payload = {"error": exc.category, "message": str(exc)}
        if hasattr(exc, "neuron_index"):
            payload["neuron"] = exc.neuron_index
        print(json.dumps(payload), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(json.dumps({"error": OutputError.category, "message": str(exc)}), file=sys.stderr)
        return OutputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
