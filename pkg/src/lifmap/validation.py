"""Cross-engine comparisons, precision sweeps and the synthetic parameter suite."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DecayRangeError, UndefinedCorrelationError
from .loihi import run_loihi
from .metrics import density, match_spikes, pearson, rmse
from .network import (
    NetworkGraph,
    StimulusProgram,
    translate_network,
)
from .params import (
    MappingConfig,
    NeuronParams,
    derive_loihi_params,
    forward_transform,
    inverse_transform,
)
from .reference import run_reference_network

DEFAULT_DTS = (0.1, 1.0, 10.0)
DEFAULT_SCALES = (1e-3, 1e-4, 1e-5)


@dataclass
class Series:
    """Paired samples for one neuron. ``mask`` is False within one sample of a spike."""

    t_ms: np.ndarray
    V_ref: np.ndarray
    V_emu: np.ndarray
    I_ref: np.ndarray
    I_emu: np.ndarray
    mask: np.ndarray


@dataclass
class ValidationReport:
    rmse: float
    rmse_subthreshold: float
    rmse_current: float
    pearson_r: float
    correlation_defined: bool
    n_samples: int
    spike_count_ref: int
    spike_count_emu: int
    max_spike_time_offset: float | None
    series: Series
    histogram: tuple
    spikes_ref_ms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    spikes_emu_ms: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def summary(self) -> dict:
        return {
            "pearson_r": self.pearson_r,
            "correlation_defined": self.correlation_defined,
            "rmse_mV": self.rmse,
            "rmse_subthreshold_mV": self.rmse_subthreshold,
            "rmse_current_nA": self.rmse_current,
            "n_samples": self.n_samples,
            "spike_count_ref": self.spike_count_ref,
            "spike_count_emu": self.spike_count_emu,
            "max_spike_time_offset_steps": self.max_spike_time_offset,
        }


@dataclass
class NetworkReport:
    per_neuron: list[ValidationReport]
    pooled: ValidationReport
    warnings: list[str] = field(default_factory=list)


def _steps(duration_ms, step_ms):
    ratio = duration_ms / step_ms
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ConfigError(f"duration {duration_ms} ms is not a whole number of {step_ms} ms steps")
    return n


def _sample_index(times_ms, interval_ms):
    """Index of the first sample at or after each event time."""
    idx = np.ceil(np.asarray(times_ms) / interval_ms - 1e-9).astype(np.int64) - 1
    return idx


def _spike_mask(n_samples, spike_samples, exclude):
    mask = np.ones(n_samples, dtype=bool)
    if exclude:
        for s in spike_samples:
            mask[max(0, s - 1) : min(n_samples, s + 2)] = False
    return mask


def _report(series: Series, spikes_ref_ms, spikes_emu_ms, dt_ms) -> ValidationReport:
    try:
        r = pearson(series.V_ref, series.V_emu)
        defined = True
    except UndefinedCorrelationError:
        r, defined = math.nan, False
    sub = series.mask
    rmse_sub = rmse(series.V_ref[sub], series.V_emu[sub]) if sub.any() else math.nan
    offsets = match_spikes(spikes_ref_ms, spikes_emu_ms) / dt_ms
    return ValidationReport(
        rmse=rmse(series.V_ref, series.V_emu),
        rmse_subthreshold=rmse_sub,
        rmse_current=rmse(series.I_ref, series.I_emu),
        pearson_r=r,
        correlation_defined=defined,
        n_samples=int(series.t_ms.size),
        spike_count_ref=int(np.size(spikes_ref_ms)),
        spike_count_emu=int(np.size(spikes_emu_ms)),
        max_spike_time_offset=float(np.max(np.abs(offsets))) if offsets.size else None,
        series=series,
        histogram=density(series.V_ref, series.V_emu),
        spikes_ref_ms=np.asarray(spikes_ref_ms, dtype=float),
        spikes_emu_ms=np.asarray(spikes_emu_ms, dtype=float),
    )


def compare_network(
    graph: NetworkGraph,
    stim: StimulusProgram,
    cfg: MappingConfig,
    duration_ms: float,
    ref_step_ms: float | None = None,
    sample_interval_ms: float | None = None,
    exclude_spike_samples: bool = True,
    v0_mV=None,
    n_cores: int | None = None,
) -> NetworkReport:
    """Run both engines on one network and compare inverse-mapped traces.

    Both start from ``v0_mV`` (default: each neuron's resting potential).
    Comparison samples sit on a grid of ``sample_interval_ms`` (default dt).
    """
    ref_step_ms = cfg.dt_ms if ref_step_ms is None else ref_step_ms
    interval = cfg.dt_ms if sample_interval_ms is None else sample_interval_ms
    steps = _steps(duration_ms, cfg.dt_ms)
    stride = _steps(interval, cfg.dt_ms)
    n = graph.n_neurons
    neurons = graph.neurons
    v_reset = np.array([p.v_reset_mV for p in neurons])
    if v0_mV is None:
        v0_mV = np.array([p.e_rest_mV for p in neurons])
    v0_mV = np.broadcast_to(np.asarray(v0_mV, dtype=float), (n,))

    lnet = translate_network(graph, cfg, stim)
    v0_levels = np.rint(forward_transform(v0_mV, v_reset, cfg.v_scale_mV)).astype(np.int64)
    emu = run_loihi(lnet, steps, n_cores=n_cores, v0=v0_levels)
    ref = run_reference_network(
        graph, stim, duration_ms, step_ms=ref_step_ms, output_interval_ms=interval, v0_mV=v0_mV
    )

    rows = np.arange(stride - 1, steps, stride)
    V_emu = inverse_transform(emu.v[rows].astype(float), v_reset, cfg.v_scale_mV)
    C = np.array([p.capacitance_nF for p in neurons])
    I_emu = emu.u[rows].astype(float) * C * cfg.v_scale_mV / cfg.dt_ms
    n_samples = rows.size

    reports = []
    for i in range(n):
        ref_ms = ref.spikes[i].times
        emu_ms = (emu.spikes[i].times + 1) * cfg.dt_ms
        spike_samples = np.concatenate(
            [_sample_index(ref_ms, interval), _sample_index(emu_ms, interval)]
        )
        series = Series(
            t_ms=ref.t_ms,
            V_ref=ref.V_mV[:, i],
            V_emu=V_emu[:, i],
            I_ref=ref.I_nA[:, i],
            I_emu=I_emu[:, i],
            mask=_spike_mask(n_samples, spike_samples, exclude_spike_samples),
        )
        reports.append(_report(series, ref_ms, emu_ms, cfg.dt_ms))

    pooled = _pool(reports, cfg.dt_ms)
    return NetworkReport(per_neuron=reports, pooled=pooled, warnings=list(lnet.warnings))


def _pool(reports: list[ValidationReport], dt_ms) -> ValidationReport:
    if len(reports) == 1:
        return reports[0]
    cat = lambda name: np.concatenate([getattr(r.series, name) for r in reports])
    series = Series(
        t_ms=cat("t_ms"),
        V_ref=cat("V_ref"),
        V_emu=cat("V_emu"),
        I_ref=cat("I_ref"),
        I_emu=cat("I_emu"),
        mask=cat("mask"),
    )
    pooled = _report(series, np.zeros(0), np.zeros(0), dt_ms)
    pooled.spike_count_ref = sum(r.spike_count_ref for r in reports)
    pooled.spike_count_emu = sum(r.spike_count_emu for r in reports)
    offsets = [r.max_spike_time_offset for r in reports if r.max_spike_time_offset is not None]
    pooled.max_spike_time_offset = max(offsets) if offsets else None
    return pooled


def compare_single_neuron(
    neuron: NeuronParams,
    cfg: MappingConfig,
    stim: StimulusProgram,
    duration_ms: float = 500.0,
    exclude_spike_samples: bool = True,
    v0_mV: float | None = None,
) -> ValidationReport:
    return compare_network(
        NetworkGraph([neuron]),
        stim,
        cfg,
        duration_ms,
        exclude_spike_samples=exclude_spike_samples,
        v0_mV=v0_mV,
    ).pooled


@dataclass
class SweepResult:
    axis_name: str
    axis: list[float]
    rmse_v: list[float]
    rmse_u: list[float]
    steps: list[int]
    representable: list[bool]
    notes: list[str]

    def rows(self):
        return list(zip(self.axis, self.rmse_v, self.rmse_u, self.steps, self.representable))


def _check_axis(values):
    values = [float(x) for x in values]
    diffs = np.diff(values)
    if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("sweep axis must be strictly monotone")
    return values


def _sweep_point(neuron, stim, duration_ms, cfg, ref_step_ms, interval):
    try:
        rep = compare_network(
            NetworkGraph([neuron]),
            stim,
            cfg,
            duration_ms,
            ref_step_ms=ref_step_ms,
            sample_interval_ms=interval,
        ).pooled
    except DecayRangeError as exc:
        return math.nan, math.nan, False, str(exc)
    return rep.rmse_subthreshold, rep.rmse_current, True, ""


def _run_points(jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_star_point, jobs))
    return [_star_point(job) for job in jobs]


def _star_point(job):
    return _sweep_point(*job)


def sweep_temporal(
    neuron: NeuronParams,
    stim: StimulusProgram,
    duration_ms: float = 500.0,
    dts=DEFAULT_DTS,
    v_scale_mV: float = 1e-4,
    workers: int = 1,
) -> SweepResult:
    """RMSE against a fine-step reference, compared on the coarsest dt grid.

    A dt the decay mantissa cannot represent is reported as NaN and flagged,
    not raised.
    """
    dts = _check_axis(dts)
    ref_step = min(dts)
    interval = max(dts)
    steps = [_steps(duration_ms, dt) for dt in dts]
    jobs = [
        (neuron, stim, duration_ms, MappingConfig(dt, v_scale_mV), ref_step, interval) for dt in dts
    ]
    out = _run_points(jobs, workers)
    return SweepResult(
        axis_name="dt_ms",
        axis=dts,
        rmse_v=[o[0] for o in out],
        rmse_u=[o[1] for o in out],
        steps=steps,
        representable=[o[2] for o in out],
        notes=[o[3] for o in out],
    )


def sweep_voltage(
    neuron: NeuronParams,
    stim: StimulusProgram,
    duration_ms: float = 500.0,
    scales=DEFAULT_SCALES,
    dt_ms: float = 1.0,
    workers: int = 1,
) -> SweepResult:
    scales = _check_axis(scales)
    jobs = [(neuron, stim, duration_ms, MappingConfig(dt_ms, vs), dt_ms, dt_ms) for vs in scales]
    for job in jobs:
        # a threshold under one level is a config error for the whole sweep
        try:
            derive_loihi_params(neuron, job[3])
        except DecayRangeError:
            pass
    out = _run_points(jobs, workers)
    return SweepResult(
        axis_name="v_scale_mV",
        axis=scales,
        rmse_v=[o[0] for o in out],
        rmse_u=[o[1] for o in out],
        steps=[_steps(duration_ms, dt_ms)] * len(scales),
        representable=[o[2] for o in out],
        notes=[o[3] for o in out],
    )
