"""Floating-point LIF simulator stepped with the exact two-state propagator.

The state is (V, I_syn): membrane potential and an exponentially decaying
synaptic current. For piecewise-constant external current the update over
one step h is exact, so results do not depend on h except through when
spikes are detected and when input events land.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._synapses import DelayBuffer, SynapseTable
from .errors import ConfigError
from .network import (
    NetworkGraph,
    SpikeTrain,
    StimulusProgram,
    delay_to_steps,
    external_events,
)
from .params import NeuronParams


@dataclass
class RefState:
    V: float
    I_syn: float = 0.0
    t: float = 0.0


@dataclass(frozen=True)
class Propagator:
    neuron: NeuronParams
    step_ms: float
    p_vv: float
    p_vi: float
    p_ii: float
    p_ve: float
    drive_const: float


def propagator_coefficients(tau_v, tau_u, capacitance, resistance, h):
    """Entries of exp(A h) for the LIF + exponential-synapse system.

    Returns (p_vv, p_vi, p_ii, p_ve). Works elementwise on arrays.
    p_ve maps a constant external current to its one-step voltage effect.
    """
    tau_v = np.asarray(tau_v, dtype=float)
    tau_u = np.asarray(tau_u, dtype=float)
    p_vv = np.exp(-h / tau_v)
    p_ii = np.exp(-h / tau_u)
    rate_gap = 1.0 / tau_v - 1.0 / tau_u
    # expm1(h*g)/g is smooth through g = 0, where it equals h
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(
            np.abs(rate_gap * h) < 1e-12, h, np.expm1(rate_gap * h) / rate_gap
        )
    p_vi = p_vv * kernel / capacitance
    p_ve = -np.expm1(-h / tau_v) * resistance
    return p_vv, p_vi, p_ii, p_ve


def build_propagator(neuron: NeuronParams, h: float) -> Propagator:
    if not (math.isfinite(h) and h > 0):
        raise ConfigError(f"step h must be finite and > 0, got {h!r}")
    p_vv, p_vi, p_ii, p_ve = propagator_coefficients(
        neuron.tau_m_ms, neuron.tau_syn_ms, neuron.capacitance_nF, neuron.resistance_MOhm, h
    )
    return Propagator(
        neuron=neuron,
        step_ms=h,
        p_vv=float(p_vv),
        p_vi=float(p_vi),
        p_ii=float(p_ii),
        p_ve=float(p_ve),
        drive_const=float(-np.expm1(-h / neuron.tau_m_ms) * neuron.e_rest_mV),
    )


def ref_step(state: RefState, prop: Propagator, ext_current: float = 0.0, spike_input: float = 0.0):
    """Advance one step. Returns (new_state, fired)."""
    n = prop.neuron
    current = state.I_syn + spike_input
    offset = state.V - n.e_rest_mV
    offset = prop.p_vv * offset + prop.p_vi * current + prop.p_ve * ext_current
    V = n.e_rest_mV + offset
    fired = V > n.v_thresh_mV
    if fired:
        V = n.v_reset_mV
    return RefState(V=V, I_syn=prop.p_ii * current, t=state.t + prop.step_ms), fired


@dataclass
class RefResult:
    """Sampled traces (rows are sample times, columns neurons) and spike trains in ms."""

    t_ms: np.ndarray
    V_mV: np.ndarray | None
    I_nA: np.ndarray | None
    spikes: list[SpikeTrain]
    step_ms: float

    @property
    def spike_count(self) -> int:
        return sum(len(s) for s in self.spikes)


def _stride(output_interval, h):
    ratio = output_interval / h
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > 1e-9 * max(1.0, ratio):
        raise ConfigError(f"step h={h} must divide the output interval {output_interval}")
    return stride


def run_reference_network(
    graph: NetworkGraph,
    stim: StimulusProgram,
    duration_ms: float,
    step_ms: float = 1.0,
    output_interval_ms: float | None = None,
    v0_mV=None,
    record: bool = True,
) -> RefResult:
    """Simulate a whole network with exact per-neuron propagators.

    Samples are taken at the end of every output interval, so the first
    sample is at ``output_interval_ms`` and the last at ``duration_ms``.
    Spikes fired during step k are stamped (k + 1) * step_ms and reach their
    targets at the start of step k + delay.
    """
    if not (math.isfinite(duration_ms) and duration_ms > 0):
        raise ConfigError(f"duration_ms must be > 0, got {duration_ms!r}")
    if not (math.isfinite(step_ms) and step_ms > 0):
        raise ConfigError(f"step h must be finite and > 0, got {step_ms!r}")
    if output_interval_ms is None:
        output_interval_ms = step_ms
    stride = _stride(output_interval_ms, step_ms)
    n_steps = _stride(duration_ms, step_ms)
    n_samples = n_steps // stride

    neurons = graph.neurons
    n = len(neurons)
    e_rest = np.array([p.e_rest_mV for p in neurons])
    reset_offset = np.array([p.v_reset_mV for p in neurons]) - e_rest
    thresh_offset = np.array([p.v_thresh_mV for p in neurons]) - e_rest
    p_vv, p_vi, p_ii, p_ve = propagator_coefficients(
        [p.tau_m_ms for p in neurons],
        [p.tau_syn_ms for p in neurons],
        np.array([p.capacitance_nF for p in neurons]),
        np.array([p.resistance_MOhm for p in neurons]),
        step_ms,
    )
    bias_drive = p_ve * stim.bias_nA

    table = SynapseTable(
        n, graph.pre, graph.post, graph.weight_nA, delay_to_steps(graph.delay_ms, step_ms)
    )
    pending = DelayBuffer(n, table.max_delay, float)
    ext_step, ext_target, ext_weight = external_events(stim, step_ms)
    ext_bounds = np.searchsorted(ext_step, np.arange(n_steps + 1))

    offset = (np.asarray(v0_mV, dtype=float) - e_rest) if v0_mV is not None else np.zeros(n)
    offset = np.broadcast_to(offset, (n,)).copy()
    current = np.zeros(n)

    V_out = np.empty((n_samples, n)) if record else None
    I_out = np.empty((n_samples, n)) if record else None
    spike_steps: list[list[int]] = [[] for _ in range(n)]

    for k in range(n_steps):
        current += pending.pop(k)
        lo, hi = ext_bounds[k], ext_bounds[k + 1]
        if hi > lo:
            np.add.at(current, ext_target[lo:hi], ext_weight[lo:hi])
        offset = p_vv * offset + p_vi * current + bias_drive
        current = p_ii * current
        fired = np.flatnonzero(offset > thresh_offset)
        if fired.size:
            offset[fired] = reset_offset[fired]
            for i in fired:
                spike_steps[i].append(k)
            syn = table.outgoing(fired)
            if syn.size:
                pending.push(k, table.delay[syn], table.post[syn], table.weight[syn])
        if record and (k + 1) % stride == 0:
            row = (k + 1) // stride - 1
            V_out[row] = e_rest + offset
            I_out[row] = current

    t_ms = np.arange(1, n_samples + 1) * output_interval_ms
    spikes = [SpikeTrain((np.asarray(s, dtype=float) + 1) * step_ms) for s in spike_steps]
    return RefResult(t_ms=t_ms, V_mV=V_out, I_nA=I_out, spikes=spikes, step_ms=step_ms)


def ref_run(
    neuron: NeuronParams,
    stim: StimulusProgram,
    duration_ms: float,
    step_ms: float = 1.0,
    output_interval_ms: float = 1.0,
    v0_mV: float | None = None,
):
    """Single-neuron run. Returns (t_ms, V_mV, SpikeTrain)."""
    res = run_reference_network(
        NetworkGraph([neuron]),
        stim,
        duration_ms,
        step_ms=step_ms,
        output_interval_ms=output_interval_ms,
        v0_mV=v0_mV,
    )
    return res.t_ms, res.V_mV[:, 0], res.spikes[0]
