"""Seeded synthetic LIF parameter sets and their standard stimuli.

Ranges:
    membrane tau           5 .. 50 ms
    threshold - reset     10 .. 30 mV
    rest - reset           0 .. 5 mV
    capacitance         0.05 .. 0.25 nF  (R follows from tau)
    reset potential      -75 .. -65 mV
    synaptic tau           2 .. 20 ms

Bias-driven runs hold the asymptote E_L + R*I at 30-90 % of the way from
rest to threshold. Spike-driven runs get a 100 Hz Poisson train whose mean
depolarization sits at 20-60 % of that distance, so fluctuations
occasionally reach threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import ExternalInput, StimulusProgram, generate_poisson_stimulus
from .params import NeuronParams

SUITE_SEED = 20210
SUITE_SIZE = 50
POISSON_RATE_HZ = 100.0

RANGES = {
    "tau_m_ms": (5.0, 50.0),
    "thresh_gap_mV": (10.0, 30.0),
    "rest_gap_mV": (0.0, 5.0),
    "capacitance_nF": (0.05, 0.25),
    "v_reset_mV": (-75.0, -65.0),
    "tau_syn_ms": (2.0, 20.0),
}


@dataclass(frozen=True)
class SuiteMember:
    index: int
    neuron: NeuronParams
    bias_fraction: float
    spike_fraction: float
    stimulus_seed: int

    def bias_stimulus(self) -> StimulusProgram:
        n = self.neuron
        drive_mV = self.bias_fraction * (n.v_thresh_mV - n.e_rest_mV)
        return StimulusProgram(bias_nA=np.array([drive_mV / n.resistance_MOhm]))

    def spike_stimulus(self, duration_ms: float = 500.0) -> StimulusProgram:
        n = self.neuron
        train = generate_poisson_stimulus(POISSON_RATE_HZ, duration_ms, self.stimulus_seed)
        # mean current = rate * weight * tau_syn; mean depolarization = R * that
        mean_mV = self.spike_fraction * (n.v_thresh_mV - n.e_rest_mV)
        weight = mean_mV / (n.resistance_MOhm * POISSON_RATE_HZ / 1000.0 * n.tau_syn_ms)
        return StimulusProgram(bias_nA=np.zeros(1), external=[ExternalInput(0, train, weight)])


def sample_neuron(rng: np.random.Generator, ranges=RANGES) -> NeuronParams:
    u = lambda key: float(rng.uniform(*ranges[key]))
    tau = u("tau_m_ms")
    gap = u("thresh_gap_mV")
    rest_gap = u("rest_gap_mV")
    cap = u("capacitance_nF")
    v_reset = u("v_reset_mV")
    tau_syn = u("tau_syn_ms")
    return NeuronParams(
        capacitance_nF=cap,
        resistance_MOhm=tau / cap,
        e_rest_mV=v_reset + rest_gap,
        v_reset_mV=v_reset,
        v_thresh_mV=v_reset + gap,
        tau_syn_ms=tau_syn,
    )


def synthetic_suite(size: int = SUITE_SIZE, seed: int = SUITE_SEED) -> list[SuiteMember]:
    rng = np.random.default_rng(seed)
    members = []
    for i in range(size):
        neuron = sample_neuron(rng)
        members.append(
            SuiteMember(
                index=i,
                neuron=neuron,
                bias_fraction=float(rng.uniform(0.3, 0.9)),
                spike_fraction=float(rng.uniform(0.2, 0.6)),
                stimulus_seed=int(rng.integers(2**31)),
            )
        )
    return members
