"""NetworkSpec: the JSON experiment description, and its expansion into model objects.

Unknown keys are rejected. Every unit is spelled out in the field name.
All randomness derives from ``run.seed`` through a fixed SeedSequence split.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .network import (
    ExternalInput,
    NetworkGraph,
    SpikeTrain,
    StimulusProgram,
    generate_poisson_stimulus,
    random_connectivity,
)
from .params import DEFAULT_TAU_SYN_MS, MappingConfig, NeuronParams
from .suite import RANGES, sample_neuron

SPEC_VERSION = "lifmap-network/1"
_NEURON_FIELDS = ("capacitance_nF", "resistance_MOhm", "e_rest_mV", "v_reset_mV", "v_thresh_mV")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


Range = tuple[float, float]


class SampleRanges(_Strict):
    tau_m_ms: Range = RANGES["tau_m_ms"]
    thresh_gap_mV: Range = RANGES["thresh_gap_mV"]
    rest_gap_mV: Range = RANGES["rest_gap_mV"]
    capacitance_nF: Range = RANGES["capacitance_nF"]
    v_reset_mV: Range = RANGES["v_reset_mV"]
    tau_syn_ms: Range = RANGES["tau_syn_ms"]


class NeuronGroup(_Strict):
    """``count`` identical neurons, or ``count`` neurons drawn from ``sample`` ranges."""

    count: int = Field(1, ge=1)
    capacitance_nF: Optional[float] = None
    resistance_MOhm: Optional[float] = None
    e_rest_mV: Optional[float] = None
    v_reset_mV: Optional[float] = None
    v_thresh_mV: Optional[float] = None
    tau_syn_ms: Optional[float] = None
    sample: Optional[SampleRanges] = None

    @model_validator(mode="after")
    def _explicit_or_sampled(self):
        given = [f for f in _NEURON_FIELDS if getattr(self, f) is not None]
        if self.sample is not None:
            if given or self.tau_syn_ms is not None:
                raise ValueError("give either 'sample' or explicit parameters, not both")
        elif len(given) != len(_NEURON_FIELDS):
            missing = sorted(set(_NEURON_FIELDS) - set(given))
            raise ValueError(f"missing neuron parameters: {', '.join(missing)}")
        return self


class SynapseEntry(_Strict):
    pre: int = Field(ge=0)
    post: int = Field(ge=0)
    weight_nA: float
    delay_ms: float = Field(1.0, gt=0)


class RandomConnectivity(_Strict):
    p: float = Field(ge=0, le=1)
    weight_nA: float
    delay_ms: float = Field(1.0, gt=0)
    allow_self: bool = False


class Connectivity(_Strict):
    synapses: list[SynapseEntry] = []
    random: Optional[RandomConnectivity] = None


class SpikeTrainEntry(_Strict):
    target: int = Field(ge=0)
    times_ms: list[float]
    weight_nA: float


class PoissonEntry(_Strict):
    targets: Union[Literal["all"], list[int]] = "all"
    rate_Hz: float = Field(ge=0)
    weight_nA: float


class Stimulus(_Strict):
    bias_nA: Union[float, list[float]] = 0.0
    spike_trains: list[SpikeTrainEntry] = []
    poisson: list[PoissonEntry] = []


class Mapping(_Strict):
    dt_ms: float = Field(1.0, gt=0)
    v_scale_mV: float = Field(1e-4, gt=0)
    n_cores: Optional[int] = Field(None, ge=1)


class Run(_Strict):
    duration_ms: float = Field(500.0, gt=0)
    output_interval_ms: Optional[float] = Field(None, gt=0)
    ref_step_ms: Optional[float] = Field(None, gt=0)
    seed: int = Field(0, ge=0)
    exclude_spike_samples: bool = True


class NetworkSpec(_Strict):
    version: Literal["lifmap-network/1"] = SPEC_VERSION
    neurons: list[NeuronGroup] = Field(min_length=1)
    connectivity: Connectivity = Connectivity()
    stimulus: Stimulus = Stimulus()
    mapping: Mapping = Mapping()
    run: Run = Run()

    @property
    def n_neurons(self) -> int:
        return sum(g.count for g in self.neurons)

    @property
    def dt_ms(self) -> float:
        return self.mapping.dt_ms

    @property
    def output_interval_ms(self) -> float:
        return self.run.output_interval_ms or self.mapping.dt_ms

    @property
    def ref_step_ms(self) -> float:
        return self.run.ref_step_ms or self.mapping.dt_ms

    def mapping_config(self) -> MappingConfig:
        return MappingConfig(dt_ms=self.mapping.dt_ms, v_scale_mV=self.mapping.v_scale_mV)

    def resolved(self) -> dict:
        """Plain dict with every default filled in."""
        return self.model_dump(mode="json")


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_spec(data: dict) -> NetworkSpec:
    """Validate a spec dict. A run manifest (which embeds its spec) is accepted too."""
    if isinstance(data, dict) and "spec" in data and "tool" in data:
        data = data["spec"]
    try:
        spec = NetworkSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid network spec: {_format_errors(exc)}") from None
    _check_indices(spec)
    return spec


def load_spec(path) -> NetworkSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read spec {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_spec(data)


def _check_indices(spec: NetworkSpec):
    n = spec.n_neurons
    for k, syn in enumerate(spec.connectivity.synapses):
        for side in ("pre", "post"):
            if getattr(syn, side) >= n:
                raise ConfigError(f"connectivity.synapses.{k}.{side}: index out of range [0, {n})")
    for k, tr in enumerate(spec.stimulus.spike_trains):
        if tr.target >= n:
            raise ConfigError(f"stimulus.spike_trains.{k}.target: index out of range [0, {n})")
    for k, po in enumerate(spec.stimulus.poisson):
        if po.targets != "all" and any(t < 0 or t >= n for t in po.targets):
            raise ConfigError(f"stimulus.poisson.{k}.targets: index out of range [0, {n})")
    if isinstance(spec.stimulus.bias_nA, list) and len(spec.stimulus.bias_nA) != n:
        raise ConfigError(
            f"stimulus.bias_nA: expected {n} entries, got {len(spec.stimulus.bias_nA)}"
        )


def _seeds(seed: int):
    params, conn, stim = np.random.SeedSequence(seed).spawn(3)
    return params, conn, stim


def build_network(spec: NetworkSpec) -> NetworkGraph:
    params_seq, conn_seq, _ = _seeds(spec.run.seed)
    rng = np.random.default_rng(params_seq)
    neurons: list[NeuronParams] = []
    for g in spec.neurons:
        if g.sample is not None:
            ranges = g.sample.model_dump()
            neurons.extend(sample_neuron(rng, ranges) for _ in range(g.count))
        else:
            neuron = NeuronParams(
                capacitance_nF=g.capacitance_nF,
                resistance_MOhm=g.resistance_MOhm,
                e_rest_mV=g.e_rest_mV,
                v_reset_mV=g.v_reset_mV,
                v_thresh_mV=g.v_thresh_mV,
                tau_syn_ms=g.tau_syn_ms if g.tau_syn_ms is not None else DEFAULT_TAU_SYN_MS,
            )
            neurons.extend([neuron] * g.count)

    conn = spec.connectivity
    pre = [s.pre for s in conn.synapses]
    post = [s.post for s in conn.synapses]
    weight = [s.weight_nA for s in conn.synapses]
    delay = [s.delay_ms for s in conn.synapses]
    if conn.random is not None:
        rpre, rpost = random_connectivity(
            len(neurons), conn.random.p, np.random.default_rng(conn_seq), conn.random.allow_self
        )
        pre = np.concatenate([pre, rpre]).astype(np.int64)
        post = np.concatenate([post, rpost]).astype(np.int64)
        weight = np.concatenate([weight, np.full(rpre.size, conn.random.weight_nA)])
        delay = np.concatenate([delay, np.full(rpre.size, conn.random.delay_ms)])
    return NetworkGraph(neurons, pre, post, weight, delay, seed=spec.run.seed)


def build_stimulus(spec: NetworkSpec) -> StimulusProgram:
    n = spec.n_neurons
    _, _, stim_seq = _seeds(spec.run.seed)
    bias = spec.stimulus.bias_nA
    bias = np.full(n, float(bias)) if not isinstance(bias, list) else np.asarray(bias, float)
    external = [
        ExternalInput(tr.target, SpikeTrain(tr.times_ms), tr.weight_nA)
        for tr in spec.stimulus.spike_trains
    ]
    for entry, seq in zip(spec.stimulus.poisson, stim_seq.spawn(len(spec.stimulus.poisson))):
        targets = range(n) if entry.targets == "all" else entry.targets
        rng = np.random.default_rng(seq)
        for t in targets:
            train = generate_poisson_stimulus(entry.rate_Hz, spec.run.duration_ms, rng)
            external.append(ExternalInput(int(t), train, entry.weight_nA))
    return StimulusProgram(bias_nA=bias, external=external)


def build_experiment(spec: NetworkSpec):
    """(NetworkGraph, StimulusProgram, MappingConfig) for a validated spec."""
    return build_network(spec), build_stimulus(spec), spec.mapping_config()
