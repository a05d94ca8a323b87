"""Networks, stimuli, and their translation into emulator units."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, LifmapError, MappingError
from .params import (
    LoihiParams,
    MappingConfig,
    NeuronParams,
    derive_loihi_params,
)


@dataclass(frozen=True)
class SpikeTrain:
    """Sorted event times. Milliseconds on the physical side, steps on the emulator side."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        if times.size:
            if not np.all(np.isfinite(times)) or times[0] < 0:
                raise ConfigError("spike times must be finite and non-negative")
            if np.any(np.diff(times) <= 0):
                raise ConfigError("spike times must be strictly increasing")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        return isinstance(other, SpikeTrain) and np.array_equal(self.times, other.times)

    __hash__ = None


@dataclass(frozen=True)
class ExternalInput:
    """One external spike source feeding a single neuron."""

    target: int
    train: SpikeTrain
    weight_nA: float


@dataclass
class StimulusProgram:
    bias_nA: np.ndarray
    external: list[ExternalInput] = field(default_factory=list)

    @classmethod
    def empty(cls, n_neurons: int) -> StimulusProgram:
        return cls(bias_nA=np.zeros(n_neurons))

    def __post_init__(self):
        self.bias_nA = np.asarray(self.bias_nA, dtype=float).ravel()
        n = self.bias_nA.size
        for src in self.external:
            if not 0 <= src.target < n:
                raise ConfigError(f"external input target {src.target} out of range [0, {n})")


@dataclass
class NetworkGraph:
    """Physical network: per-neuron parameters plus synapse arrays.

    Synaptic weights are the instantaneous jump of the target's synaptic
    current in nA. Delays are in ms and become whole steps at run time.
    """

    neurons: list[NeuronParams]
    pre: np.ndarray = None
    post: np.ndarray = None
    weight_nA: np.ndarray = None
    delay_ms: np.ndarray = None
    seed: int | None = None

    def __post_init__(self):
        self.pre = np.asarray(self.pre if self.pre is not None else [], dtype=np.int64)
        self.post = np.asarray(self.post if self.post is not None else [], dtype=np.int64)
        self.weight_nA = np.asarray(
            self.weight_nA if self.weight_nA is not None else [], dtype=float
        )
        if self.delay_ms is None:
            self.delay_ms = np.ones(self.pre.size)
        self.delay_ms = np.asarray(self.delay_ms, dtype=float)
        sizes = {self.pre.size, self.post.size, self.weight_nA.size, self.delay_ms.size}
        if len(sizes) != 1:
            raise ConfigError("synapse arrays must have equal lengths")
        n = len(self.neurons)
        if self.pre.size:
            if self.pre.min() < 0 or self.pre.max() >= n or self.post.min() < 0 or self.post.max() >= n:
                raise ConfigError(f"synapse index out of range [0, {n})")
            if np.any(self.delay_ms <= 0) or not np.all(np.isfinite(self.delay_ms)):
                raise ConfigError("synaptic delays must be finite and > 0")

    @property
    def n_neurons(self) -> int:
        return len(self.neurons)

    @property
    def n_synapses(self) -> int:
        return int(self.pre.size)


@dataclass
class LoihiNetwork:
    """Emulator-side network: quantized parameters, integer weights, step delays."""

    params: list[LoihiParams]
    bias_levels: np.ndarray
    pre: np.ndarray
    post: np.ndarray
    weight_levels: np.ndarray
    delay_steps: np.ndarray
    ext_step: np.ndarray
    ext_target: np.ndarray
    ext_levels: np.ndarray
    warnings: list[str] = field(default_factory=list)

    @property
    def n_neurons(self) -> int:
        return len(self.params)


def delay_to_steps(delay_ms, step_ms):
    """Delay in ms to a whole number of steps, floored at one step."""
    steps = np.rint(np.asarray(delay_ms, dtype=float) / step_ms).astype(np.int64)
    return np.maximum(steps, 1)


def generate_poisson_stimulus(rate_Hz: float, duration_ms: float, seed) -> SpikeTrain:
    """Homogeneous Poisson train on [0, duration_ms).

    ``seed`` may be an int, a SeedSequence or a Generator.
    """
    if not (math.isfinite(rate_Hz) and rate_Hz >= 0):
        raise ConfigError(f"rate_Hz must be >= 0, got {rate_Hz!r}")
    if not duration_ms >= 0:
        raise ConfigError(f"duration_ms must be >= 0, got {duration_ms!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    count = rng.poisson(rate_Hz * duration_ms / 1000.0)
    times = np.unique(rng.uniform(0.0, duration_ms, size=count))
    return SpikeTrain(times)


def random_connectivity(n: int, p: float, rng: np.random.Generator, allow_self: bool = False):
    """Erdos-Renyi edge list as (pre, post) arrays, sorted by pre then post."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"connection probability must be in [0, 1], got {p!r}")
    pool = n if allow_self else n - 1
    counts = rng.binomial(pool, p, size=n) if pool > 0 else np.zeros(n, dtype=np.int64)
    pre_parts, post_parts = [], []
    for i, k in enumerate(counts):
        if k == 0:
            continue
        targets = np.sort(rng.choice(pool, size=k, replace=False))
        if not allow_self:
            targets = targets + (targets >= i)
        pre_parts.append(np.full(k, i, dtype=np.int64))
        post_parts.append(targets.astype(np.int64))
    if not pre_parts:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(pre_parts), np.concatenate(post_parts)


def translate_network(
    graph: NetworkGraph,
    cfg: MappingConfig,
    stim: StimulusProgram | None = None,
) -> LoihiNetwork:
    """Map every neuron, weight, delay and stimulus event into emulator units.

    Weights that round to zero levels are kept (as zero) and listed in
    ``warnings``.
    """
    params = []
    for i, neuron in enumerate(graph.neurons):
        try:
            params.append(derive_loihi_params(neuron, cfg))
        except LifmapError as exc:
            exc.args = (f"neuron {i}: {exc.args[0] if exc.args else exc}",)
            exc.neuron_index = i
            raise
    warnings: list[str] = []
    wscale = np.array([p.weight_scale for p in params])

    raw = graph.weight_nA * wscale[graph.post] if graph.n_synapses else np.zeros(0)
    weight_levels = np.rint(raw).astype(np.int64)
    for k in np.flatnonzero((weight_levels == 0) & (graph.weight_nA != 0)):
        warnings.append(
            f"synapse {k} ({graph.pre[k]}->{graph.post[k]}, {graph.weight_nA[k]:g} nA) "
            "rounds to 0 levels"
        )

    if stim is None:
        stim = StimulusProgram.empty(graph.n_neurons)
    if stim.bias_nA.size != graph.n_neurons:
        raise MappingError(
            f"stimulus bias has {stim.bias_nA.size} entries for {graph.n_neurons} neurons"
        )
    bias_levels = np.array([p.bias for p in params]) + stim.bias_nA * wscale

    steps, targets, levels = [], [], []
    for j, src in enumerate(stim.external):
        w = int(np.rint(src.weight_nA * wscale[src.target]))
        if w == 0 and src.weight_nA != 0:
            warnings.append(
                f"external input {j} -> neuron {src.target} ({src.weight_nA:g} nA) rounds to 0 levels"
            )
        s = np.floor(src.train.times / cfg.dt_ms).astype(np.int64)
        steps.append(s)
        targets.append(np.full(s.size, src.target, dtype=np.int64))
        levels.append(np.full(s.size, w, dtype=np.int64))
    ext_step, ext_target, ext_levels = _sorted_events(steps, targets, levels)

    return LoihiNetwork(
        params=params,
        bias_levels=bias_levels,
        pre=graph.pre.copy(),
        post=graph.post.copy(),
        weight_levels=weight_levels,
        delay_steps=delay_to_steps(graph.delay_ms, cfg.dt_ms),
        ext_step=ext_step,
        ext_target=ext_target,
        ext_levels=ext_levels,
        warnings=warnings,
    )


def external_events(stim: StimulusProgram, step_ms: float):
    """Physical external input as (step, target, weight_nA) arrays, sorted by step."""
    steps, targets, weights = [], [], []
    for src in stim.external:
        s = np.floor(src.train.times / step_ms).astype(np.int64)
        steps.append(s)
        targets.append(np.full(s.size, src.target, dtype=np.int64))
        weights.append(np.full(s.size, src.weight_nA, dtype=float))
    return _sorted_events(steps, targets, weights)


def _sorted_events(steps, targets, values):
    if not steps:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    step = np.concatenate(steps)
    target = np.concatenate(targets)
    value = np.concatenate(values)
    order = np.argsort(step, kind="stable")
    return step[order], target[order], value[order]
