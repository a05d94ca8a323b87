"""Bit-exact fixed-point emulation of the discrete compartment update.

Per step, for each compartment:

    u' = sat32(floor(u * (4096 - decay_u) / 4096) + weighted_spike_sum)
    v' = sat32(floor(v * (4096 - decay_v) / 4096) + round(bias) + u')
    if v' > threshold: fire, v' = 0

Products are formed in 64 bits and shifted right by 12 (floor toward
negative infinity). Traces record the post-reset value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._synapses import DelayBuffer, SynapseTable
from .errors import CapacityError, ConfigError
from .network import LoihiNetwork, SpikeTrain
from .params import DECAY_BITS, DECAY_SCALE, LoihiParams

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1
COMPARTMENTS_PER_CORE = 1024


@dataclass(frozen=True)
class CompartmentState:
    v: int = 0
    u: int = 0


def sat32(x):
    if isinstance(x, np.ndarray):
        return np.clip(x, INT32_MIN, INT32_MAX)
    return min(max(int(x), INT32_MIN), INT32_MAX)


def mul_shift(x, m):
    """floor(x * m / 4096) with a 64-bit (or exact) intermediate."""
    if isinstance(x, np.ndarray):
        return (x.astype(np.int64) * np.int64(m)) >> DECAY_BITS
    return (int(x) * int(m)) >> DECAY_BITS


def threshold_level(theta: float) -> int:
    """Largest integer v that does not fire: v > theta  <=>  v > floor(theta)."""
    return math.floor(theta)


def loihi_step(state: CompartmentState, p: LoihiParams, weighted_spike_sum: int = 0):
    """One compartment update. Returns (new_state, fired)."""
    u = sat32(mul_shift(state.u, DECAY_SCALE - p.decay_u) + int(weighted_spike_sum))
    v = sat32(mul_shift(state.v, DECAY_SCALE - p.decay_v) + int(round(p.bias)) + u)
    fired = v > p.threshold
    if fired:
        v = 0
    return CompartmentState(v=v, u=u), fired


@dataclass(frozen=True)
class CoreLayout:
    n_cores: int
    core: np.ndarray
    slot: np.ndarray
    compartments_per_core: int = COMPARTMENTS_PER_CORE

    def assignment(self, neuron: int) -> tuple[int, int]:
        return int(self.core[neuron]), int(self.slot[neuron])

    def occupancy(self) -> np.ndarray:
        return np.bincount(self.core, minlength=self.n_cores)


def assign_cores(n_neurons: int, n_cores: int | None = None) -> CoreLayout:
    """Contiguous block assignment; ``n_cores=None`` uses the minimum that fits."""
    if n_neurons < 0:
        raise ConfigError("n_neurons must be >= 0")
    if n_cores is None:
        n_cores = max(1, -(-n_neurons // COMPARTMENTS_PER_CORE))
    if n_cores < 1:
        raise ConfigError(f"n_cores must be >= 1, got {n_cores}")
    capacity = n_cores * COMPARTMENTS_PER_CORE
    if n_neurons > capacity:
        raise CapacityError(
            f"{n_neurons} compartments exceed {n_cores} core(s) x {COMPARTMENTS_PER_CORE} = {capacity}"
        )
    idx = np.arange(n_neurons, dtype=np.int64)
    return CoreLayout(
        n_cores=n_cores, core=idx // COMPARTMENTS_PER_CORE, slot=idx % COMPARTMENTS_PER_CORE
    )


@dataclass
class LoihiResult:
    """Raw register traces (rows are steps, columns neurons) and spike trains in step indices.

    Row k holds the state after step k, i.e. at time (k + 1) * dt.
    """

    v: np.ndarray | None
    u: np.ndarray | None
    spikes: list[SpikeTrain]
    layout: CoreLayout

    @property
    def spike_count(self) -> int:
        return sum(len(s) for s in self.spikes)


def run_loihi(
    net: LoihiNetwork,
    steps: int,
    n_cores: int | None = None,
    v0=None,
    record: bool = True,
) -> LoihiResult:
    """Synchronous emulation of ``steps`` timesteps.

    Spikes fired in step k reach their targets' u register in step
    k + delay (delay >= 1). External events for step k are added in step k.
    """
    if steps < 0:
        raise ConfigError("steps must be >= 0")
    n = net.n_neurons
    layout = assign_cores(n, n_cores)

    keep_v = np.array([DECAY_SCALE - p.decay_v for p in net.params], dtype=np.int64)
    keep_u = np.array([DECAY_SCALE - p.decay_u for p in net.params], dtype=np.int64)
    theta = np.array([threshold_level(p.threshold) for p in net.params], dtype=np.int64)
    bias = np.rint(net.bias_levels).astype(np.int64)

    table = SynapseTable(n, net.pre, net.post, net.weight_levels, net.delay_steps)
    pending = DelayBuffer(n, table.max_delay, np.int64)
    ext_bounds = np.searchsorted(net.ext_step, np.arange(steps + 1))

    v = np.zeros(n, dtype=np.int64) if v0 is None else np.broadcast_to(
        np.asarray(v0, dtype=np.int64), (n,)
    ).copy()
    u = np.zeros(n, dtype=np.int64)

    v_out = np.empty((steps, n), dtype=np.int32) if record else None
    u_out = np.empty((steps, n), dtype=np.int32) if record else None
    spike_steps: list[list[int]] = [[] for _ in range(n)]

    for k in range(steps):
        inbound = pending.pop(k)
        lo, hi = ext_bounds[k], ext_bounds[k + 1]
        if hi > lo:
            np.add.at(inbound, net.ext_target[lo:hi], net.ext_levels[lo:hi])
        u = np.clip(((u * keep_u) >> DECAY_BITS) + inbound, INT32_MIN, INT32_MAX)
        v = np.clip(((v * keep_v) >> DECAY_BITS) + bias + u, INT32_MIN, INT32_MAX)
        fired = np.flatnonzero(v > theta)
        if fired.size:
            v[fired] = 0
            for i in fired:
                spike_steps[i].append(k)
            syn = table.outgoing(fired)
            if syn.size:
                pending.push(k, table.delay[syn], table.post[syn], table.weight[syn])
        if record:
            v_out[k] = v
            u_out[k] = u

    spikes = [SpikeTrain(np.asarray(s, dtype=float)) for s in spike_steps]
    return LoihiResult(v=v_out, u=u_out, spikes=spikes, layout=layout)
