"""Physical LIF parameters, quantized compartment parameters, and the maps between them.

Unit conventions on the physical side: nF, MOhm, mV, ms, nA. These are
mutually consistent (MOhm * nF = ms, MOhm * nA = mV, nA / nF = mV/ms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, DecayRangeError

DECAY_BITS = 12
DECAY_SCALE = 1 << DECAY_BITS  # 4096
DEFAULT_TAU_SYN_MS = 2.0


@dataclass(frozen=True)
class NeuronParams:
    capacitance_nF: float
    resistance_MOhm: float
    e_rest_mV: float
    v_reset_mV: float
    v_thresh_mV: float
    tau_syn_ms: float = DEFAULT_TAU_SYN_MS

    def __post_init__(self):
        for name in ("capacitance_nF", "resistance_MOhm", "tau_syn_ms"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("e_rest_mV", "v_reset_mV", "v_thresh_mV"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not self.v_thresh_mV > self.v_reset_mV:
            raise ConfigError(
                f"v_thresh_mV ({self.v_thresh_mV}) must exceed v_reset_mV ({self.v_reset_mV})"
            )
        if not (math.isfinite(self.tau_m_ms) and self.tau_m_ms > 0):
            raise ConfigError("membrane time constant R*C must be finite and > 0")

    @property
    def tau_m_ms(self) -> float:
        return self.resistance_MOhm * self.capacitance_nF

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MappingConfig:
    """Discretization choices: ms per emulator step and mV per state level."""

    dt_ms: float = 1.0
    v_scale_mV: float = 1e-4

    def __post_init__(self):
        if not (math.isfinite(self.dt_ms) and self.dt_ms > 0):
            raise ConfigError(f"dt_ms must be finite and > 0, got {self.dt_ms!r}")
        if not (math.isfinite(self.v_scale_mV) and self.v_scale_mV > 0):
            raise ConfigError(f"v_scale_mV must be finite and > 0, got {self.v_scale_mV!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LoihiParams:
    """Unit-less compartment parameters.

    ``bias`` and ``weight_scale`` stay real-valued; the fixed-point engine
    rounds them to whole state levels when it injects them.
    """

    decay_v: int
    decay_u: int
    bias: float
    threshold: float
    weight_scale: float
    source_dt_ms: float
    source_v_scale_mV: float

    def to_dict(self) -> dict:
        return asdict(self)


def forward_transform(v_mV, v_reset_mV, v_scale_mV):
    """Physical potential (mV) to state levels. Works on scalars and arrays."""
    if not np.all(np.asarray(v_scale_mV) > 0):
        raise ConfigError(f"v_scale_mV must be > 0, got {v_scale_mV!r}")
    return (v_mV - v_reset_mV) / v_scale_mV


def inverse_transform(levels, v_reset_mV, v_scale_mV):
    """State levels back to mV."""
    return levels * v_scale_mV + v_reset_mV


def quantize_decay(raw: float) -> int:
    """Round a raw decay value to a 12-bit mantissa (round half to even)."""
    if not (math.isfinite(raw) and 0.0 <= raw <= DECAY_SCALE):
        raise DecayRangeError(f"decay {raw!r} outside [0, {DECAY_SCALE}]")
    return int(round(raw))


def derive_loihi_params(neuron: NeuronParams, cfg: MappingConfig) -> LoihiParams:
    dt, vs = cfg.dt_ms, cfg.v_scale_mV
    tau_v = neuron.tau_m_ms
    if dt > tau_v:
        raise DecayRangeError(
            f"dt={dt} ms exceeds membrane tau={tau_v:g} ms; decay_v would exceed {DECAY_SCALE}"
        )
    if dt > neuron.tau_syn_ms:
        raise DecayRangeError(
            f"dt={dt} ms exceeds synaptic tau={neuron.tau_syn_ms:g} ms; "
            f"decay_u would exceed {DECAY_SCALE}"
        )
    decay_v = quantize_decay(dt / tau_v * DECAY_SCALE)
    decay_u = quantize_decay(dt / neuron.tau_syn_ms * DECAY_SCALE)
    threshold = forward_transform(neuron.v_thresh_mV, neuron.v_reset_mV, vs)
    if threshold < 1.0:
        raise ConfigError(
            f"v_scale_mV={vs:g} leaves the threshold below one state level ({threshold:g})"
        )
    bias = dt * (neuron.e_rest_mV - neuron.v_reset_mV) / (tau_v * vs)
    weight_scale = dt / (neuron.capacitance_nF * vs)
    return LoihiParams(
        decay_v=decay_v,
        decay_u=decay_u,
        bias=bias,
        threshold=threshold,
        weight_scale=weight_scale,
        source_dt_ms=dt,
        source_v_scale_mV=vs,
    )


def current_to_levels(current_nA, neuron: NeuronParams, cfg: MappingConfig):
    """Per-step state-level increment produced by a current (nA)."""
    return current_nA * cfg.dt_ms / (neuron.capacitance_nF * cfg.v_scale_mV)


def levels_to_current(levels, neuron: NeuronParams, cfg: MappingConfig):
    """Inverse of :func:`current_to_levels`; maps the u register back to nA."""
    return levels * neuron.capacitance_nF * cfg.v_scale_mV / cfg.dt_ms
