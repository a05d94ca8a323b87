import json
from pathlib import Path

import numpy as np
import pytest

from lifmap.params import LoihiParams, MappingConfig, NeuronParams

SPECS = Path(__file__).resolve().parent.parent / "specs"


@pytest.fixture
def neuron():
    return NeuronParams(
        capacitance_nF=0.1,
        resistance_MOhm=100.0,
        e_rest_mV=-65.0,
        v_reset_mV=-70.0,
        v_thresh_mV=-50.0,
        tau_syn_ms=5.0,
    )


@pytest.fixture
def cfg():
    return MappingConfig(dt_ms=1.0, v_scale_mV=1e-4)


def raw_params(decay_v=0, decay_u=4096, bias=0.0, threshold=1e12):
    """Hand-built compartment parameters for pinned-vector tests."""
    return LoihiParams(
        decay_v=decay_v,
        decay_u=decay_u,
        bias=bias,
        threshold=threshold,
        weight_scale=1.0,
        source_dt_ms=1.0,
        source_v_scale_mV=1.0,
    )


def write_spec(path, data):
    path.write_text(json.dumps(data))
    return path


def single_spec(**neuron_overrides):
    neuron = {
        "count": 1,
        "capacitance_nF": 0.1,
        "resistance_MOhm": 300.0,
        "e_rest_mV": -68.0,
        "v_reset_mV": -70.0,
        "v_thresh_mV": -50.0,
        "tau_syn_ms": 10.0,
    }
    neuron.update(neuron_overrides)
    return {
        "neurons": [neuron],
        "stimulus": {"bias_nA": 0.04},
        "mapping": {"dt_ms": 1.0, "v_scale_mV": 1e-4},
        "run": {"duration_ms": 100.0, "seed": 1},
    }


def tree_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(Path(root).iterdir()) if p.is_file()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
