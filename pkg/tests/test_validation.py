import math

import numpy as np
import pytest

from lifmap.errors import ConfigError
from lifmap.metrics import pearson, rmse
from lifmap.network import ExternalInput, NetworkGraph, StimulusProgram, generate_poisson_stimulus
from lifmap.params import MappingConfig, NeuronParams
from lifmap.specfile import build_experiment, parse_spec
from lifmap.suite import RANGES, synthetic_suite
from lifmap.validation import (
    compare_network,
    compare_single_neuron,
    sweep_temporal,
    sweep_voltage,
)


def spiky(neuron, seed=5, w=0.01):
    train = generate_poisson_stimulus(100.0, 500.0, seed)
    return StimulusProgram(np.zeros(1), [ExternalInput(0, train, w)])


def test_zero_stimulus_is_exact(cfg):
    n = NeuronParams(0.1, 100.0, -70.0, -70.0, -50.0)
    rep = compare_single_neuron(n, cfg, StimulusProgram.empty(1), 200.0)
    assert rep.rmse == 0.0
    assert not rep.correlation_defined and math.isnan(rep.pearson_r)


def test_report_consistency(neuron, cfg):
    rep = compare_single_neuron(neuron, cfg, spiky(neuron), 500.0)
    s = rep.series
    assert rmse(s.V_ref, s.V_emu) == rep.rmse
    assert pearson(s.V_ref, s.V_emu) == rep.pearson_r
    assert rmse(s.V_ref[s.mask], s.V_emu[s.mask]) == rep.rmse_subthreshold
    assert rep.n_samples == 500


def test_pooled_equals_concatenation():
    spec = parse_spec(
        {
            "neurons": [{"count": 5, "sample": {}}],
            "connectivity": {"random": {"p": 0.3, "weight_nA": 0.005}},
            "stimulus": {"poisson": [{"targets": "all", "rate_Hz": 100.0, "weight_nA": 0.01}]},
            "run": {"duration_ms": 200.0, "seed": 3},
        }
    )
    graph, stim, cfg = build_experiment(spec)
    report = compare_network(graph, stim, cfg, 200.0)
    ref = np.concatenate([r.series.V_ref for r in report.per_neuron])
    emu = np.concatenate([r.series.V_emu for r in report.per_neuron])
    assert report.pooled.rmse == rmse(ref, emu)
    assert report.pooled.pearson_r == pearson(ref, emu)
    assert report.pooled.n_samples == 5 * 200


def test_calibrated_single_neuron_is_close(cfg):
    n = NeuronParams(0.1, 300.0, -68.0, -70.0, -50.0, tau_syn_ms=10.0)
    rep = compare_single_neuron(n, cfg, StimulusProgram(np.array([0.04])), 500.0)
    assert rep.pearson_r > 0.999
    assert rep.rmse_subthreshold < 0.05


def test_temporal_sweep_flags_unrepresentable():
    n = NeuronParams(0.05, 100.0, -65.0, -70.0, -50.0, tau_syn_ms=20.0)  # tau_v = 5 ms
    res = sweep_temporal(n, StimulusProgram(np.array([0.1])), 500.0)
    assert res.axis == [0.1, 1.0, 10.0]
    assert res.steps == [5000, 500, 50]
    assert res.representable == [True, True, False]
    assert math.isnan(res.rmse_v[2]) and "exceeds" in res.notes[2]
    assert all(np.isfinite(res.rmse_v[:2]))


def test_voltage_sweep_shape(neuron):
    res = sweep_voltage(neuron, spiky(neuron), 200.0)
    assert res.axis == [1e-3, 1e-4, 1e-5]
    assert res.steps == [200] * 3
    assert all(res.representable)


def test_voltage_sweep_rejects_sub_level_threshold(neuron):
    with pytest.raises(ConfigError):
        sweep_voltage(neuron, spiky(neuron), 100.0, scales=[100.0, 1.0])


def test_sweep_axis_must_be_monotone(neuron):
    with pytest.raises(ConfigError):
        sweep_voltage(neuron, spiky(neuron), 100.0, scales=[1e-3, 1e-5, 1e-4])


def test_sweep_parallel_matches_serial(neuron):
    stim = spiky(neuron)
    a = sweep_temporal(neuron, stim, 200.0, workers=1)
    b = sweep_temporal(neuron, stim, 200.0, workers=3)
    assert np.array_equal(a.rmse_v, b.rmse_v, equal_nan=True)
    assert np.array_equal(a.rmse_u, b.rmse_u, equal_nan=True)
    assert (a.representable, a.notes) == (b.representable, b.notes)


def test_suite_is_seeded_and_in_range():
    a, b = synthetic_suite(), synthetic_suite()
    assert len(a) == 50 and a == b
    for m in a:
        n = m.neuron
        assert RANGES["tau_m_ms"][0] <= n.tau_m_ms <= RANGES["tau_m_ms"][1] + 1e-9
        assert 10.0 <= n.v_thresh_mV - n.v_reset_mV <= 30.0
        assert 0.0 <= n.e_rest_mV - n.v_reset_mV <= 5.0
        drive = m.bias_stimulus().bias_nA[0] * n.resistance_MOhm
        assert n.e_rest_mV + drive < n.v_thresh_mV
