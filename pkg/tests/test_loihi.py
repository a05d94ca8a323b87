import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import raw_params
from lifmap.errors import CapacityError
from lifmap.loihi import (
    COMPARTMENTS_PER_CORE,
    INT32_MAX,
    INT32_MIN,
    CompartmentState,
    assign_cores,
    loihi_step,
    mul_shift,
    run_loihi,
)
from lifmap.network import LoihiNetwork

int32 = st.integers(INT32_MIN, INT32_MAX)
mantissa = st.integers(0, 4096)


def network(params, pre=(), post=(), w=(), d=(), ext=()):
    ext = sorted(ext)
    return LoihiNetwork(
        params=list(params),
        bias_levels=np.array([p.bias for p in params], dtype=float),
        pre=np.asarray(pre, np.int64),
        post=np.asarray(post, np.int64),
        weight_levels=np.asarray(w, np.int64),
        delay_steps=np.asarray(d, np.int64),
        ext_step=np.array([e[0] for e in ext], np.int64),
        ext_target=np.array([e[1] for e in ext], np.int64),
        ext_levels=np.array([e[2] for e in ext], np.int64),
    )


def test_quiescent():
    s, fired = loihi_step(CompartmentState(0, 0), raw_params(decay_v=100, decay_u=100))
    assert (s.v, s.u, fired) == (0, 0, False)


def test_full_decay():
    s, _ = loihi_step(CompartmentState(1000, 0), raw_params(decay_v=4096))
    assert s.v == 0


def test_pinned_multiply_shift():
    s, fired = loihi_step(CompartmentState(4096, 0), raw_params(decay_v=410))
    assert s.v == 3686 == (4096 * 3686) >> 12
    assert not fired


def test_floor_toward_negative_infinity():
    assert mul_shift(-1, 4095) == -1
    assert mul_shift(-4097, 2048) == -2049
    assert mul_shift(np.array([-1, 1, -4097]), 2048).tolist() == [-1, 0, -2049]


def test_pure_integrator():
    state = CompartmentState(0, 0)
    p = raw_params(decay_v=0, decay_u=4096)
    for k in range(1, 21):
        state, _ = loihi_step(state, p, 5)
        assert state.u == 5 and state.v == 5 * k


def test_bias_is_rounded_at_injection():
    s, _ = loihi_step(CompartmentState(0, 0), raw_params(decay_v=0, bias=2.6))
    assert s.v == 3


def test_fire_and_reset_strict():
    p = raw_params(decay_v=0, threshold=10.0)
    s, fired = loihi_step(CompartmentState(10, 0), p, 0)
    assert not fired and s.v == 10
    s, fired = loihi_step(CompartmentState(10, 0), p, 1)
    assert fired and s.v == 0


def test_saturation():
    p = raw_params(decay_v=0, decay_u=0)
    s, _ = loihi_step(CompartmentState(INT32_MAX - 5, INT32_MAX - 5), p, 100)
    assert s.u == INT32_MAX and s.v == INT32_MAX
    s, _ = loihi_step(CompartmentState(INT32_MIN + 5, INT32_MIN + 5), p, -100)
    assert s.u == INT32_MIN and s.v == INT32_MIN


@given(int32, mantissa)
def test_decay_bound(v, decay_v):
    s, _ = loihi_step(CompartmentState(v, 0), raw_params(decay_v=decay_v, threshold=float(INT32_MAX)))
    assert abs(s.v) <= abs(v)


@given(int32, int32, st.integers(-(2**40), 2**40), mantissa, mantissa)
def test_never_wraps(v, u, inp, dv, du):
    s, _ = loihi_step(CompartmentState(v, u), raw_params(dv, du, threshold=float(INT32_MAX)), inp)
    assert INT32_MIN <= s.u <= INT32_MAX and INT32_MIN <= s.v <= INT32_MAX
    if inp > 0 and u >= 0:
        assert s.u >= 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50_000, 50_000), min_size=1, max_size=200))
def test_integrator_matches_bigint_sum(inputs):
    n = len(inputs)
    net = network([raw_params(0, 4096)], ext=[(k, 0, x) for k, x in enumerate(inputs)])
    res = run_loihi(net, n)
    total, expected = 0, []
    for x in inputs:
        total += x
        expected.append(total)
    assert res.v[:, 0].tolist() == expected


def test_run_matches_scalar_step(rng):
    p = raw_params(decay_v=300, decay_u=900, bias=7.4, threshold=5000.0)
    inputs = rng.integers(-20, 200, 300)
    net = network([p], ext=[(k, 0, int(x)) for k, x in enumerate(inputs)])
    res = run_loihi(net, 300)
    state = CompartmentState()
    fired_steps = []
    for k, x in enumerate(inputs):
        state, fired = loihi_step(state, p, int(x))
        assert (res.v[k, 0], res.u[k, 0]) == (state.v, state.u)
        if fired:
            fired_steps.append(k)
    assert res.spikes[0].times.tolist() == fired_steps
    assert np.all(res.v[:, 0] <= 5000)


def test_one_step_delay():
    a = raw_params(decay_v=4096, decay_u=4096, threshold=100.0)
    b = raw_params(decay_v=4096, decay_u=100)
    net = network([a, b], pre=[0], post=[1], w=[7], d=[1], ext=[(10, 0, 1000)])
    res = run_loihi(net, 20)
    assert res.spikes[0].times.tolist() == [10.0]
    assert np.flatnonzero(res.u[:, 1])[0] == 11
    assert res.u[11, 1] == 7


def test_longer_delay():
    a = raw_params(decay_v=4096, decay_u=4096, threshold=100.0)
    b = raw_params(decay_v=4096, decay_u=4096)
    net = network([a, b], pre=[0], post=[1], w=[7], d=[4], ext=[(3, 0, 1000)])
    res = run_loihi(net, 12)
    assert np.flatnonzero(res.u[:, 1]).tolist() == [7]


def test_determinism(rng):
    params = [raw_params(200, 500, bias=3.0, threshold=400.0) for _ in range(30)]
    pre = rng.integers(0, 30, 120)
    post = rng.integers(0, 30, 120)
    ext = [(int(k), int(t), 50) for k, t in zip(rng.integers(0, 200, 400), rng.integers(0, 30, 400))]
    net = network(params, pre, post, rng.integers(-30, 60, 120), rng.integers(1, 4, 120), ext)
    a, b = run_loihi(net, 200), run_loihi(net, 200)
    assert a.v.tobytes() == b.v.tobytes() and a.u.tobytes() == b.u.tobytes()
    assert all(x == y for x, y in zip(a.spikes, b.spikes))


def test_assign_cores_cases():
    lay = assign_cores(1024, 1)
    assert np.all(lay.core == 0) and lay.slot[-1] == 1023
    lay = assign_cores(1025, 2)
    assert lay.assignment(1023) == (0, 1023)
    assert lay.assignment(1024) == (1, 0)
    lay = assign_cores(10_000, 10)
    assert lay.n_cores == 10
    assert lay.occupancy().max() <= COMPARTMENTS_PER_CORE
    assert lay.occupancy().sum() == 10_000
    assert assign_cores(10_000).n_cores == 10


def test_capacity_exceeded():
    with pytest.raises(CapacityError):
        assign_cores(1025, 1)
    with pytest.raises(CapacityError):
        run_loihi(network([raw_params()] * 1025), 1, n_cores=1)


@pytest.mark.slow
def test_ten_thousand_neurons_500_steps():
    params = [raw_params(300, 800, bias=160.0, threshold=2000.0)] * 10_000
    rng = np.random.default_rng(0)
    pre = rng.integers(0, 10_000, 100_000)
    post = rng.integers(0, 10_000, 100_000)
    net = network(params, pre, post, np.full(100_000, 20), np.ones(100_000))
    start = time.process_time()
    res = run_loihi(net, 500, record=False)
    elapsed = time.process_time() - start
    print(f"10k x 500 emulator run: {elapsed:.2f} s CPU, {res.spike_count} spikes")
    assert res.spike_count > 10_000
    assert res.layout.n_cores == 10
    assert res.layout.occupancy().max() <= COMPARTMENTS_PER_CORE
