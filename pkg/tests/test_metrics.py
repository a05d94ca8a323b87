import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from lifmap.errors import LengthMismatchError, UndefinedCorrelationError
from lifmap.metrics import density, match_spikes, pearson, rmse

series = arrays(float, st.integers(3, 60), elements=st.floats(-100, 100))


def test_rmse_examples():
    a = np.array([1.0, -2.0, 3.5])
    assert rmse(a, a) == 0.0
    assert rmse(a, a + 0.25) == pytest.approx(0.25, abs=1e-15)
    assert rmse([0, 0], [3, 4]) == pytest.approx(math.sqrt(12.5), abs=1e-12)
    assert rmse([0, 0], [3, 4]) == pytest.approx(3.5355, abs=1e-4)


def test_pearson_examples():
    a = np.array([1.0, 4.0, 2.0, 8.0])
    assert pearson(a, a) == pytest.approx(1.0, abs=1e-15)
    assert pearson(a, -a) == pytest.approx(-1.0, abs=1e-15)
    assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.981, abs=1e-3)
    # independent oracle: textbook formula with statistics module arithmetic
    x, y = [1, 2, 3], [1, 2, 4]
    mx, my = sum(x) / 3, sum(y) / 3
    num = sum((p - mx) * (q - my) for p, q in zip(x, y))
    den = math.sqrt(sum((p - mx) ** 2 for p in x) * sum((q - my) ** 2 for q in y))
    assert pearson(x, y) == pytest.approx(num / den, abs=1e-15)


def test_pearson_constant_raises():
    with pytest.raises(UndefinedCorrelationError):
        pearson([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(UndefinedCorrelationError):
        pearson(np.full(10, -65.0), np.full(10, -65.0))


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        rmse([1, 2], [1, 2, 3])


@given(series, st.data())
def test_symmetry(a, data):
    b = data.draw(arrays(float, a.size, elements=st.floats(-100, 100)))
    assert rmse(a, b) == rmse(b, a)
    try:
        r = pearson(a, b)
    except UndefinedCorrelationError:
        return
    assert r == pytest.approx(pearson(b, a), abs=1e-15)


@given(series, st.data(), st.floats(0.1, 10.0), st.floats(-100.0, 100.0))
def test_affine_invariance(a, data, scale, shift):
    b = data.draw(arrays(float, a.size, elements=st.floats(-100, 100)))
    assume(np.ptp(a) > 1e-3 and np.ptp(b) > 1e-3)
    assert pearson(a, b) == pytest.approx(pearson(scale * a + shift, b), abs=1e-12)
    assert pearson(a, b) == pytest.approx(pearson(a, scale * b + shift), abs=1e-12)


def test_density_shared_edges():
    edges, ca, cb = density(np.linspace(0, 1, 50), np.linspace(0.5, 2, 50))
    assert edges[0] == 0.0 and edges[-1] == 2.0 and edges.size == 101
    assert ca.sum() == 50 and cb.sum() == 50


def test_match_spikes():
    assert match_spikes([10, 20, 30], [11, 20, 29]).tolist() == [1, 0, -1]
    # extra emulator spike at the front is skipped
    assert match_spikes([10, 20], [2, 10, 21]).tolist() == [0, 1]
    assert match_spikes([], [1.0]).size == 0
