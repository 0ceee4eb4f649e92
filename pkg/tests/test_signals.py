import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cifbdsm.errors import InvalidSpec, WindowTooShort
from cifbdsm.signals import (
    BH_COEFFS,
    SignalSpec,
    blackman_harris,
    generate,
    oversampling_ratio,
    sine,
    two_tone,
)


def test_sine_examples():
    x = sine(SignalSpec(8.0, (1 / 100,), 201))
    assert len(x) == 201
    assert x[24] == pytest.approx(8.0, abs=1e-14)
    xi = sine(SignalSpec(8.0, (1 / 100,), 201, integer_rounded=True))
    assert xi[12] == round(8 * math.sin(0.26 * math.pi)) == 6
    assert xi[12] == 6
    assert all(isinstance(v, int) for v in xi)


def test_two_tone_examples():
    x = two_tone(SignalSpec(2.0**16, (1 / 8, 1 / 10), 40))
    assert x[19] == pytest.approx(0.0, abs=1e-9)
    assert max(abs(v) for v in x) <= 2 * 2.0**16


@given(st.floats(0.1, 1e5), st.floats(0.001, 0.499), st.floats(0.001, 0.499), st.integers(1, 300))
def test_amplitude_bounds(A, f1, f2, N):
    assert max(abs(v) for v in sine(SignalSpec(A, (f1,), N))) <= A
    if f1 != f2:
        assert max(abs(v) for v in two_tone(SignalSpec(A, (f1, f2), N))) <= 2 * A
    xi = sine(SignalSpec(A, (f1,), N, integer_rounded=True))
    assert all(isinstance(v, int) and abs(v) <= round(A + 0.5) for v in xi)


@pytest.mark.parametrize("kwargs", [
    dict(amplitude=1.0, frequencies=(0.5,), length=4),
    dict(amplitude=1.0, frequencies=(0.0,), length=4),
    dict(amplitude=1.0, frequencies=(0.1,), length=0),
    dict(amplitude=1.0, frequencies=(0.1, 0.1), length=4),
    dict(amplitude=1.0, frequencies=(), length=4),
    dict(amplitude=1.0, frequencies=(0.1, 0.2, 0.3), length=4),
])
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidSpec):
        SignalSpec(**kwargs)


def test_wrong_generator():
    with pytest.raises(InvalidSpec):
        sine(SignalSpec(1.0, (0.1, 0.2), 4))
    with pytest.raises(InvalidSpec):
        two_tone(SignalSpec(1.0, (0.1,), 4))
    assert generate(SignalSpec(1.0, (0.1, 0.2), 4)) == two_tone(SignalSpec(1.0, (0.1, 0.2), 4))


def test_oversampling_ratio():
    assert oversampling_ratio(1 / 8) == 4.0
    assert oversampling_ratio(1 / 10) == 5.0


def test_window_values():
    a0, a1, a2, a3 = BH_COEFFS
    assert a0 - a1 + a2 - a3 == pytest.approx(6e-5, abs=1e-15)
    w = blackman_harris(101)
    assert w[0] == pytest.approx(6e-5, abs=1e-15)
    assert w[50] == pytest.approx(1.0, abs=1e-15)
    assert a0 + a1 + a2 + a3 == 1.0


@given(st.integers(4, 4096))
def test_window_shape(N):
    w = blackman_harris(N)
    assert np.allclose(w, w[::-1], rtol=0, atol=1e-15)
    assert np.all(w > 0) and np.all(w <= 1.0 + 1e-15)


def test_zero_end_variant():
    w = blackman_harris(1024, zero_ends=True)
    assert w[0] == w[-1] == 0.0
    assert np.all(w[1:-1] > 0)
    assert np.allclose(w, w[::-1], atol=1e-15)
    assert blackman_harris(1025, zero_ends=True)[512] == pytest.approx(1.0, abs=1e-15)


def test_window_too_short():
    with pytest.raises(WindowTooShort):
        blackman_harris(3)
