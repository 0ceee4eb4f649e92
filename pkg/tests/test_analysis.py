import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cifbdsm.analysis import (
    Spectrum,
    bibo_verdict,
    fft,
    find_stability_boundary,
    fit_noise_slope,
    power_spectrum,
)
from cifbdsm.errors import InsufficientBins, LengthMismatch, NotPowerOfTwo
from cifbdsm.experiments import IRRATIONAL_TONE
from cifbdsm.modulator import ModulatorConfig, SimulationTrace, Status, run
from cifbdsm.signals import SignalSpec, blackman_harris, sine

FIG8 = SignalSpec(8.0, (0.01,), 201)


def direct_dft(x):
    N = len(x)
    return [sum(x[n] * cmath.exp(-2j * math.pi * k * n / N) for n in range(N)) for k in range(N)]


@pytest.mark.parametrize("N", [1, 2, 8, 64, 256])
def test_fft_matches_direct_sum(N):
    rng = random.Random(N)
    x = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(N)]
    ref = np.array(direct_dft(x))
    got = fft(x)
    assert np.max(np.abs(got - ref)) <= 1e-9 * np.max(np.abs(ref))


@pytest.mark.parametrize("m", [0, 3, 100])
def test_delta_is_flat(m):
    x = np.zeros(128)
    x[m] = 1.0
    assert np.allclose(np.abs(fft(x)), 1.0, rtol=0, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10), st.integers(0, 2**32 - 1))
def test_inverse_roundtrip(p, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=2**p) + 1j * rng.normal(size=2**p)
    back = fft(fft(x), inverse=True)
    assert np.linalg.norm(back - x) <= 1e-12 * np.linalg.norm(x)


def test_fft_rejects_non_power_of_two():
    with pytest.raises(NotPowerOfTwo):
        fft(np.zeros(12))


@pytest.mark.parametrize("N", [8, 64, 1024])
def test_parseval(N):
    rng = np.random.default_rng(N)
    x = rng.normal(size=N)
    w = blackman_harris(N)
    X = fft(x * w)
    lhs = np.sum((x * w) ** 2)
    rhs = np.sum(np.abs(X) ** 2) / N
    assert abs(lhs - rhs) <= 1e-9 * lhs


def test_pure_tone_concentrates():
    N, k = 256, 19
    x = np.cos(2 * np.pi * k * np.arange(N) / N)
    sp = power_spectrum(x, np.ones(N), "rect")
    peak = sp.power_db[k]
    others = np.delete(sp.power_db, k)
    assert np.all(others <= peak - 250)
    assert sp.frequency[k] == k / N and len(sp.bins) == N // 2 + 1


def test_zero_input_is_minus_inf():
    sp = power_spectrum(np.zeros(64), blackman_harris(64))
    assert np.all(np.isneginf(sp.power_db))


def test_spectrum_validation():
    with pytest.raises(LengthMismatch):
        power_spectrum(np.zeros(64), np.ones(32))
    with pytest.raises(NotPowerOfTwo):
        power_spectrum(np.zeros(48), np.ones(48))
    with pytest.raises(NotPowerOfTwo):
        power_spectrum(np.zeros(4), np.ones(4))


def _line_spectrum(slope, offset=0.0, N=4096):
    f = np.arange(N // 2 + 1) / N
    with np.errstate(divide="ignore"):
        p = slope * np.log10(f) + offset
    return Spectrum(f, p, "synthetic", N)


def test_fit_exact_line():
    fit = fit_noise_slope(_line_spectrum(200.0, 17.0), (0.001, 0.1))
    assert fit.slope_db_per_decade == pytest.approx(200.0, abs=1e-6)
    assert fit.residual < 1e-9


@given(st.floats(-300, 300))
def test_fit_offset_invariant(offset):
    a = fit_noise_slope(_line_spectrum(120.0), (0.002, 0.2), [0.05])
    b = fit_noise_slope(_line_spectrum(120.0, offset), (0.002, 0.2), [0.05])
    assert b.slope_db_per_decade == pytest.approx(a.slope_db_per_decade, abs=1e-9)


def test_fit_excludes_tone_bins():
    sp = _line_spectrum(200.0)
    p = sp.power_db.copy()
    k = 205
    tone = k / sp.N
    p[k - 3: k + 4] += 500.0
    spiked = Spectrum(sp.frequency, p, "s", sp.N)
    fit = fit_noise_slope(spiked, (0.01, 0.1), [tone])
    assert fit.slope_db_per_decade == pytest.approx(200.0, abs=1e-6)
    # images fold back into [0, 0.5]
    fit = fit_noise_slope(spiked, (0.01, 0.1), [1 - tone])
    assert fit.slope_db_per_decade == pytest.approx(200.0, abs=1e-6)


def test_fit_default_band_and_errors():
    fit = fit_noise_slope(_line_spectrum(60.0), tone_exclusion=[0.25])
    assert fit.band == (4 / 4096, 0.125)
    with pytest.raises(InsufficientBins):
        fit_noise_slope(_line_spectrum(60.0), (0.001, 0.002))


def test_bibo_examples():
    x = sine(FIG8)
    ref = run(ModulatorConfig.binomial(30), x)
    v = bibo_verdict(ref, 8.0, K=100)
    assert v.stable and v.reason == "bounded"
    per = run(ModulatorConfig.binomial(30).with_scaled_c(16, 1 + 1e-12), x)
    v = bibo_verdict(per, 8.0, K=100)
    assert not v.stable and v.reason == "bound-exceeded"
    zero = run(ModulatorConfig.binomial(5), [0.0] * 50)
    v = bibo_verdict(zero, 1.0, K=3)
    assert v.stable and v.max_abs_output == 0


def test_bibo_monotone_in_k():
    per = run(ModulatorConfig.binomial(30).with_scaled_c(16, 1 + 1e-12), sine(FIG8))
    peak = per.max_abs_y()
    Ks = [1.5, 2, 10, 50, 100, 140, peak / 8 * 0.999]
    assert all(not bibo_verdict(per, 8.0, K=k).stable for k in Ks)
    assert bibo_verdict(per, 8.0, K=peak / 8 * 1.001).stable


def test_bibo_failure_statuses():
    cfg = ModulatorConfig((100, 100), (1, 0, 0), mode="int")
    tr = run(cfg, [1] * 200)
    assert bibo_verdict(tr, 1.0).reason == "overflow"
    tr = run(ModulatorConfig((1e200, 1e200), (1.0, 0.0, 0.0)), [1.0] * 100)
    assert bibo_verdict(tr, 1.0).reason == "non-finite"


def test_saturation_run():
    cfg = ModulatorConfig((1e3, 1e3), (1.0, 0.0, 0.0), llim=-10, ulim=10)
    tr = SimulationTrace(cfg, y=[1.0] * 5 + [10.0] * 40)
    v = bibo_verdict(tr, 10.0, K=2, run_threshold=32)
    assert not v.stable and v.reason == "saturation-run" and v.first_violation_index == 6
    tr = SimulationTrace(cfg, y=[10.0, -10.0] * 40)
    assert bibo_verdict(tr, 10.0, K=2, run_threshold=32).stable


def test_bibo_param_validation():
    tr = SimulationTrace(ModulatorConfig.binomial(1), y=[0.0])
    for kw in (dict(input_bound=0), dict(input_bound=1, K=1), dict(input_bound=1, run_threshold=1)):
        with pytest.raises(ValueError):
            bibo_verdict(tr, **kw)


def test_boundary_fig11():
    scan = find_stability_boundary(30, 40, FIG8)
    assert scan.largest_stable == 36
    assert [L for L, v in scan.rows() if not v.stable] == [37, 38, 39, 40]


def test_boundary_low_orders_and_int_sweep():
    assert all(v.stable for _, v in find_stability_boundary(1, 5, FIG8).rows())
    spec = SignalSpec(8.0, (0.01,), 201, integer_rounded=True)
    scan = find_stability_boundary(1, 51, spec, mode="int")
    assert scan.largest_stable == 51 and all(v.stable for v in scan.verdicts.values())


def test_exact_error_spectrum_is_floor():
    x = sine(SignalSpec(8.0, (0.01,), 256, integer_rounded=True))
    tr = run(ModulatorConfig.binomial(12, mode="int"), x)
    sp = power_spectrum(tr.e, blackman_harris(256))
    assert np.all(np.isneginf(sp.power_db))


def test_first_order_reference_slope():
    N = 2**16
    F = IRRATIONAL_TONE
    tr = run(ModulatorConfig.binomial(1, dq=1.0), sine(SignalSpec(1000.37, (F,), N)))
    for zero_ends in (False, True):
        sp = power_spectrum(tr.e, blackman_harris(N, zero_ends))
        fit = fit_noise_slope(sp, (F / 10, F), [F])
        assert fit.slope_db_per_decade == pytest.approx(20.0, rel=0.25)


@pytest.mark.parametrize("L", [2, 3, 5])
def test_shaping_slope_scales_with_order(L):
    N = 2**16
    F = 1 / 8
    tr = run(ModulatorConfig.binomial(L, dq=256.0), sine(SignalSpec(65536.0, (F,), N)))
    sp = power_spectrum(tr.e, blackman_harris(N, zero_ends=True))
    fit = fit_noise_slope(sp, (F / 10, F), [F])
    assert fit.slope_db_per_decade == pytest.approx(20.0 * L, rel=0.15)
