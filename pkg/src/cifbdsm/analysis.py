"""Stability verdicts, windowed power spectra and noise-slope fits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientBins, LengthMismatch, NotPowerOfTwo
from .modulator import Mode, ModulatorConfig, SimulationTrace, Status, run
from .signals import SignalSpec, generate

DEFAULT_K = 20.0
DEFAULT_RUN_THRESHOLD = 32
TONE_GUARD_BINS = 3


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    reason: str  # bounded | bound-exceeded | saturation-run | overflow | non-finite
    max_abs_output: float
    first_violation_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "reason": self.reason,
            "max_abs_output": self.max_abs_output,
            "first_violation_index": self.first_violation_index,
        }


def bibo_verdict(trace: SimulationTrace, input_bound: float, K: float = DEFAULT_K,
                 run_threshold: int = DEFAULT_RUN_THRESHOLD) -> StabilityVerdict:
    """Classify a trace as bounded or not.

    Unstable if the run overflowed or went non-finite, if any ``|y| >= K * B``,
    or (for limited loops only) if ``run_threshold`` consecutive outputs sit on
    a limit.
    """
    if input_bound <= 0 or K <= 1 or run_threshold < 2:
        raise ValueError("need input_bound > 0, K > 1, run_threshold >= 2")
    peak = float(trace.max_abs_y())
    if trace.status is Status.OVERFLOW:
        return StabilityVerdict(False, "overflow", peak, len(trace) + 1)
    if trace.status is Status.NON_FINITE:
        return StabilityVerdict(False, "non-finite", peak, len(trace) + 1)

    bound = K * input_bound
    for i, y in enumerate(trace.y, 1):
        if abs(y) >= bound:
            return StabilityVerdict(False, "bound-exceeded", peak, i)

    cfg = trace.config
    if cfg.limited:
        streak, prev = 0, None
        for i, y in enumerate(trace.y, 1):
            pinned = y == cfg.ulim or y == cfg.llim
            if pinned and y == prev:
                streak += 1
            else:
                streak = 1 if pinned else 0
            prev = y
            if streak >= run_threshold:
                return StabilityVerdict(False, "saturation-run", peak, i - run_threshold + 1)
    return StabilityVerdict(True, "bounded", peak, None)


def _check_pow2(N: int) -> None:
    if N < 1 or N & (N - 1):
        raise NotPowerOfTwo(f"length {N} is not a power of two")


def fft(x: Sequence[complex], inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 decimation-in-time DFT.

    ``X_k = sum_n x_n exp(-2 pi i k n / N)``; the inverse includes ``1/N``.
    """
    a = np.asarray(x, dtype=np.complex128).copy()
    N = a.size
    _check_pow2(N)
    bits = N.bit_length() - 1
    if bits:
        idx = np.arange(N)
        rev = np.zeros(N, dtype=np.int64)
        for b in range(bits):
            rev |= ((idx >> b) & 1) << (bits - 1 - b)
        a = a[rev]
    sign = 1.0 if inverse else -1.0
    m = 2
    while m <= N:
        half = m // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / m)
        blocks = a.reshape(-1, m)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * tw
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        a = blocks.reshape(-1)
        m *= 2
    return a / N if inverse else a


@dataclass(frozen=True)
class Spectrum:
    """One-sided power spectrum: bins ``k = 0..N/2`` at frequency ``k / N``."""

    frequency: np.ndarray
    power_db: np.ndarray
    window_name: str
    N: int

    @property
    def bins(self) -> list[tuple[float, float]]:
        return list(zip(self.frequency.tolist(), self.power_db.tolist()))


def power_spectrum(samples: Sequence[float], window: Sequence[float],
                   window_name: str = "custom") -> Spectrum:
    """Windowed DFT power ``10 log10 |X_k|**2``; exact zeros map to ``-inf``."""
    x = np.asarray(samples, dtype=np.float64)
    win = np.asarray(window, dtype=np.float64)
    if x.size != win.size:
        raise LengthMismatch(f"{x.size} samples vs window of {win.size}")
    N = x.size
    _check_pow2(N)
    if N < 8:
        raise NotPowerOfTwo(f"spectrum length {N} < 8")
    X = fft(x * win)[: N // 2 + 1]
    with np.errstate(divide="ignore", over="ignore"):
        p = 10.0 * np.log10(np.abs(X) ** 2)
    return Spectrum(np.arange(N // 2 + 1) / N, p, window_name, N)


@dataclass(frozen=True)
class SlopeFit:
    slope_db_per_decade: float
    intercept_db: float
    band: tuple[float, float]
    residual: float
    bins_used: int

    def predict(self, f):
        return self.intercept_db + self.slope_db_per_decade * np.log10(f)

    def to_dict(self) -> dict:
        return {
            "slope_db_per_decade": self.slope_db_per_decade,
            "intercept_db": self.intercept_db,
            "band": list(self.band),
            "residual_db": self.residual,
            "bins_used": self.bins_used,
        }


def _fold(f: float) -> float:
    f = f % 1.0
    return 1.0 - f if f > 0.5 else f


def default_band(N: int, tone: float) -> tuple[float, float]:
    return 4.0 / N, tone / 2.0


def fit_noise_slope(spectrum: Spectrum, band: tuple[float, float] | None = None,
                    tone_exclusion: Sequence[float] = ()) -> SlopeFit:
    """Least-squares line of ``power_db`` against ``log10(f)`` inside ``band``.

    Bins within three bins of any listed tone (folded into ``[0, 0.5]``) and
    bins with ``-inf`` power are dropped. An L-th order shaper should give
    about ``20 L`` dB/decade.
    """
    if band is None:
        tone = min(tone_exclusion) if tone_exclusion else 0.5
        band = default_band(spectrum.N, tone)
    lo, hi = band
    if not 0.0 < lo < hi < 0.5 + 1e-12:
        raise ValueError(f"band {band} must satisfy 0 < f_lo < f_hi <= 0.5")
    f, p = spectrum.frequency, spectrum.power_db
    keep = (f >= lo) & (f <= hi) & np.isfinite(p)
    guard = TONE_GUARD_BINS / spectrum.N
    for tone in tone_exclusion:
        keep &= np.abs(f - _fold(tone)) > guard + 1e-15
    if keep.sum() < 10:
        raise InsufficientBins(f"only {int(keep.sum())} usable bins in band {band}")
    lf, lp = np.log10(f[keep]), p[keep]
    A = np.vstack([lf, np.ones_like(lf)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, lp, rcond=None)
    resid = float(np.sqrt(np.mean((lp - (slope * lf + icpt)) ** 2)))
    return SlopeFit(float(slope), float(icpt), (float(lo), float(hi)), resid, int(keep.sum()))


@dataclass
class BoundaryScan:
    largest_stable: int | None
    verdicts: dict[int, StabilityVerdict] = field(default_factory=dict)
    stimulus: SignalSpec | None = None
    mode: Mode = Mode.FLOAT

    def rows(self):
        return [(L, v) for L, v in sorted(self.verdicts.items())]


def find_stability_boundary(L_min: int, L_max: int, stimulus: SignalSpec,
                            K: float = DEFAULT_K, run_threshold: int = DEFAULT_RUN_THRESHOLD,
                            mode: Mode = Mode.FLOAT, dq=0) -> BoundaryScan:
    """Linear scan of binomial loops of order ``L_min..L_max``.

    Every order is simulated and judged; stability need not be monotone in L,
    so the full verdict table is returned along with the largest stable order.
    """
    if not 1 <= L_min <= L_max <= 64:
        raise ValueError(f"order range {L_min}..{L_max} outside 1..64")
    x = generate(stimulus)
    B = abs(stimulus.amplitude) * len(stimulus.frequencies)
    scan = BoundaryScan(None, {}, stimulus, Mode(mode))
    for L in range(L_min, L_max + 1):
        cfg = ModulatorConfig.binomial(L, dq=dq, mode=mode)
        scan.verdicts[L] = bibo_verdict(run(cfg, x), B, K, run_threshold)
    stable = [L for L, v in scan.verdicts.items() if v.stable]
    scan.largest_stable = max(stable) if stable else None
    return scan
