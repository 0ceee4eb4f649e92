"""Stimulus generators and the Blackman-Harris window.

Sample indices start at ``n = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rounding import round_half_away
from .errors import InvalidSpec, WindowTooShort

# 4-term minimum-sidelobe Blackman-Harris
BH_COEFFS = (0.35875, 0.48829, 0.14128, 0.01168)


@dataclass(frozen=True)
class SignalSpec:
    """Amplitude ``A``, relative tone frequencies ``f / fs`` and length."""

    amplitude: float
    frequencies: tuple[float, ...]
    length: int
    integer_rounded: bool = False

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        object.__setattr__(self, "frequencies", freqs)
        if not 1 <= len(freqs) <= 2:
            raise InvalidSpec("one or two tones required")
        if any(not 0.0 < f < 0.5 for f in freqs):
            raise InvalidSpec(f"tone frequencies must lie in (0, 0.5): {freqs}")
        if len(freqs) == 2 and freqs[0] == freqs[1]:
            raise InvalidSpec("two-tone stimulus needs distinct frequencies")
        if isinstance(self.length, bool) or not isinstance(self.length, int) or self.length < 1:
            raise InvalidSpec(f"length must be a positive integer, got {self.length!r}")
        if not math.isfinite(self.amplitude):
            raise InvalidSpec("amplitude must be finite")

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "frequencies": list(self.frequencies),
            "length": self.length,
            "integer_rounded": self.integer_rounded,
        }


def _finish(values: list[float], spec: SignalSpec) -> list:
    if spec.integer_rounded:
        return [int(round_half_away(v)) for v in values]
    return values


def sine(spec: SignalSpec) -> list:
    """``A * sin(2 pi F n)`` for ``n = 1..length``."""
    if len(spec.frequencies) != 1:
        raise InvalidSpec("sine() takes a single-tone spec")
    A, (F,) = spec.amplitude, spec.frequencies
    return _finish([A * math.sin(2 * math.pi * F * n) for n in range(1, spec.length + 1)], spec)


def two_tone(spec: SignalSpec) -> list:
    """``A * (sin(2 pi F1 n) + sin(2 pi F2 n))`` for ``n = 1..length``."""
    if len(spec.frequencies) != 2:
        raise InvalidSpec("two_tone() takes a two-tone spec")
    A, (F1, F2) = spec.amplitude, spec.frequencies
    vals = [
        A * (math.sin(2 * math.pi * F1 * n) + math.sin(2 * math.pi * F2 * n))
        for n in range(1, spec.length + 1)
    ]
    return _finish(vals, spec)


def generate(spec: SignalSpec) -> list:
    return sine(spec) if len(spec.frequencies) == 1 else two_tone(spec)


def oversampling_ratio(F: float) -> float:
    """OSR of a tone at relative frequency ``F``: ``1 / (2 F)``."""
    return 1.0 / (2.0 * F)


def blackman_harris(N: int, zero_ends: bool = False) -> np.ndarray:
    """Symmetric 4-term Blackman-Harris window of length ``N``.

    The plain window keeps a pedestal of ``6e-5`` at both ends. With
    ``zero_ends=True`` that pedestal is subtracted and the result rescaled so
    the peak stays 1; the ends are then exactly zero, which removes the
    ``1/f`` leakage skirt that otherwise buries steep noise-shaping slopes.
    """
    if N < 4:
        raise WindowTooShort(f"window length {N} < 4")
    a0, a1, a2, a3 = BH_COEFFS
    t = 2 * np.pi * np.arange(N) / (N - 1)
    w = a0 - a1 * np.cos(t) + a2 * np.cos(2 * t) - a3 * np.cos(3 * t)
    if zero_ends:
        edge = a0 - a1 + a2 - a3
        w = (w - edge) / (1.0 - edge)
        w[0] = w[-1] = 0.0
    return w
