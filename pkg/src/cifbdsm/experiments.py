"""Reproducible experiment runners and the named presets built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    SlopeFit,
    Spectrum,
    StabilityVerdict,
    bibo_verdict,
    fit_noise_slope,
    power_spectrum,
)
from .coefficients import max_coefficient_index
from .errors import InsufficientBins, InvalidSpec, NotPowerOfTwo
from .modulator import Mode, ModulatorConfig, SimulationTrace, run
from .signals import SignalSpec, blackman_harris, generate

FULL_DDC_SAMPLES = 2**24
DESK_DDC_SAMPLES = 2**18

# Golden-ratio tone: incommensurate with the clock, so even a first-order
# loop produces broadband (non-periodic) quantization noise.
IRRATIONAL_TONE = (math.sqrt(5.0) - 1.0) / 20.0

PRESETS: dict[str, dict] = {
    "fig8": dict(command="simulate", order=30, amplitude=8.0, freqs=[0.01], samples=201,
                 dq=0.0, mode="float", round_input=False),
    "fig9": dict(command="perturb", order=30, index=16, eps=1e-12, amplitude=8.0,
                 freqs=[0.01], samples=201, dq=0.0, round_input=False),
    "fig10": dict(command="simulate", order=51, amplitude=8.0, freqs=[0.01], samples=201,
                  dq=0, mode="int", round_input=True),
    "fig11": dict(command="sweep", order_min=30, order_max=40, amplitude=8.0, freqs=[0.01],
                  samples=201, dq=0.0, mode="float", round_input=False),
    "fig12": dict(command="ddc", order=10, amplitude=65536.0, freqs=[0.125], samples=DESK_DDC_SAMPLES,
                  dq=256.0, mode="float", round_input=False,
                  notes=["sample count reduced from 2^24 to 2^18 for desk-scale runs"]),
}


def input_bound(spec: SignalSpec) -> float:
    """Peak bound ``B`` of a stimulus: ``A`` per tone."""
    return abs(spec.amplitude) * len(spec.frequencies)


@dataclass
class PerturbationReport:
    index: int
    eps: float
    reference: SimulationTrace
    perturbed: SimulationTrace
    reference_verdict: StabilityVerdict
    perturbed_verdict: StabilityVerdict

    @property
    def ratio(self) -> float:
        ref = float(self.reference.max_abs_y())
        per = float(self.perturbed.max_abs_y())
        if ref == 0:
            return 1.0 if per == 0 else math.inf
        return per / ref

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "eps": self.eps,
            "reference": self.reference_verdict.to_dict(),
            "perturbed": self.perturbed_verdict.to_dict(),
            "max_abs_y_ratio": self.ratio,
        }


def run_perturbation(order: int, stimulus: SignalSpec, index: int | None = None,
                     eps: float = 1e-12, dq: float = 0.0, **verdict_kw) -> PerturbationReport:
    """Compare the binomial loop against one with ``c_index *= (1 + eps)``.

    Both runs are float mode so the only difference is the perturbation.
    ``index`` defaults to the largest coefficient.
    """
    if index is None:
        index = max_coefficient_index(order)
    base = ModulatorConfig.binomial(order, dq=dq, mode=Mode.FLOAT)
    pert = base.with_scaled_c(index, 1.0 + eps)
    x = generate(stimulus)
    B = input_bound(stimulus)
    ref, per = run(base, x), run(pert, x)
    return PerturbationReport(index, eps, ref, per,
                              bibo_verdict(ref, B, **verdict_kw), bibo_verdict(per, B, **verdict_kw))


@dataclass
class DDCResult:
    stimulus: SignalSpec
    trace: SimulationTrace
    verdict: StabilityVerdict
    spectrum: Spectrum
    fit: SlopeFit | None
    band: tuple[float, float]
    fit_error: str = ""
    notes: list[str] = field(default_factory=list)

    def reference_db(self) -> np.ndarray:
        """Theoretical ``20 L`` dB/decade line through the fit at the band centre."""
        L = self.trace.config.order
        f = self.spectrum.frequency
        out = np.full(f.shape, -math.inf)
        if self.fit is None:
            return out
        fc = math.sqrt(self.band[0] * self.band[1])
        anchor = self.fit.predict(fc)
        pos = f > 0
        out[pos] = anchor + 20.0 * L * np.log10(f[pos] / fc)
        return out


def ddc_band(freqs) -> tuple[float, float]:
    """Low-frequency fitting decade ``[F/10, F]`` below the lowest tone."""
    F = min(freqs)
    return F / 10.0, F


def run_ddc(order: int = 10, amplitude: float = 65536.0, freqs=(0.125,), samples: int = DESK_DDC_SAMPLES,
            dq=256.0, mode: Mode = Mode.FLOAT, round_input: bool = False, window: str = "bh0",
            band: tuple[float, float] | None = None, **verdict_kw) -> DDCResult:
    """Bit-width reduction run: simulate, window the error stream, fit the slope.

    ``window`` is ``"bh0"`` (Blackman-Harris with the end pedestal removed,
    the default) or ``"bh"`` (plain 4-term Blackman-Harris).
    """
    if samples < 8 or samples & (samples - 1):
        raise NotPowerOfTwo(f"sample count {samples} must be a power of two >= 8")
    if window not in ("bh", "bh0"):
        raise InvalidSpec(f"unknown window {window!r}")
    spec = SignalSpec(amplitude, tuple(freqs), samples, round_input)
    cfg = ModulatorConfig.binomial(order, dq=dq, mode=mode)
    trace = run(cfg, generate(spec))
    verdict = bibo_verdict(trace, input_bound(spec), **verdict_kw)
    e = np.asarray(trace.e, dtype=np.float64)
    if e.size < samples:
        e = np.concatenate([e, np.zeros(samples - e.size)])
    win = blackman_harris(samples, zero_ends=(window == "bh0"))
    name = "blackman-harris (zero ends)" if window == "bh0" else "blackman-harris"
    spectrum = power_spectrum(e, win, name)
    band = band or ddc_band(spec.frequencies)
    fit, err = None, ""
    try:
        fit = fit_noise_slope(spectrum, band, spec.frequencies)
    except InsufficientBins as exc:
        err = str(exc)
    return DDCResult(spec, trace, verdict, spectrum, fit, band, err)
