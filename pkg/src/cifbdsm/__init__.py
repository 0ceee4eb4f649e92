"""Binomial-coefficient CIFB delta-sigma modulators: coefficients, transfer
functions, time-domain simulation, spectra and stability checks."""

__version__ = "0.1.0"

from .coefficients import CoefficientSet, binomial_oracle, cifb_coefficients, gen_pascal
from .modulator import Mode, ModulatorConfig, ModulatorState, SimulationTrace, Status, quantize, run, step
from .signals import SignalSpec, blackman_harris, sine, two_tone
from .transfer import Polynomial, RationalTransfer, eval_magnitude, expand_denominator, ntf, stf
from .analysis import bibo_verdict, find_stability_boundary, fit_noise_slope, power_spectrum

__all__ = [
    "CoefficientSet", "binomial_oracle", "cifb_coefficients", "gen_pascal",
    "Mode", "ModulatorConfig", "ModulatorState", "SimulationTrace", "Status", "quantize", "run", "step",
    "SignalSpec", "blackman_harris", "sine", "two_tone",
    "Polynomial", "RationalTransfer", "eval_magnitude", "expand_denominator", "ntf", "stf",
    "bibo_verdict", "find_stability_boundary", "fit_noise_slope", "power_spectrum",
]
