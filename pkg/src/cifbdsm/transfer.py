"""Exact polynomial algebra for the loop transfer functions.

Polynomials are stored in ascending powers of ``z`` with exact Python
integers. Only frequency-response evaluation drops to double precision, and
it first divides out every zero at ``z = 1`` (and ``z = 0``) exactly so that
``|z - 1|**m`` can be evaluated as ``(2 sin(w/2))**m`` without cancellation.
"""
from __future__ import annotations

import cmath
import math
import operator
from dataclasses import dataclass
from typing import Sequence

from .errors import DegreeOutOfRange, LengthMismatch, PoleOnUnitCircle

MAX_DEGREE = 64


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    out = [operator.index(a) for a in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out) if out else (0,)


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial, ``coeffs[i]`` multiplies ``z**i``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial([other * a for a in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def norm(self) -> float:
        return math.sqrt(sum(float(a) ** 2 for a in self.coeffs))

    def split_unit_root(self) -> tuple[int, int, Polynomial]:
        """Factor as ``z**p * (z - 1)**m * q(z)`` with exact division.

        Returns ``(p, m, q)``. The zero polynomial is returned unchanged.
        """
        if self.is_zero():
            return 0, 0, self
        c = list(self.coeffs)
        p = 0
        while c[0] == 0:
            c.pop(0)
            p += 1
        m = 0
        while len(c) > 1 and sum(c) == 0:
            # synthetic division by (z - 1), highest power first
            q = [0] * (len(c) - 1)
            acc = 0
            for i in range(len(c) - 1, 0, -1):
                acc += c[i]
                q[i - 1] = acc
            c = q
            m += 1
        return p, m, Polynomial(c)


@dataclass(frozen=True)
class RationalTransfer:
    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("denominator is identically zero")
        if not self.numerator.is_zero() and self.numerator.degree > self.denominator.degree:
            raise ValueError("non-causal transfer: numerator degree exceeds denominator")

    def cross_equal(self, other: RationalTransfer) -> bool:
        """Rational-function equality by cross multiplication (exact)."""
        return self.numerator * other.denominator == other.numerator * self.denominator


def expand_shifted_power(k: int) -> Polynomial:
    """``(z - 1)**k`` in ascending powers of ``z``.

    >>> expand_shifted_power(3).coeffs
    (-1, 3, -3, 1)
    """
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k <= MAX_DEGREE:
        raise DegreeOutOfRange(f"degree {k!r} outside 0..{MAX_DEGREE}")
    return Polynomial([(-1) ** (k - j) * math.comb(k, j) for j in range(k + 1)])


def _shifted_sum(weights: Sequence[int]) -> Polynomial:
    """``sum_k weights[k] * (z - 1)**k``."""
    acc = Polynomial([0])
    for k, wk in enumerate(weights):
        if wk:
            acc = acc + expand_shifted_power(k) * operator.index(wk)
    return acc


def expand_denominator(c: Sequence[int], L: int) -> Polynomial:
    """Loop denominator ``(z-1)**L + sum_{k=1..L} c_k (z-1)**(k-1)``."""
    if len(c) != L:
        raise LengthMismatch(f"expected {L} feedback coefficients, got {len(c)}")
    return expand_shifted_power(L) + _shifted_sum(c)


def ntf(c: Sequence[int], L: int) -> RationalTransfer:
    """Noise transfer function ``(z-1)**L / D(z)``."""
    den = expand_denominator(c, L)
    return RationalTransfer(expand_shifted_power(L), den)


def stf(c: Sequence[int], d: Sequence[int], L: int) -> RationalTransfer:
    """Signal transfer function ``sum_k d_k (z-1)**(k-1) / D(z)``."""
    if len(d) != L + 1:
        raise LengthMismatch(f"expected {L + 1} feed-in coefficients, got {len(d)}")
    den = expand_denominator(c, L)
    return RationalTransfer(_shifted_sum(d), den)


def _factored_magnitude(poly: Polynomial, omega: float) -> float:
    if poly.is_zero():
        return 0.0
    _, m, q = poly.split_unit_root()
    chord = 2.0 * abs(math.sin(omega / 2.0))  # |e^{jw} - 1|
    return chord**m * abs(q(cmath.exp(1j * omega)))


def eval_magnitude(tf: RationalTransfer, omega: float) -> float:
    """``|H(e^{j omega})|`` in double precision, for ``0 <= omega <= pi``."""
    if not 0.0 <= omega <= math.pi:
        raise ValueError(f"omega={omega} outside [0, pi]")
    den = _factored_magnitude(tf.denominator, omega)
    if den < 1e-15 * tf.denominator.norm():
        raise PoleOnUnitCircle(f"|D(e^jw)| = {den:g} at omega={omega}")
    return _factored_magnitude(tf.numerator, omega) / den
