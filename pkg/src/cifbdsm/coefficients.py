"""Binomial loop coefficients for the CIFB modulator.

Two independent routes produce the same Pascal row: :func:`gen_pascal` clocks
a cascade of delaying integrators with an impulse and reads its state, and
:func:`binomial_oracle` uses the multiplicative recurrence. They share no code
so each can check the other.

Indexing: a Pascal row is 0-indexed (``row[j] == C(L, j)``). The feedback
vector of :class:`CoefficientSet` mirrors the usual ``c_1 .. c_L`` notation,
so ``c_k`` lives at Python index ``k - 1`` and equals ``C(L, k - 1)``. That is
the only assignment for which the loop denominator collapses to ``z**L``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import OrderOutOfRange

MIN_ORDER = 1
MAX_ORDER = 64


def check_order(L: int, minimum: int = MIN_ORDER) -> int:
    if isinstance(L, bool) or not isinstance(L, int):
        raise OrderOutOfRange(f"order must be an integer, got {L!r}")
    if not minimum <= L <= MAX_ORDER:
        raise OrderOutOfRange(f"order {L} outside {minimum}..{MAX_ORDER}")
    return L


def gen_pascal(L: int) -> list[int]:
    """Impulse response of ``L + 1`` cascaded integrators after ``L + 1`` clocks.

    The first integrator accumulates the impulse; every later one adds its
    predecessor's state to its own. After ``L + 1`` clocks the state vector is
    row ``L`` of Pascal's triangle.

    >>> gen_pascal(4)
    [1, 4, 6, 4, 1]
    """
    check_order(L)
    x = [0] * (L + 1)
    x[0] = 1
    s = [0] * (L + 1)
    for n in range(L + 1):
        ns = [0] * (L + 1)
        ns[0] = s[0] + x[n]
        for k in range(1, L + 1):
            ns[k] = s[k - 1] + s[k]
        s = ns
    return s


def binomial_oracle(L: int) -> list[int]:
    """``[C(L, 0), ..., C(L, L)]`` via ``C(L, j) = C(L, j-1) * (L-j+1) / j``.

    Accepts ``L = 0`` (returns ``[1]``) since the empty product is well defined.
    """
    check_order(L, minimum=0)
    row = [1]
    for j in range(1, L + 1):
        num = row[-1] * (L - j + 1)
        assert num % j == 0
        row.append(num // j)
    return row


@dataclass(frozen=True)
class CoefficientSet:
    """Feedback ``c`` (length L) and feed-in ``d`` (length L+1) of a CIFB loop."""

    order: int
    c: tuple[int, ...]
    d: tuple[int, ...]

    def __post_init__(self):
        check_order(self.order)
        if len(self.c) != self.order or len(self.d) != self.order + 1:
            raise OrderOutOfRange(
                f"coefficient lengths {len(self.c)}/{len(self.d)} do not fit order {self.order}"
            )

    def c_at(self, k: int) -> int:
        """1-based accessor, ``c_at(k) == c_k``."""
        return self.c[k - 1]

    def d_at(self, k: int) -> int:
        return self.d[k - 1]


def cifb_coefficients(L: int) -> CoefficientSet:
    """Binomial feedback with a single feed-in at the first integrator.

    ``c_k = C(L, k-1)`` for ``k = 1..L`` and ``d = [1, 0, ..., 0]``, which makes
    the loop denominator exactly ``z**L`` and the signal path a pure delay.
    """
    row = gen_pascal(L)
    c = tuple(row[:L])
    d = (1,) + (0,) * L
    return CoefficientSet(order=L, c=c, d=d)


def max_coefficient_index(L: int) -> int:
    """1-based index ``k`` of the (first) largest ``c_k``."""
    cs = cifb_coefficients(L)
    return max(range(1, L + 1), key=lambda k: (cs.c_at(k), -k))
