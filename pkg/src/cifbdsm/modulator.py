"""Time-domain CIFB modulator.

One clock of the loop, in order:

1. every integrator input sums its predecessor, itself, ``d_k * x`` and
   ``-c_k * y_prev`` (the first integrator has no predecessor);
2. the next state is latched;
3. the quantizer input is ``w = s_L + d_{L+1} * x``;
4. ``y = dq * round(w / dq)`` (ties away from zero), or ``y = w`` when
   ``dq == 0``;
5. the error ``e(n) = y(n) - x(n - L + 1)`` is taken *before* limiting, and is
   0 while ``n < L``;
6. ``y`` is clamped to ``[llim, ulim]`` and fed back on the next clock.

Two numeric modes are supported. ``float`` is plain IEEE double arithmetic.
``int`` uses exact Python integers and stops the run as soon as any
intermediate would not fit a signed 128-bit word.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from ._rounding import div_round_half_away, round_half_away
from .coefficients import cifb_coefficients, check_order
from .errors import IntegerOverflow, InvalidConfig, NonFiniteValue, OrderOutOfRange

INT128_LIMIT = 1 << 127


class Mode(str, Enum):
    FLOAT = "float"
    INT = "int"


class Status(str, Enum):
    COMPLETED = "completed"
    OVERFLOW = "overflow"
    NON_FINITE = "non-finite"


def _is_integral(v) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, int):
        return True
    return isinstance(v, float) and v.is_integer()


@dataclass(frozen=True)
class ModulatorConfig:
    """Loop parameters. ``c`` has length L, ``d`` length L+1."""

    c: tuple
    d: tuple
    dq: float = 0
    llim: float = -math.inf
    ulim: float = math.inf
    mode: Mode = Mode.FLOAT

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        L = len(self.c)
        try:
            check_order(L)
        except OrderOutOfRange as exc:
            raise InvalidConfig(str(exc)) from None
        if len(self.d) != L + 1:
            raise InvalidConfig(f"d must have {L + 1} entries, got {len(self.d)}")
        if self.dq < 0 or (isinstance(self.dq, float) and math.isnan(self.dq)):
            raise InvalidConfig(f"quantization step must be >= 0, got {self.dq}")
        if not self.llim <= self.ulim:
            raise InvalidConfig(f"llim {self.llim} > ulim {self.ulim}")

        if mode is Mode.INT:
            if not all(_is_integral(v) for v in (*self.c, *self.d, self.dq)):
                raise InvalidConfig("int mode requires integer coefficients and step")
            for lim in (self.llim, self.ulim):
                if not (math.isinf(lim) or _is_integral(lim)):
                    raise InvalidConfig("int mode requires integer or unbounded limits")
            conv = int
        else:
            conv = float
        object.__setattr__(self, "c", tuple(conv(v) for v in self.c))
        object.__setattr__(self, "d", tuple(conv(v) for v in self.d))
        object.__setattr__(self, "dq", conv(self.dq))
        for name in ("llim", "ulim"):
            lim = getattr(self, name)
            object.__setattr__(self, name, lim if math.isinf(lim) else conv(lim))

    @property
    def order(self) -> int:
        return len(self.c)

    @property
    def limited(self) -> bool:
        return not (math.isinf(self.llim) and math.isinf(self.ulim))

    @classmethod
    def binomial(cls, L: int, dq=0, llim=-math.inf, ulim=math.inf, mode=Mode.FLOAT):
        cs = cifb_coefficients(L)
        return cls(cs.c, cs.d, dq=dq, llim=llim, ulim=ulim, mode=mode)

    def with_scaled_c(self, k: int, factor: float) -> ModulatorConfig:
        """Copy with ``c_k`` (1-based) multiplied by ``factor``; always float mode."""
        if not 1 <= k <= self.order:
            raise InvalidConfig(f"coefficient index {k} outside 1..{self.order}")
        c = [float(v) for v in self.c]
        c[k - 1] = c[k - 1] * factor
        return ModulatorConfig(tuple(c), self.d, self.dq, self.llim, self.ulim, Mode.FLOAT)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "c": list(self.c),
            "d": list(self.d),
            "dq": self.dq,
            "llim": self.llim,
            "ulim": self.ulim,
            "mode": self.mode.value,
        }


@dataclass
class ModulatorState:
    """Integrator outputs ``s_1..s_L``, the fed-back output and the clock count.

    ``history`` keeps the last L inputs for the delayed error reference.
    """

    s: list
    y_prev: float = 0
    n: int = 1
    history: deque = field(default_factory=deque)

    @classmethod
    def fresh(cls, config: ModulatorConfig) -> ModulatorState:
        zero = 0 if config.mode is Mode.INT else 0.0
        return cls([zero] * config.order, zero, 1, deque(maxlen=config.order))


class StepRecord(NamedTuple):
    n: int
    x: float
    w: float
    y: float
    e: float


def quantize(w, dq):
    """Mid-tread quantizer ``dq * round(w / dq)``; identity when ``dq == 0``.

    Integer ``w`` with integer ``dq`` is rounded exactly.

    >>> quantize(128, 256), quantize(-128, 256)
    (256, -256)
    """
    if dq < 0:
        raise ValueError("quantization step must be >= 0")
    if dq == 0:
        return w
    if isinstance(w, int) and isinstance(dq, int):
        return dq * div_round_half_away(w, dq)
    return dq * round_half_away(w / dq)


def _check_int(v: int) -> None:
    if not -INT128_LIMIT <= v < INT128_LIMIT:
        raise IntegerOverflow(f"value with {v.bit_length()} bits exceeds int128")


def step(state: ModulatorState, x_n, config: ModulatorConfig) -> StepRecord:
    """Advance ``state`` by one clock with input ``x_n``; mutates ``state``."""
    L = config.order
    if len(state.s) != L:
        raise InvalidConfig(f"state length {len(state.s)} does not match order {L}")
    c, d, s, yp = config.c, config.d, state.s, state.y_prev
    exact = config.mode is Mode.INT

    if exact:
        if not _is_integral(x_n):
            raise InvalidConfig(f"int mode requires integer input, got {x_n!r}")
        x_n = int(x_n)
        ns = [s[0] + d[0] * x_n - c[0] * yp]
        for k in range(1, L):
            ns.append(s[k - 1] + s[k] + d[k] * x_n - c[k] * yp)
        # Every partial sum and product is bounded by the sum of magnitudes.
        bound = max(abs(v) for v in s) * 2 + max(map(abs, d)) * abs(x_n) + max(map(abs, c)) * abs(yp)
        if bound >= INT128_LIMIT:
            for v in (d[0] * x_n, c[0] * yp, s[0] + d[0] * x_n, ns[0]):
                _check_int(v)
            for k in range(1, L):
                for v in (s[k - 1] + s[k], d[k] * x_n, c[k] * yp,
                          s[k - 1] + s[k] + d[k] * x_n, ns[k]):
                    _check_int(v)
        w = ns[-1] + d[L] * x_n
        _check_int(w)
    else:
        x_n = float(x_n)
        ns = [s[0] + d[0] * x_n - c[0] * yp]
        for k in range(1, L):
            ns.append(s[k - 1] + s[k] + d[k] * x_n - c[k] * yp)
        w = ns[-1] + d[L] * x_n
        if not (math.isfinite(w) and all(map(math.isfinite, ns))):
            raise NonFiniteValue(f"non-finite loop value at n={state.n}")

    y = quantize(w, config.dq)
    if not exact and not math.isfinite(y):
        raise NonFiniteValue(f"non-finite output at n={state.n}")

    n = state.n
    state.history.append(x_n)
    if n < L:
        e = 0 if exact else 0.0
    else:
        e = y - state.history[0]
    y = max(min(y, config.ulim), config.llim)

    state.s = ns
    state.y_prev = y
    state.n = n + 1
    return StepRecord(n, x_n, w, y, e)


@dataclass
class SimulationTrace:
    """Column-wise per-sample record of a run, indices contiguous from 1."""

    config: ModulatorConfig
    x: list = field(default_factory=list)
    w: list = field(default_factory=list)
    y: list = field(default_factory=list)
    e: list = field(default_factory=list)
    status: Status = Status.COMPLETED
    message: str = ""

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n(self) -> range:
        return range(1, len(self.y) + 1)

    @property
    def records(self) -> list[StepRecord]:
        return [StepRecord(i, *r) for i, r in enumerate(zip(self.x, self.w, self.y, self.e), 1)]

    def append(self, rec: StepRecord) -> None:
        self.x.append(rec.x)
        self.w.append(rec.w)
        self.y.append(rec.y)
        self.e.append(rec.e)

    def max_abs_y(self) -> float:
        return max((abs(v) for v in self.y), default=0)


def run(config: ModulatorConfig, x: Sequence | Iterable) -> SimulationTrace:
    """Run the loop from a zero state over every sample of ``x``.

    Overflow or non-finite values end the run early; the returned trace holds
    every sample completed before the failure and the matching status.
    """
    x = list(x)
    if not x:
        raise InvalidConfig("input sequence is empty")
    if config.mode is Mode.INT and not all(_is_integral(v) for v in x):
        raise InvalidConfig("int mode requires integer input samples")
    state = ModulatorState.fresh(config)
    trace = SimulationTrace(config)
    try:
        for xn in x:
            trace.append(step(state, xn, config))
    except IntegerOverflow as exc:
        trace.status, trace.message = Status.OVERFLOW, str(exc)
    except NonFiniteValue as exc:
        trace.status, trace.message = Status.NON_FINITE, str(exc)
    return trace
