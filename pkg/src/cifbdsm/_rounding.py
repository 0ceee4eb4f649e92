import math


def round_half_away(v):
    """Round to the nearest integer, ties away from zero (Matlab ``round``).

    Integers pass through unchanged; floats come back as floats so float-mode
    arithmetic stays in double precision.
    """
    if isinstance(v, int):
        return v
    if not math.isfinite(v):
        return v
    t = math.trunc(v)
    # v - t is exact for IEEE doubles
    if abs(v - t) >= 0.5:
        t += 1 if v > 0 else -1
    return float(t)


def div_round_half_away(w: int, dq: int) -> int:
    """Exact ``round(w / dq)`` for integers with ties away from zero."""
    q, r = divmod(abs(w), dq)
    if 2 * r >= dq:
        q += 1
    return q if w >= 0 else -q
