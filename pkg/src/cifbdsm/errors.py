"""Exception types raised by the toolkit."""


class CIFBError(Exception):
    """Base class for all toolkit errors."""


class OrderOutOfRange(CIFBError, ValueError):
    pass


class DegreeOutOfRange(CIFBError, ValueError):
    pass


class LengthMismatch(CIFBError, ValueError):
    pass


class PoleOnUnitCircle(CIFBError, ZeroDivisionError):
    pass


class InvalidConfig(CIFBError, ValueError):
    pass


class IntegerOverflow(CIFBError, OverflowError):
    """An exact-integer intermediate left the signed 128-bit range."""


class NonFiniteValue(CIFBError, FloatingPointError):
    """A float-mode intermediate became NaN or infinite."""


class InvalidSpec(CIFBError, ValueError):
    pass


class WindowTooShort(CIFBError, ValueError):
    pass


class NotPowerOfTwo(CIFBError, ValueError):
    pass


class InsufficientBins(CIFBError, ValueError):
    pass
