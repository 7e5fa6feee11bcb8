"""Number handling shared by the library: parsing, arithmetic mode, formatting."""

import math
import os
from decimal import Context, Decimal
from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"
FLOAT_TOL = 1e-9
# exact arithmetic stays the default up to this many voters
RATIONAL_MAX_N = 9


def to_number(x):
    """Parse ints, floats, "a/b" strings and decimal strings into a Fraction.

    Floats go through their shortest repr so 0.001 becomes 1/1000 rather
    than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite number {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars and the like
    return to_number(float(x))


def mode_for(n, override=None):
    """Arithmetic mode for an n-voter computation.

    ZSV_NUM_MODE in the environment overrides the size rule.
    """
    mode = override or os.environ.get("ZSV_NUM_MODE")
    if mode:
        if mode not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown numeric mode {mode!r}")
        return mode
    return RATIONAL if n <= RATIONAL_MAX_N else FLOAT


def coerce(x, mode):
    x = to_number(x) if not isinstance(x, (Fraction, float)) else x
    if mode == FLOAT:
        return float(x)
    return to_number(x)


def is_exact(*xs):
    return all(isinstance(x, (int, Fraction)) for x in xs)


def sign(x):
    return (x > 0) - (x < 0)


def is_zero(x, tol=FLOAT_TOL):
    if isinstance(x, (int, Fraction)):
        return x == 0
    return abs(x) <= tol


_CTX = Context(prec=12)


def fmt(x):
    """Stable text form: rationals as "a/b", floats with 12 significant digits.

    Very small rationals keep their sign and exponent where a float would
    underflow to zero.
    """
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return format(x, ".12g")
    return str(x)


def fmt_decimal(x):
    """12-significant-digit decimal form of any real, including tiny Fractions."""
    if isinstance(x, float):
        return fmt(x)
    x = Fraction(x)
    if x == 0:
        return "0"
    d = _CTX.divide(Decimal(x.numerator), Decimal(x.denominator))
    s = format(d, ".12g") if abs(d.adjusted()) < 300 else format(d, "E")
    mant, _, exp = s.replace("E", "e").partition("e")
    if "." in mant:
        mant = mant.rstrip("0").rstrip(".")
    return mant + ("e" + exp if exp else "")


def to_float(x):
    return float(x)
