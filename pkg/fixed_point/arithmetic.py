"""Integer-only fixed-point arithmetic with EVM semantics.

A value is `mantissa / 2 ** scale_bits`. Mantissas (and intermediate
products) live in the int256 range, and divisions truncate toward zero like
the EVM's SDIV. Rescaling always divides by `2 ** scale_bits`, never shifts.
"""

from collections import namedtuple

from django.conf import settings

from fixed_point.exceptions import ArithmeticOverflowError, ScaleMismatchError

INT256_MIN = -(2 ** 255)
INT256_MAX = 2 ** 255 - 1


def bounded(value):
    if not INT256_MIN <= value <= INT256_MAX:
        raise ArithmeticOverflowError(f"{value} does not fit a signed 256-bit word")
    return value


def truncating_div(numerator, denominator):
    """
    >>> truncating_div(7, 2), truncating_div(-7, 2), truncating_div(7, -2)
    (3, -3, -3)
    """

    quotient = abs(numerator) // abs(denominator)
    return -quotient if (numerator < 0) != (denominator < 0) else quotient


def default_scale_bits():
    return settings.DANKU_SCALE_BITS


class FixedPoint(namedtuple("FixedPoint", ["mantissa", "scale_bits"])):
    __slots__ = ()

    @property
    def denominator(self):
        return 2 ** self.scale_bits

    def __repr__(self):
        return f"FixedPoint({self.mantissa}/2**{self.scale_bits})"


def fixed(mantissa, scale_bits=None):
    if scale_bits is None:
        scale_bits = default_scale_bits()
    return FixedPoint(mantissa=bounded(mantissa), scale_bits=scale_bits)


def from_int(value, scale_bits=None):
    if scale_bits is None:
        scale_bits = default_scale_bits()
    return fixed(value * 2 ** scale_bits, scale_bits)


def from_ratio(numerator, denominator, scale_bits=None):
    """Closest representable value of numerator/denominator, truncated toward zero"""

    if scale_bits is None:
        scale_bits = default_scale_bits()
    return fixed(truncating_div(numerator * 2 ** scale_bits, denominator), scale_bits)


def one(scale_bits=None):
    return from_int(1, scale_bits)


def zero(scale_bits=None):
    return from_int(0, scale_bits)


def same_scale(a, b):
    if a.scale_bits != b.scale_bits:
        raise ScaleMismatchError(f"Cannot combine 2**-{a.scale_bits} and 2**-{b.scale_bits} scales")
    return a.scale_bits


def fp_add(a, b):
    return fixed(a.mantissa + b.mantissa, same_scale(a, b))


def fp_sub(a, b):
    return fixed(a.mantissa - b.mantissa, same_scale(a, b))


def fp_mul(a, b):
    scale_bits = same_scale(a, b)
    product = bounded(a.mantissa * b.mantissa)
    return fixed(truncating_div(product, 2 ** scale_bits), scale_bits)


def fp_div(a, b):
    scale_bits = same_scale(a, b)
    if b.mantissa == 0:
        raise ZeroDivisionError("Fixed-point division by zero")
    numerator = bounded(a.mantissa * 2 ** scale_bits)
    return fixed(truncating_div(numerator, b.mantissa), scale_bits)


def relu(x):
    return x if x.mantissa > 0 else FixedPoint(mantissa=0, scale_bits=x.scale_bits)


def to_float(x):
    """For reports only: never used by the arithmetic itself"""

    return x.mantissa / x.denominator
