"""Exact dyadic rationals ``m / 2**e``.

Every construction in this package (cell midpoints, lattice refinement,
halving in the extension scheme) stays inside the dyadic rationals, so we
carry them exactly.  A handful of operations (division by a non power of
two, interpolation along arbitrary segments) leave the dyadics; those fall
back to :class:`fractions.Fraction` via :func:`exact`.
"""

from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction
from typing import Union

Number = Union["Dyadic", Fraction, int]

_STR_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(?:2\s*\^\s*(\d+)|(\d+)))?\s*$")


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


class Dyadic(numbers.Rational):
    """A rational number whose denominator is a power of two.

    Stored canonically: ``mantissa`` odd (or zero) and ``exponent`` minimal.
    Interoperates with ``int`` and ``Fraction``; mixing with ``Fraction``
    yields a ``Fraction`` unless the result happens to be dyadic.
    """

    __slots__ = ("mantissa", "exponent", "_hash")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        if exponent < 0:
            mantissa <<= -exponent
            exponent = 0
        if mantissa == 0:
            exponent = 0
        elif exponent:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                shift = min(tz, exponent)
                mantissa >>= shift
                exponent -= shift
        self.mantissa = mantissa
        self.exponent = exponent
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def of(cls, value) -> "Dyadic":
        """Coerce ``value`` (int, Dyadic, dyadic Fraction, or string) to Dyadic."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a coordinate")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, numbers.Rational):
            den = value.denominator
            if not _is_pow2(den):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(value.numerator, den.bit_length() - 1)
        if isinstance(value, float):
            return cls.of(Fraction(value))
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"m"``, ``"m/2^e"`` or ``"m/d"`` with ``d`` a power of two."""
        match = _STR_RE.match(text)
        if not match:
            raise ValueError(f"malformed dyadic literal {text!r}")
        num, exp, den = match.groups()
        if exp is not None:
            return cls(int(num), int(exp))
        if den is not None:
            d = int(den)
            if not _is_pow2(d):
                raise ValueError(f"{text!r} is not a dyadic rational")
            return cls(int(num), d.bit_length() - 1)
        return cls(int(num), 0)

    # -- Rational protocol -------------------------------------------
    @property
    def numerator(self) -> int:
        return self.mantissa

    @property
    def denominator(self) -> int:
        return 1 << self.exponent

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.exponent)

    def __repr__(self) -> str:
        return f"Dyadic({self})"

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}/2^{self.exponent}"

    def __float__(self) -> float:
        return math.ldexp(self.mantissa, -self.exponent) if self.mantissa.bit_length() < 1000 else float(self.as_fraction())

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.as_fraction()) if self.exponent else hash(self.mantissa)
        return self._hash

    def __bool__(self) -> bool:
        return self.mantissa != 0

    # -- comparisons ---------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, Dyadic):
            e = max(self.exponent, other.exponent)
            a = self.mantissa << (e - self.exponent)
            b = other.mantissa << (e - other.exponent)
        elif isinstance(other, int):
            a = self.mantissa
            b = other << self.exponent
        elif isinstance(other, numbers.Rational):
            a = self.mantissa * other.denominator
            b = other.numerator << self.exponent
        else:
            return NotImplemented
        return (a > b) - (a < b)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, float):
            return float(self) == other
        c = self._cmp(other)
        return c if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Dyadic):
            e = max(self.exponent, other.exponent)
            return Dyadic((self.mantissa << (e - self.exponent)) + (other.mantissa << (e - other.exponent)), e)
        if isinstance(other, int):
            return Dyadic(self.mantissa + (other << self.exponent), self.exponent)
        if isinstance(other, numbers.Rational):
            return exact(self.as_fraction() + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self):
        return self

    def __abs__(self):
        return self if self.mantissa >= 0 else -self

    def __sub__(self, other):
        if isinstance(other, (Dyadic, int)):
            return self + (-other)
        if isinstance(other, numbers.Rational):
            return exact(self.as_fraction() - other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (Dyadic, int)):
            return (-self) + other
        if isinstance(other, numbers.Rational):
            return exact(other - self.as_fraction())
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Dyadic):
            return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)
        if isinstance(other, int):
            return Dyadic(self.mantissa * other, self.exponent)
        if isinstance(other, numbers.Rational):
            return exact(self.as_fraction() * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Rational):
            return exact(self.as_fraction() / Fraction(other.numerator, other.denominator))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Rational):
            return exact(Fraction(other.numerator, other.denominator) / self.as_fraction())
        return NotImplemented

    def half(self) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent + 1)

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` (``k`` may be negative)."""
        return Dyadic(self.mantissa, self.exponent - k)

    def __floordiv__(self, other):
        return math.floor(self / other)

    def __rfloordiv__(self, other):
        return math.floor(other / self)

    def __mod__(self, other):
        return self - other * (self // other)

    def __rmod__(self, other):
        return other - self * (other // self)

    def __pow__(self, k):
        if isinstance(k, int):
            if k >= 0:
                return Dyadic(self.mantissa**k, self.exponent * k)
            return exact(self.as_fraction() ** k)
        return NotImplemented

    def __rpow__(self, base):
        return base ** self.as_fraction()

    def __floor__(self) -> int:
        return self.mantissa >> self.exponent

    def __ceil__(self) -> int:
        return -((-self.mantissa) >> self.exponent)

    def __trunc__(self) -> int:
        return math.floor(self) if self.mantissa >= 0 else math.ceil(self)

    def __round__(self, ndigits=None):
        if ndigits is None:
            return round(self.as_fraction())
        return round(self.as_fraction(), ndigits)


ZERO = Dyadic(0)
ONE = Dyadic(1)


def exact(value) -> Number:
    """Normalise an exact rational: Dyadic when possible, else Fraction."""
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        return Dyadic(value)
    if isinstance(value, Fraction) and _is_pow2(value.denominator):
        return Dyadic(value.numerator, value.denominator.bit_length() - 1)
    return value


def mid(a: Number, b: Number) -> Number:
    s = a + b
    return s.half() if isinstance(s, Dyadic) else exact(Fraction(s) / 2)


def to_text(value: Number) -> str:
    """Canonical string form used by the file formats."""
    value = exact(value)
    if isinstance(value, Dyadic):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


def pow2_at_most(x) -> Dyadic:
    """Largest ``2**k`` (``k`` any integer) that is ``<= x``; ``x > 0``."""
    f = Fraction(x)
    if f <= 0:
        raise ValueError("pow2_at_most needs a positive argument")
    k = f.numerator.bit_length() - f.denominator.bit_length()
    # 2**k is within a factor 2 of f; adjust
    while Fraction(2) ** k > f:
        k -= 1
    while Fraction(2) ** (k + 1) <= f:
        k += 1
    return Dyadic(1, -k) if k <= 0 else Dyadic(1 << k)
