"""Exact dyadic rationals ``num * 2**-exp`` with directed rounding helpers."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

FLOOR = "floor"
CEIL = "ceil"


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Dyadic:
    """A dyadic rational ``num / 2**exp`` kept in canonical form.

    Canonical form: ``num`` odd, or ``num == 0`` with ``exp == 0``.
    ``exp`` may be negative (large powers of two).
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int = 0, exp: int = 0):
        num = int(num)
        exp = int(exp)
        if num == 0:
            exp = 0
        else:
            tz = (num & -num).bit_length() - 1
            if tz:
                num >>= tz
                exp -= tz
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def coerce(cls, x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Fraction) or isinstance(x, Rational):
            x = Fraction(x)
            d = x.denominator
            if d & (d - 1):
                raise ValueError(f"{x} is not a dyadic rational")
            return cls(x.numerator, d.bit_length() - 1)
        if isinstance(x, float):
            return cls.coerce(Fraction(x))
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Dyadic")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"m/2^e"``, ``"m"`` or any exact ``Fraction`` literal."""
        text = text.strip()
        if "/2^" in text:
            m, e = text.split("/2^")
            return cls(int(m), int(e))
        return cls.coerce(Fraction(text))

    @classmethod
    def from_fraction(cls, x, bits: int, mode: str) -> "Dyadic":
        """Round a rational to the grid ``2**-bits`` (absolute), toward ``mode``."""
        x = Fraction(x)
        scaled = x.numerator << bits if bits >= 0 else x.numerator
        den = x.denominator if bits >= 0 else x.denominator << -bits
        q = _floor_div(scaled, den) if mode == FLOOR else _ceil_div(scaled, den)
        return cls(q, bits)

    # -- conversions --------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.num, 1 << self.exp)
        return Fraction(self.num << -self.exp)

    def __float__(self) -> float:
        if self.exp >= 0:
            return float(self.to_fraction())
        return float(self.num << -self.exp)

    def __int__(self) -> int:
        return int(self.to_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.exp})"

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"

    def floor(self) -> int:
        if self.exp <= 0:
            return self.num << -self.exp
        return self.num >> self.exp

    def ceil(self) -> int:
        if self.exp <= 0:
            return self.num << -self.exp
        return -((-self.num) >> self.exp)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _align(a: "Dyadic", b: "Dyadic") -> tuple[int, int, int]:
        if a.exp >= b.exp:
            return a.num, b.num << (a.exp - b.exp), a.exp
        return a.num << (b.exp - a.exp), b.num, b.exp

    def __add__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        x, y, e = Dyadic._align(self, other)
        return Dyadic(x + y, e)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        x, y, e = Dyadic._align(self, other)
        return Dyadic(x - y, e)

    def __rsub__(self, other):
        return Dyadic.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return self if self.num >= 0 else -self

    def scale(self, k: int) -> "Dyadic":
        """Exact multiplication by ``2**k``."""
        if self.num == 0:
            return self
        return Dyadic(self.num, self.exp - k)

    def sign(self) -> int:
        return (self.num > 0) - (self.num < 0)

    # -- rounding -----------------------------------------------------

    def quantize(self, bits: int, mode: str) -> "Dyadic":
        """Round to the absolute grid ``2**-bits``."""
        if self.exp <= bits:
            return self
        shift = self.exp - bits
        if mode == FLOOR:
            return Dyadic(self.num >> shift, bits)
        return Dyadic(-((-self.num) >> shift), bits)

    def round_sig(self, bits: int, mode: str) -> "Dyadic":
        """Round to ``bits`` significant bits (a binary floating format)."""
        n = abs(self.num).bit_length()
        if n <= bits:
            return self
        return self.quantize(self.exp - (n - bits), mode)

    @staticmethod
    def div(a, b, bits: int, mode: str) -> "Dyadic":
        """``a / b`` rounded to the absolute grid ``2**-bits``."""
        num = Dyadic.coerce(a).to_fraction()
        den = Fraction(b) if isinstance(b, int) else Dyadic.coerce(b).to_fraction()
        return Dyadic.from_fraction(num / den, bits, mode)

    # -- comparison ---------------------------------------------------

    def _cmp(self, other) -> int:
        if isinstance(other, Dyadic):
            x, y, _ = Dyadic._align(self, other)
            return (x > y) - (x < y)
        if isinstance(other, int):
            return self._cmp(Dyadic(other))
        if isinstance(other, (Fraction, Rational)):
            f = self.to_fraction()
            return (f > other) - (f < other)
        if isinstance(other, float):
            return self._cmp(Dyadic.coerce(other))
        raise TypeError

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        try:
            return self._cmp(other) < 0
        except TypeError:
            return NotImplemented

    def __le__(self, other):
        try:
            return self._cmp(other) <= 0
        except TypeError:
            return NotImplemented

    def __gt__(self, other):
        try:
            return self._cmp(other) > 0
        except TypeError:
            return NotImplemented

    def __ge__(self, other):
        try:
            return self._cmp(other) >= 0
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __bool__(self) -> bool:
        return self.num != 0


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def pow2(k: int) -> Dyadic:
    """``2**k`` for any integer ``k``."""
    return Dyadic(1, -k)
