"""Dyadic interval arithmetic and certified elementary functions.

Every routine returns an :class:`Interval` whose endpoints are exact
dyadic rationals and which contains the true mathematical result.  Series
are summed in fixed-point integer arithmetic with floor/ceil rounding on
the lower/upper track and an explicit bound on the truncated tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist

from .dyadic import CEIL, FLOOR, HALF, ZERO, Dyadic, pow2


class NegativeDomain(ValueError):
    pass


class NonpositiveDomain(ValueError):
    pass


class DomainNotInUnitInterval(ValueError):
    pass


class QuantileDomainDegenerate(ValueError):
    """The quantile is unbounded (or beyond the search bracket) on this input."""


@dataclass(frozen=True)
class Precision:
    """Requested accuracy: results of point evaluations have width <= 2**-e."""

    e: int = 40
    max_work: int = 10_000

    def __post_init__(self):
        if self.e < 0:
            raise ValueError("precision exponent must be >= 0")

    def finer(self, extra: int) -> "Precision":
        return Precision(self.e + extra, self.max_work)


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True, eq=True)
class Interval:
    lo: Dyadic
    hi: Dyadic

    def __init__(self, lo, hi=None):
        lo = Dyadic.coerce(lo)
        hi = lo if hi is None else Dyadic.coerce(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @classmethod
    def enclose(cls, x: Fraction, bits: int) -> "Interval":
        """Smallest interval on the grid ``2**-bits`` containing the rational ``x``."""
        return cls(Dyadic.from_fraction(x, bits, FLOOR), Dyadic.from_fraction(x, bits, CEIL))

    # -- queries ------------------------------------------------------

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def mid(self) -> Dyadic:
        return (self.lo + self.hi).scale(-1)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset_of(self, other: "Interval") -> bool:
        return other.contains(self)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("disjoint intervals")
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def magnitude(self) -> Dyadic:
        return max(abs(self.lo), abs(self.hi))

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other) -> "Interval":
        return _as_interval(other) - self

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other) -> "Interval":
        other = _as_interval(other)
        if self.lo >= 0 and other.lo >= 0:
            return Interval(self.lo * other.lo, self.hi * other.hi)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def scale(self, k: int) -> "Interval":
        """Exact multiplication by ``2**k``."""
        return Interval(self.lo.scale(k), self.hi.scale(k))

    def round_out(self, bits: int) -> "Interval":
        """Outward rounding to the absolute grid ``2**-bits``."""
        return Interval(self.lo.quantize(bits, FLOOR), self.hi.quantize(bits, CEIL))

    def round_sig(self, bits: int) -> "Interval":
        """Outward rounding to ``bits`` significant bits."""
        return Interval(self.lo.round_sig(bits, FLOOR), self.hi.round_sig(bits, CEIL))

    def __repr__(self) -> str:
        return f"Interval[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def iv_add(x: Interval, y: Interval) -> Interval:
    return x + y


def iv_sub(x: Interval, y: Interval) -> Interval:
    return x - y


def iv_mul(x: Interval, y: Interval) -> Interval:
    return x * y


def iv_scale_pow2(x: Interval, k: int) -> Interval:
    return x.scale(k)


def iv_reciprocal(x: Interval, bits: int) -> Interval:
    """``1/x`` for ``x`` not containing zero, rounded outward to ``bits`` significant bits."""
    if x.lo <= 0 <= x.hi:
        raise ZeroDivisionError("interval contains zero")
    lo = _fraction_sig(1 / x.hi.to_fraction(), bits, FLOOR)
    hi = _fraction_sig(1 / x.lo.to_fraction(), bits, CEIL)
    return Interval(lo, hi)


def _fraction_sig(x: Fraction, bits: int, mode: str) -> Dyadic:
    if x == 0:
        return Dyadic(0)
    mag = abs(x.numerator).bit_length() - x.denominator.bit_length()
    return Dyadic.from_fraction(x, bits - mag + 1, mode)


# ---------------------------------------------------------------------------
# square roots


def _sqrt_floor(d: Dyadic, frac_bits: int) -> int:
    """floor(sqrt(d) * 2**frac_bits) for d >= 0."""
    t = 2 * frac_bits - d.exp
    n = d.num << t if t >= 0 else d.num >> -t
    return math.isqrt(n)


def sqrt_bounds(d: Dyadic, frac_bits: int) -> tuple[Dyadic, Dyadic]:
    s = _sqrt_floor(d, frac_bits)
    lo = Dyadic(s, frac_bits)
    hi = lo if lo * lo == d else Dyadic(s + 1, frac_bits)
    return lo, hi


def iv_sqrt(x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    if x.hi < 0:
        raise NegativeDomain(f"sqrt of negative interval {x!r}")
    bits = prec.e + 2
    lo = Dyadic(0) if x.lo <= 0 else sqrt_bounds(x.lo, bits)[0]
    return Interval(lo, sqrt_bounds(x.hi, bits)[1])


# ---------------------------------------------------------------------------
# constants


def _atan_inv(x: int, frac_bits: int) -> tuple[int, int]:
    """Bounds on atan(1/x) * 2**frac_bits for an integer x >= 2."""
    one = 1 << frac_bits
    lo = hi = 0
    k = 0
    power = x
    while True:
        den = (2 * k + 1) * power
        t_lo = one // den
        t_hi = -((-one) // den)
        if t_lo == 0:
            break
        if k % 2 == 0:
            lo += t_lo
            hi += t_hi
        else:
            lo -= t_hi
            hi -= t_lo
        k += 1
        power *= x * x
    # alternating series with decreasing terms: remainder below the next term
    return lo - 1, hi + 1


@lru_cache(maxsize=None)
def _pi_fixed(frac_bits: int) -> tuple[int, int]:
    a_lo, a_hi = _atan_inv(5, frac_bits + 8)
    b_lo, b_hi = _atan_inv(239, frac_bits + 8)
    lo = 16 * a_lo - 4 * b_hi
    hi = 16 * a_hi - 4 * b_lo
    return lo >> 8, -((-hi) >> 8)


PI_BITS = 128
_pi_fixed(PI_BITS)


def pi_enclosure(bits: int = PI_BITS) -> Interval:
    """Certified enclosure of pi on the grid ``2**-bits``."""
    lo, hi = _pi_fixed(max(bits, PI_BITS))
    return Interval(Dyadic(lo, max(bits, PI_BITS)), Dyadic(hi, max(bits, PI_BITS))).round_out(bits)


@lru_cache(maxsize=None)
def sqrt2_enclosure(bits: int = PI_BITS) -> Interval:
    lo, hi = sqrt_bounds(Dyadic(2), bits)
    return Interval(lo, hi)


@lru_cache(maxsize=None)
def inv_sqrt_2pi(bits: int) -> Interval:
    """Enclosure of 1/sqrt(2*pi) on the grid ``2**-bits``."""
    pi = pi_enclosure(bits + 8)
    s_lo = sqrt_bounds(pi.lo.scale(1), bits + 8)[0]
    s_hi = sqrt_bounds(pi.hi.scale(1), bits + 8)[1]
    lo = Dyadic.div(1, s_hi, bits, FLOOR)
    hi = Dyadic.div(1, s_lo, bits, CEIL)
    return Interval(lo, hi)


def pow2_half(j: int, bits: int = PI_BITS) -> Interval:
    """Enclosure of ``2**(j/2)`` for any integer ``j``; exact for even ``j``."""
    if j % 2 == 0:
        return Interval.point(pow2(j // 2))
    # 2**(j/2) = sqrt2 * 2**((j-1)/2) for odd j of either sign
    return sqrt2_enclosure(bits).scale((j - 1) // 2)


# ---------------------------------------------------------------------------
# exp and log


def _exp_nonneg(y: Dyadic, sig_bits: int) -> tuple[Dyadic, Dyadic]:
    """Bounds on exp(y), y >= 0, with about ``sig_bits`` relative bits."""
    s = max(0, y.ceil().bit_length()) + 1
    r = y.scale(-s)  # 0 <= r <= 1/2
    fb = sig_bits + s + 10
    one = 1 << fb
    rn, re = r.num, r.exp
    if re < 0:
        rn, re = rn << -re, 0
    lo = hi = one
    t_lo = t_hi = one
    n = 1
    while True:
        den = n << re
        t_lo = (t_lo * rn) // den
        t_hi = -((-t_hi * rn) // den)
        if t_hi <= 1:
            # tail sum_{m>=n} r^m/m! <= 2 r^n/n! for r <= 1/2
            hi += 2 * t_hi + 1
            lo += t_lo
            break
        lo += t_lo
        hi += t_hi
        n += 1
    lo_d, hi_d = Dyadic(lo, fb), Dyadic(hi, fb)
    work = sig_bits + s + 8
    for _ in range(s):
        lo_d = (lo_d * lo_d).round_sig(work, FLOOR)
        hi_d = (hi_d * hi_d).round_sig(work, CEIL)
    return lo_d, hi_d


def exp_bounds(y: Dyadic, sig_bits: int) -> tuple[Dyadic, Dyadic]:
    """Rigorous bounds on exp(y) for a dyadic y, relative accuracy ~2**-sig_bits."""
    if y >= 0:
        return _exp_nonneg(y, sig_bits)
    lo, hi = _exp_nonneg(-y, sig_bits + 4)
    return (
        _fraction_sig(1 / hi.to_fraction(), sig_bits + 4, FLOOR),
        _fraction_sig(1 / lo.to_fraction(), sig_bits + 4, CEIL),
    )


def iv_exp(x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    mag = max(0, x.hi.ceil()) if x.hi > 0 else 0
    bits = prec.e + 8 + int(mag * 1.5) + 2
    return Interval(exp_bounds(x.lo, bits)[0], exp_bounds(x.hi, bits)[1])


def _atanh_series(zn: int, zd: int, frac_bits: int) -> tuple[int, int]:
    """Bounds on atanh(zn/zd) * 2**frac_bits for 0 <= zn/zd <= 1/3."""
    if zn == 0:
        return 0, 0
    one = 1 << frac_bits
    p_lo = (one * zn) // zd
    p_hi = -((-one * zn) // zd)
    z2n, z2d = zn * zn, zd * zd
    lo = hi = 0
    i = 0
    while True:
        k = 2 * i + 1
        if p_hi <= 1:
            # tail <= p/(k(1-z^2)) <= 2p for z <= 1/3
            hi += 2 * p_hi + 1
            break
        lo += p_lo // k
        hi += -((-p_hi) // k)
        p_lo = (p_lo * z2n) // z2d
        p_hi = -((-p_hi * z2n) // z2d)
        i += 1
    return lo, hi


@lru_cache(maxsize=None)
def _ln2_fixed(frac_bits: int) -> tuple[int, int]:
    lo, hi = _atanh_series(1, 3, frac_bits)
    return 2 * lo, 2 * hi


def log_bounds(y: Dyadic, frac_bits: int) -> tuple[Dyadic, Dyadic]:
    """Bounds on ln(y), y > 0, on the absolute grid ``2**-frac_bits``."""
    if y <= 0:
        raise NonpositiveDomain(f"log of {y}")
    b = y.num.bit_length()
    k = b - 1 - y.exp
    half = 1 << (b - 1)
    guard = 8 + abs(k).bit_length()
    fb = frac_bits + guard
    a_lo, a_hi = _atanh_series(y.num - half, y.num + half, fb)
    lo, hi = 2 * a_lo, 2 * a_hi
    if k:
        l2_lo, l2_hi = _ln2_fixed(fb)
        if k > 0:
            lo += k * l2_lo
            hi += k * l2_hi
        else:
            lo += k * l2_hi
            hi += k * l2_lo
    return (
        Dyadic(lo, fb).quantize(frac_bits, FLOOR),
        Dyadic(hi, fb).quantize(frac_bits, CEIL),
    )


def iv_log(x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    if x.lo <= 0:
        raise NonpositiveDomain(f"log of interval {x!r}")
    bits = prec.e + 2
    return Interval(log_bounds(x.lo, bits)[0], log_bounds(x.hi, bits)[1])


# ---------------------------------------------------------------------------
# normal distribution

SERIES_CUTOFF = 8


def _cdf_series(x: Dyadic, frac_bits: int) -> Interval:
    """Phi(x) for |x| <= 8 from the Taylor series of the error integral.

    The alternating terms peak near exp(x^2/2), so about x^2 log2(e)/2
    guard bits absorb the cancellation.
    """
    ax = abs(x)
    m, s = ax.num, ax.exp
    if s < 0:
        m, s = m << -s, 0
    m2 = m * m
    two_s = 2 * s
    guard = 16 + (((m2 >> two_s) + 1) * 3 + 3) // 4
    fb = frac_bits + guard
    # a_n = |x|^(2n+1) / (2^n n!) on the fixed-point grid 2**-fb
    a_lo = (m << fb) >> s
    a_hi = -((-(m << fb)) >> s)
    s_lo = s_hi = 0
    n = 0
    while True:
        k = 2 * n + 1
        t_lo = a_lo // k
        t_hi = -((-a_hi) // k)
        if ((n + 1) << two_s) >= m2 and t_hi <= 1:
            # |term ratio| <= x^2/(2(n+1)) <= 1/2 from here on
            s_lo -= 2 * t_hi + 1
            s_hi += 2 * t_hi + 1
            break
        if n % 2 == 0:
            s_lo += t_lo
            s_hi += t_hi
        else:
            s_lo -= t_hi
            s_hi -= t_lo
        n += 1
        den = (2 * n) << two_s
        a_lo = (a_lo * m2) // den
        a_hi = -((-a_hi * m2) // den)
    series = Interval(Dyadic(s_lo, fb), Dyadic(s_hi, fb))
    if x < 0:
        series = -series
    c = inv_sqrt_2pi(fb)
    return (Interval.point(Dyadic(1, 1)) + series * c).round_out(frac_bits + 4)


def _mills_bounds(x: Fraction) -> tuple[Fraction, Fraction]:
    """Alternating asymptotic bounds on the Mills ratio (1 - Phi(x)) / phi(x), x > 0.

    Partial sums of 1/x - 1/x^3 + 3/x^5 - 15/x^7 + ... alternate around the
    ratio; the pair with the smallest last term is returned.
    """
    x2 = x * x
    term = 1 / x
    partial = Fraction(0)
    k = 0
    sums = []
    while True:
        partial += term if k % 2 == 0 else -term
        sums.append(partial)
        nxt = term * (2 * k + 1) / x2
        if nxt >= term or k >= 40:
            break
        term = nxt
        k += 1
    if len(sums) == 1:
        return Fraction(0), sums[0]
    a, b = sums[-2], sums[-1]
    return min(a, b), max(a, b)


def _upper_tail(x: Dyadic, sig_bits: int) -> Interval:
    """1 - Phi(x) for x > 8 as phi(x) times rigorous Mills-ratio bounds."""
    half_sq = (x * x).scale(-1)
    e_lo, e_hi = exp_bounds(-half_sq, sig_bits + 8)
    c = inv_sqrt_2pi(sig_bits + 8)
    dens = Interval(e_lo, e_hi) * c
    r_lo, r_hi = _mills_bounds(x.to_fraction())
    lower = (dens.lo * _fraction_sig(r_lo, sig_bits + 8, FLOOR)).round_sig(sig_bits + 4, FLOOR)
    upper = (dens.hi * _fraction_sig(r_hi, sig_bits + 8, CEIL)).round_sig(sig_bits + 4, CEIL)
    return Interval(lower, upper)


@lru_cache(maxsize=1 << 14)
def cdf_point(x: Dyadic, bits: int) -> Interval:
    """Enclosure of Phi(x) at a dyadic point; ``bits`` controls working accuracy."""
    if abs(x) <= SERIES_CUTOFF:
        return _cdf_series(x, bits)
    if x > 0:
        tail = _upper_tail(x, bits)
        return Interval(1 - tail.hi, 1 - tail.lo)
    return _upper_tail(-x, bits)


def _clip_unit(iv: Interval) -> Interval:
    lo = max(iv.lo, Dyadic(0))
    hi = min(iv.hi, Dyadic(1))
    return Interval(lo, hi)


def normal_cdf(x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    """Enclosure of the standard normal CDF over the interval ``x``."""
    bits = prec.e + 4
    lo = cdf_point(x.lo, bits).lo
    hi = cdf_point(x.hi, bits).hi if x.hi != x.lo else cdf_point(x.lo, bits).hi
    return _clip_unit(Interval(lo, hi))


# Quantile search: deterministic bisection over the dyadic grid inside a fixed
# bracket.  Because the bisection path is fixed, the returned bound is monotone
# in the probability argument, which keeps nested inputs nested.
QUANTILE_BRACKET = 64


class _Bisector:
    def __init__(self, grid_bits: int, max_work: int):
        self.grid_bits = grid_bits
        self.levels = (grid_bits + 12, grid_bits + 40, grid_bits + 96)
        self.max_work = max_work
        self.work = 0

    def _decide(self, x: Dyadic, a: Dyadic, below: bool) -> bool:
        """below=True: certify Phi(x) <= a (from the upper bound).
        below=False: certify Phi(x) >= a (from the lower bound)."""
        for bits in self.levels:
            self.work += 1
            c = cdf_point(x, bits)
            if below:
                if c.hi <= a:
                    return True
                if c.lo > a:
                    return False
            else:
                if c.lo >= a:
                    return True
                if c.hi < a:
                    return False
        return False

    def lower(self, a: Dyadic) -> Dyadic:
        """Largest grid point on the fixed bisection path certified <= g(a)."""
        lo, hi = Dyadic(-QUANTILE_BRACKET), Dyadic(QUANTILE_BRACKET)
        if not self._decide(lo, a, below=True):
            raise QuantileDomainDegenerate(f"quantile of {float(a):.3g} below -{QUANTILE_BRACKET}")
        step = Dyadic(1, self.grid_bits)
        while hi - lo > step and self.work < self.max_work:
            mid = (lo + hi).scale(-1)
            if self._decide(mid, a, below=True):
                lo = mid
            else:
                hi = mid
        return lo

    def upper(self, a: Dyadic) -> Dyadic:
        lo, hi = Dyadic(-QUANTILE_BRACKET), Dyadic(QUANTILE_BRACKET)
        if not self._decide(hi, a, below=False):
            raise QuantileDomainDegenerate(f"quantile of {float(a):.3g} above {QUANTILE_BRACKET}")
        step = Dyadic(1, self.grid_bits)
        while hi - lo > step and self.work < self.max_work:
            mid = (lo + hi).scale(-1)
            if self._decide(mid, a, below=False):
                hi = mid
            else:
                lo = mid
        return hi


@lru_cache(maxsize=1 << 16)
def _quantile_lower(a: Dyadic, grid_bits: int, max_work: int) -> Dyadic:
    return _Bisector(grid_bits, max_work).lower(a)


@lru_cache(maxsize=1 << 16)
def _quantile_upper(a: Dyadic, grid_bits: int, max_work: int) -> Dyadic:
    return _Bisector(grid_bits, max_work).upper(a)


def normal_quantile(a: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    """Enclosure of the standard normal quantile g over ``a``, 0 < a.lo <= a.hi < 1."""
    if not (0 < a.lo and a.hi < 1):
        raise DomainNotInUnitInterval(f"quantile argument {a!r} not inside (0, 1)")
    grid = prec.e + 1
    lo = _quantile_lower(a.lo, grid, prec.max_work)
    hi = _quantile_upper(a.hi, grid, prec.max_work)
    # g(u) >= 0 exactly when u >= 1/2; clamping keeps both bounds monotone in a
    if a.lo >= HALF:
        lo = max(lo, ZERO)
    if a.hi <= HALF:
        hi = min(hi, ZERO)
    return Interval(lo, hi)


def quantile_guess(a: float) -> float:
    """Floating-point quantile, used only for reporting and tests."""
    return NormalDist().inv_cdf(a)
