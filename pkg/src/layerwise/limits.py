"""Random-walk, ergodic-average and random-harmonic-series operators.

Each operator has a verifier working on finite prefixes, a prefix gadget
that forces a bad event after any given prefix, and a transducer that
applies the gadget whenever a new value of a Bound instance is enumerated.
All comparisons are exact (rationals, or integers against certified
enclosures of irrational margins).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .cantor import BitStream, Word, check_word
from .dyadic import CEIL, Dyadic
from .rigor import Interval, Precision, iv_log, iv_sqrt
from .transducer import OpenNatSet, PrefixExtender, TransducerTrace


class DomainTooSmall(ValueError):
    pass


class PrefixTooShort(ValueError):
    pass


class UnachievableTolerance(ValueError):
    pass


class UnresolvedComparison(ArithmeticError):
    """An integer kept straddling an enclosure up to the maximum precision."""


MAX_MARGIN_BITS = 256


# ---------------------------------------------------------------------------
# law of the iterated logarithm


def walk_sums(bits: Word) -> list[int]:
    """``S_0 .. S_len`` with ``S_n = sum_{i<n} (2 bit_i - 1)``."""
    out = [0]
    s = 0
    for c in bits:
        s += 1 if c == "1" else -1
        out.append(s)
    return out


def lil_margin_squared(n: int, prec: Precision = Precision(e=40)) -> Interval:
    """Enclosure of ``2 n ln ln n``."""
    if n < 3:
        raise DomainTooSmall(f"ln ln n needs n >= 3, got {n}")
    inner = iv_log(Interval.point(n), prec.finer(8))
    return iv_log(inner, prec.finer(4)) * Interval.point(2 * n)


def lil_margin(n: int, prec: Precision = Precision(e=40)) -> Interval:
    """Enclosure of ``sqrt(2 n ln ln n)``."""
    return iv_sqrt(lil_margin_squared(n, prec.finer(4)), prec)


def exceeds_lil_margin(s: int, n: int) -> bool:
    """Decide ``|s| >= sqrt(2 n ln ln n)`` exactly, raising precision as needed."""
    sq = s * s
    e = 32
    while e <= MAX_MARGIN_BITS:
        m = lil_margin_squared(n, Precision(e=e))
        if sq > m.hi:
            return True
        if sq < m.lo:
            return False
        e *= 2
    raise UnresolvedComparison(f"|S_{n}| = {abs(s)} straddles the margin at {MAX_MARGIN_BITS} bits")


@dataclass(frozen=True)
class Verdict:
    """``holds`` up to ``horizon``, or the first index ``at`` where it fails."""

    holds: bool
    at: Optional[int]
    horizon: int

    def as_dict(self) -> dict:
        return {"holds": self.holds, "at": self.at, "horizon": self.horizon}


def lil_verify(bits: Word, N: int, horizon: int) -> Verdict:
    """First n in [N, horizon] with ``|S_n| >= sqrt(2 n ln ln n)``, if any."""
    check_word(bits)
    if N < 3:
        raise DomainTooSmall("the margin is defined from n = 3 on")
    if horizon > len(bits):
        raise PrefixTooShort(f"horizon {horizon} beyond the {len(bits)}-bit prefix")
    sums = walk_sums(bits[:horizon])
    for n in range(N, horizon + 1):
        if exceeds_lil_margin(sums[n], n):
            return Verdict(False, n, horizon)
    return Verdict(True, None, horizon)


def lil_table(bits: Word, N: int, horizon: int) -> str:
    """CSV rows ``n, S_n, margin_lo, margin_hi`` for plotting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n", "S_n", "margin_lo", "margin_hi"])
    sums = walk_sums(bits[:horizon])
    for n in range(max(N, 3), horizon + 1):
        m = lil_margin(n)
        w.writerow([n, sums[n], str(m.lo), str(m.hi)])
    return buf.getvalue()


def auxlil_length(k: int, N: int = 0) -> int:
    return max(20, 2 * k, N - k + 1)


def lil_gadget(u: Word, N: int) -> Word:
    """``v = 1^(k+l)`` with ``|uv| > N`` and a certified violation at ``n = |uv|``."""
    check_word(u)
    k = len(u)
    l = auxlil_length(k, N)
    s_u = walk_sums(u)[-1]
    while True:
        n = 2 * k + l
        if exceeds_lil_margin(s_u + k + l, n):
            return "1" * (k + l)
        l += 1


def lil_transducer(I: OpenNatSet, p: BitStream) -> PrefixExtender:
    return PrefixExtender(I, p, lil_gadget, name="lil")


def auxlil_claim_holds(k: int) -> bool:
    """Certified check of ``l > sqrt(2 (2k+l) ln ln (2k+l))`` for ``l = max(20, 2k)``."""
    l = max(20, 2 * k)
    n = 2 * k + l
    return exceeds_lil_margin(l, n) and l * l > lil_margin_squared(n).hi


# ---------------------------------------------------------------------------
# Birkhoff averages


def birkhoff_average(w: Word, n: int) -> Fraction:
    """Average of the first ``n + 1`` bits."""
    check_word(w)
    if not 0 <= n < len(w):
        raise PrefixTooShort(f"average up to index {n} needs more than {len(w)} bits")
    return Fraction(w.count("1", 0, n + 1), n + 1)


def reaches_deviation(ones: int, count: int, k: int) -> bool:
    """Exact test of ``|ones/count - 1/2| >= 2^-k`` in integers."""
    return abs(2 * ones - count) << (k - 1) >= count if k >= 1 else False


def birkhoff_verify(w: Word, k: int, N: int, horizon: int) -> Verdict:
    """First n in [N, horizon] with ``|avg(n) - 1/2| >= 2^-k``, if any."""
    check_word(w)
    if k < 1:
        raise ValueError("k must be >= 1")
    if horizon >= len(w):
        raise PrefixTooShort(f"horizon {horizon} needs more than {len(w)} bits")
    ones = 0
    for n in range(horizon + 1):
        ones += w[n] == "1"
        if n >= N and reaches_deviation(ones, n + 1, k):
            return Verdict(False, n, horizon)
    return Verdict(True, None, horizon)


def birkhoff_gadget(u: Word, k: int, N: int) -> Word:
    """Shortest ``0^l`` (l >= 1) with ``|uv| >= N`` and deviation >= 2^-k at index |uv|-1."""
    check_word(u)
    if k < 1:
        raise ValueError("k must be >= 1")
    ones = u.count("1")
    if k == 1 and ones:
        raise UnachievableTolerance("deviation 1/2 needs a constant prefix, but u contains a 1")
    l = max(1, N - len(u))
    while not reaches_deviation(ones, len(u) + l, k):
        l += 1
    return "0" * l


def birkhoff_transducer(I: OpenNatSet, p: BitStream, k: int = 2) -> PrefixExtender:
    # The gadget only promises |uv| >= N, i.e. a deviation at index N-1; asking
    # for N+1 puts it at index >= N, so no answer <= N is valid afterwards.
    return PrefixExtender(I, p, lambda w, N: birkhoff_gadget(w, k, N + 1), name=f"birkhoff(k={k})")


# ---------------------------------------------------------------------------
# random harmonic series


def harmonic_sign(bit: int) -> int:
    """Sign of a term under the convention ``(-1)^bit``."""
    return -1 if bit else 1


@dataclass(frozen=True)
class HarmonicPartial:
    upto: int
    sum: Fraction


def harmonic_partial(p, N: int) -> HarmonicPartial:
    """``sum_{n=1}^{N} (-1)^{b_n} / n`` where ``b_n`` is stream bit ``n - 1``.

    Summed over the common denominator ``lcm(1..N)`` so that large N stays fast.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    bits = p.prefix(N) if isinstance(p, BitStream) else check_word(p)[:N]
    if len(bits) < N:
        raise PrefixTooShort(f"{N} terms need {N} bits")
    L = math.lcm(*range(1, N + 1))
    num = sum((L // n) * (-1 if bits[n - 1] == "1" else 1) for n in range(1, N + 1))
    return HarmonicPartial(N, Fraction(num, L))


def harmonic_number(N: int) -> Fraction:
    L = math.lcm(*range(1, N + 1))
    return Fraction(sum(L // n for n in range(1, N + 1)), L)


HARMONIC_BITS = 128


def _floor_recip(n: int, bits: int = HARMONIC_BITS) -> int:
    return (1 << bits) // n


def _ceil_recip(n: int, bits: int = HARMONIC_BITS) -> int:
    return -((-1 << bits) // n)


@dataclass
class HarmonicTrigger:
    """One batch of flips.  ``projected_lo`` and ``increase_lo`` are lower
    bounds (as dyadics) on the projected limit before the batch and on the
    amount the batch adds to the limit."""

    N: int
    projected_lo: Dyadic
    target: Fraction
    js: list[int]
    increase_lo: Dyadic

    def exact_increase(self) -> Fraction:
        return sum((Fraction(2, j) for j in self.js), Fraction(0))

    def as_dict(self) -> dict:
        return {"N": self.N, "projected_lo": str(self.projected_lo), "a_N": str(self.target), "js": self.js,
                "increase_lo": str(self.increase_lo), "increase_lo_float": float(self.increase_lo)}


class HarmonicGadget:
    """Flip finitely many negative terms of p to positive ones so that the
    limit of the series ends up at least ``sup a``.

    ``a`` is a finite non-decreasing sequence of rationals; ``a[N-1]`` is the
    value visible when term N has been written and the last value persists.
    Entries may be ``None`` (nothing enumerated yet).

    After term N the gadget knows the partial sum and the gain still owed
    by flips chosen earlier but not yet reached; together they are the
    projected limit, up to the tail of p.  When a lower bound for it is
    below ``a_N``, the smallest unflipped indices ``j > N`` whose bit is 1
    (term ``-1/j``) are flipped to 0 until the certified gain
    ``2 sum 1/j`` lifts the projection above ``a_N + 1``.  Each batch
    therefore raises the limit by more than 1, and a batch is never
    triggered again by a deficit an earlier batch already covers.

    Sums are kept as 128-bit fixed-point lower and upper bounds, which is
    cheap even when exact denominators have thousands of digits.
    """

    convention = "term n has sign (-1)^(bit n-1); flips turn a 1 into a 0"

    def __init__(self, p: BitStream, a: Sequence[Optional[Fraction]], bits: int = HARMONIC_BITS):
        self.p = p
        self.a = [None if x is None else Fraction(x) for x in a]
        self.bits = bits
        self.triggers: list[HarmonicTrigger] = []
        self.flips: set[int] = set()  # term indices j whose bit was flipped
        self.trace = TransducerTrace("harmonic")
        self._lo = 0  # partial sum bounds, scaled by 2^bits
        self._hi = 0
        self._pending = 0  # lower bound on the gain of flips beyond the current term
        self.output = BitStream(self._generate(), origin="transducer:harmonic")

    def target(self, N: int) -> Optional[Fraction]:
        if not self.a:
            return None
        return self.a[min(N, len(self.a)) - 1]

    def _generate(self) -> Iterator[int]:
        for N in itertools.count(1):
            b = self.p.bit(N - 1)
            if N in self.flips:
                b = 0
                self._pending -= 2 * _floor_recip(N, self.bits)
            if b:
                self._lo -= _ceil_recip(N, self.bits)
                self._hi -= _floor_recip(N, self.bits)
            else:
                self._lo += _floor_recip(N, self.bits)
                self._hi += _ceil_recip(N, self.bits)
            yield b
            a_N = self.target(N)
            if a_N is not None and self._below(self._lo + self._pending, a_N):
                self._trigger(N, a_N)

    def _below(self, scaled: int, x: Fraction) -> bool:
        return scaled * x.denominator < x.numerator << self.bits

    def _above(self, scaled: int, x: Fraction) -> bool:
        return scaled * x.denominator > x.numerator << self.bits

    def _trigger(self, N: int, a_N: Fraction) -> None:
        projected = self._lo + self._pending
        goal = a_N + 1
        gained = 0
        js = []
        j = N
        while not self._above(projected + gained, goal):
            j += 1
            if j not in self.flips and self.p.bit(j - 1) == 1:
                js.append(j)
                gained += 2 * _floor_recip(j, self.bits)
        self.flips.update(js)
        self._pending += gained
        trig = HarmonicTrigger(N, Dyadic(projected, self.bits), a_N, js, Dyadic(gained, self.bits))
        self.triggers.append(trig)
        self.trace.mind_changes += 1
        self.trace.record("flip", consumed=str(a_N), emitted=js, note=self.convention, **trig.as_dict())

    def partial_bounds(self) -> Interval:
        """Bounds on the partial sum through the last emitted term."""
        return Interval(Dyadic(self._lo, self.bits), Dyadic(self._hi, self.bits))

    def run(self, horizon: int) -> "HarmonicGadget":
        self.output.prefix(horizon)
        return self

    @property
    def hamming_distance(self) -> int:
        return len(self.flips)


def harmonic_gadget(p: BitStream, a: Sequence[Optional[Fraction]], horizon: int = 0) -> HarmonicGadget:
    return HarmonicGadget(p, a).run(horizon)


def targets_from_bound(I: OpenNatSet) -> list[Optional[Fraction]]:
    """Running maximum of a Bound instance, one entry per event."""
    out: list[Optional[Fraction]] = []
    best = None
    for e in I.events:
        if e is not None:
            best = e if best is None else max(best, e)
        out.append(None if best is None else Fraction(best))
    return out


def alternating_tail_bound(N: int, bits: int = 64) -> Interval:
    """Enclosure of the remainder after N terms of 1 - 1/2 + 1/3 - ...

    The remainder has the sign of term N+1 and magnitude below 1/(N+1).
    """
    r = Fraction(1, N + 1)
    if N % 2 == 0:  # next term 1/(N+1) is positive
        return Interval(Dyadic(0), Dyadic.from_fraction(r, bits, CEIL))
    return Interval(-Dyadic.from_fraction(r, bits, CEIL), Dyadic(0))


def sum_apr(p, q: Fraction, k: int, horizon: int, tail_bound: Optional[Interval] = None) -> Optional[int]:
    """0 if the limit is certified ``< q + 2^-k``, 1 if certified ``> q``, else None."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if tail_bound is None:
        return None
    s = harmonic_partial(p, horizon).sum
    lo = s + tail_bound.lo.to_fraction()
    hi = s + tail_bound.hi.to_fraction()
    q = Fraction(q)
    if hi < q + Fraction(1, 2 ** k):
        return 0
    if lo > q:
        return 1
    return None
