"""Certified Brownian paths from bit streams (Lévy–Ciesielski construction).

The input stream is split into the coefficient sequences ``alpha_0``,
``alpha_1`` and ``alpha_{j,n}`` (``1 <= j``, ``0 <= n < 2**j``) in stages:
at stage k the first ``2**(k+1)`` sequences each hold ``4k`` bits, which
uses the first ``4k * 2**(k+1)`` bits of the stream.  Each coefficient
``eta = g(alpha)`` is the normal quantile of the number ``0.alpha``, and
the path on dyadic points is

    Phi(1)           = eta_0
    Phi(1/2)         = (eta_0 + eta_1) / 2
    Phi((2n+1)/2^(j+1)) = (2^(-j/2) eta_{j,n} + Phi((n+1)/2^j) + Phi(n/2^j)) / 2

Element order: index 0 is ``alpha_0``, 1 is ``alpha_1`` and ``2**j + n``
is ``alpha_{j,n}``.  Within stage k, the new bits are laid out in four
round-robin passes over all ``2**(k+1)`` elements (the next four bits of
each old element and the first four of each new one), followed by
round-robin passes over the new elements for their remaining
``4k - 4`` bits.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

from .cantor import BitStream, Word, check_word
from .dyadic import Dyadic, pow2
from .rigor import (
    Interval,
    Precision,
    QuantileDomainDegenerate,
    iv_log,
    iv_sqrt,
    normal_quantile,
    pow2_half,
)
from .transducer import OpenNatSet, PrefixExtender, TransducerTrace

ETA_PRECISION = Precision(e=40)


class StageTooShallow(ValueError):
    pass


class HNotSmallEnough(ValueError):
    def __init__(self, h, threshold):
        super().__init__(f"h = {h} exceeds the policy threshold {threshold}")
        self.h = h
        self.threshold = threshold


class UncertifiedTube(ValueError):
    pass


class WorkBudgetExhausted(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# bit allocation


def element_count(k: int) -> int:
    """``L_k``: number of coefficient sequences in use at stage k."""
    return 1 << (k + 1)


def stage_start(k: int) -> int:
    """First stream position written at stage k (bits used by stages < k)."""
    return 4 * (k - 1) << k


def stage_end(k: int) -> int:
    """Total bits consumed through stage k."""
    return 4 * k << (k + 1)


def element_index(j: int, n: int) -> int:
    if j < 1 or not 0 <= n < 1 << j:
        raise ValueError(f"no element alpha_({j},{n})")
    return (1 << j) + n


def element_label(i: int) -> str:
    if i < 2:
        return f"alpha{i}"
    j = i.bit_length() - 1
    return f"alpha{j},{i - (1 << j)}"


def element_level(i: int) -> int:
    """Haar level j of element i (0 for alpha_0 and alpha_1)."""
    return 0 if i < 2 else i.bit_length() - 1


def intro_stage(i: int) -> int:
    return 1 if i < 4 else i.bit_length() - 1


def bit_position(i: int, t: int) -> int:
    """Stream position of bit ``t`` of element ``i``."""
    s = intro_stage(i)
    if t < 4 * s:
        k, r = s, t
    else:
        k = t // 4 + 1
        r = t - 4 * (k - 1)
    L = element_count(k)
    if r < 4:
        return stage_start(k) + r * L + i
    half = 1 << k
    return stage_start(k) + 4 * L + (r - 4) * half + (i - half)


def stage_of_position(pos: int) -> int:
    k = 1
    while stage_end(k) <= pos:
        k += 1
    return k


def owner(pos: int) -> tuple[int, int]:
    """Inverse of :func:`bit_position`: the (element, bit) written at ``pos``."""
    k = stage_of_position(pos)
    off = pos - stage_start(k)
    L = element_count(k)
    if off < 4 * L:
        r, i = divmod(off, L)
        t = r if intro_stage(i) == k else 4 * (k - 1) + r
        return i, t
    half = 1 << k
    q, rem = divmod(off - 4 * L, half)
    return half + rem, 4 + q


def first_fresh_stage(length: int) -> int:
    """Smallest stage k whose segment starts at or after ``length``."""
    k = 1
    while stage_start(k) < length:
        k += 1
    return k


@dataclass
class AlphaDecomposition:
    """The stage-k view of a stream: each of ``2**(k+1)`` elements holds 4k bits."""

    stage: int
    prefix: Word
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def consumed(self) -> int:
        return stage_end(self.stage)

    @property
    def size(self) -> int:
        return element_count(self.stage)

    def element(self, i: int) -> Word:
        if not 0 <= i < self.size:
            raise StageTooShallow(f"{element_label(i)} is not in use at stage {self.stage}")
        w = self._cache.get(i)
        if w is None:
            pre = self.prefix
            w = "".join(pre[bit_position(i, t)] for t in range(4 * self.stage))
            self._cache[i] = w
        return w

    def element_jn(self, j: int, n: int) -> Word:
        return self.element(element_index(j, n))

    def elements(self) -> list[Word]:
        return [self.element(i) for i in range(self.size)]


def allocate_bits(p: Union[BitStream, Word], k: int) -> AlphaDecomposition:
    if k < 1:
        raise ValueError("stage must be >= 1")
    n = stage_end(k)
    prefix = p.prefix(n) if isinstance(p, BitStream) else check_word(p)[:n]
    if len(prefix) < n:
        raise ValueError(f"stage {k} needs {n} bits, got {len(prefix)}")
    return AlphaDecomposition(k, prefix)


# ---------------------------------------------------------------------------
# coefficients and dyadic values


def alpha_interval(bits: Word) -> tuple[Dyadic, Dyadic]:
    m = len(bits)
    lo = Dyadic(int(bits, 2), m)
    return lo, lo + pow2(-m)


@lru_cache(maxsize=1 << 16)
def eta(bits: Word, prec: Precision = ETA_PRECISION) -> Interval:
    """Enclosure of ``g(alpha)`` for every alpha whose binary expansion starts with ``bits``."""
    check_word(bits)
    if not bits:
        raise QuantileDomainDegenerate("empty word: the quantile is unbounded")
    if "1" not in bits or "0" not in bits:
        raise QuantileDomainDegenerate(f"constant word {bits[:8]}... (length {len(bits)}) touches 0 or 1")
    lo, hi = alpha_interval(bits)
    return normal_quantile(Interval(lo, hi), prec)


def dyadic_level(t: Dyadic) -> int:
    """j for t = m/2^j in lowest terms (0 for integers)."""
    return max(t.exp, 0)


def _coerce_point(t) -> Dyadic:
    t = Dyadic.coerce(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t = {t} outside [0, 1]")
    return t


class PhiEvaluator:
    """Memoized dyadic recursion for one stage-resolved decomposition."""

    def __init__(self, decomp: AlphaDecomposition, prec: Precision = ETA_PRECISION):
        self.decomp = decomp
        self.prec = prec
        self._eta: dict[int, Interval] = {}
        self._val: dict[Dyadic, Interval] = {}

    def eta(self, i: int) -> Interval:
        v = self._eta.get(i)
        if v is None:
            v = eta(self.decomp.element(i), self.prec)
            self._eta[i] = v
        return v

    def value(self, t) -> Interval:
        t = _coerce_point(t)
        j1 = dyadic_level(t)
        if j1 > self.decomp.stage + 1:
            raise StageTooShallow(f"t = {t} has level {j1}; stage {self.decomp.stage} reaches level "
                                  f"{self.decomp.stage + 1}")
        return self._value(t)

    def _value(self, t: Dyadic) -> Interval:
        hit = self._val.get(t)
        if hit is not None:
            return hit
        if t == 0:
            v = Interval.point(0)
        elif t == 1:
            v = self.eta(0)
        elif t.exp == 1:
            v = (self.eta(0) + self.eta(1)).scale(-1)
        else:
            j = t.exp - 1
            n = (t.num - 1) // 2
            left = self._value(Dyadic(n, j))
            right = self._value(Dyadic(n + 1, j))
            v = (pow2_half(-j) * self.eta(element_index(j, n)) + left + right).scale(-1)
        self._val[t] = v
        return v

    def grid(self, j: int) -> list[tuple[Dyadic, Interval]]:
        if j > self.decomp.stage + 1:
            raise StageTooShallow(f"grid level {j} needs stage >= {j - 1}, got {self.decomp.stage}")
        return [(Dyadic(m, j), self._value(Dyadic(m, j))) for m in range((1 << j) + 1)]


def phi_dyadic(p: Union[BitStream, AlphaDecomposition], t, k: Optional[int] = None,
               prec: Precision = ETA_PRECISION) -> Interval:
    """Enclosure of Phi(p)(t) at a dyadic t from the stage-k bits of p."""
    decomp = p if isinstance(p, AlphaDecomposition) else allocate_bits(p, k)
    if k is not None and decomp.stage != k:
        decomp = allocate_bits(decomp.prefix, k)
    return PhiEvaluator(decomp, prec).value(t)


def schauder(i: int, t: Dyadic) -> Interval:
    """Enclosure of the tent function Delta_i(t) (exact except for the 2^(j/2) factor)."""
    t = Dyadic.coerce(t)
    if i == 0:
        return Interval.point(t)
    if i == 1:
        return Interval.point(min(t, 1 - t))
    j = i.bit_length() - 1
    n = i - (1 << j)
    a = Dyadic(n, j)
    b = Dyadic(n + 1, j)
    base = max(Dyadic(0), min(t - a, b - t))
    return pow2_half(j) * Interval.point(base)


def phi_series(decomp: AlphaDecomposition, t, prec: Precision = ETA_PRECISION) -> Interval:
    """Truncated Schauder series at a dyadic point.

    At a point of level J every tent of Haar level ``>= J`` vanishes, so the
    sum over elements of level ``< J`` is the exact value.
    """
    t = _coerce_point(t)
    J = dyadic_level(t)
    if J > decomp.stage + 1:
        raise StageTooShallow(f"t = {t} has level {J}; stage {decomp.stage} reaches level {decomp.stage + 1}")
    total = Interval.point(0)
    for i in range(1 << max(J, 1)):
        if element_level(i) >= max(J, 1):
            break
        d = schauder(i, t)
        if d.hi == 0:
            continue
        total = total + eta(decomp.element(i), prec) * d
    return total


# ---------------------------------------------------------------------------
# modulus of continuity and path enclosures


def default_h0(d: int) -> Dyadic:
    """Policy (not a theorem): step sizes up to ``2**-(d+10)`` count as small enough."""
    return pow2(-(d + 10))


def modulus_tube(h, d: int = 0, h0_policy: Callable[[int], Dyadic] = default_h0,
                 prec: Precision = Precision(e=40)) -> Interval:
    """Enclosure of ``sqrt(3 h ln(1/h))`` for ``0 < h <= h0_policy(d)``."""
    h = Dyadic.coerce(h)
    threshold = h0_policy(d)
    if not 0 < h <= threshold:
        raise HNotSmallEnough(h, threshold)
    log_inv = -iv_log(Interval.point(h), prec.finer(8))
    return iv_sqrt(Interval.point(3 * h) * log_inv, prec)


@dataclass(frozen=True)
class PathEnclosure:
    grid_level: int
    values: tuple[tuple[Dyadic, Interval], ...]
    tube_radius: Optional[Interval]
    stage_used: int
    layer_bound: Optional[int] = None
    policy: str = "h0(d) = 2^-(d+10); policy, not theorem"

    def value_at(self, t) -> Interval:
        t = Dyadic.coerce(t)
        for s, v in self.values:
            if s == t:
                return v
        raise KeyError(f"{t} is not a grid point of level {self.grid_level}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["t_numerator", "t_denominator_exp", "lo", "hi", "tube_lo", "tube_hi"])
        tlo = "" if self.tube_radius is None else str(self.tube_radius.lo)
        thi = "" if self.tube_radius is None else str(self.tube_radius.hi)
        for t, v in self.values:
            num = t.num << max(0, self.grid_level - t.exp)
            w.writerow([num, self.grid_level, str(v.lo), str(v.hi), tlo, thi])
        return buf.getvalue()

    def to_svg(self, width: int = 640, height: int = 320) -> str:
        """Enclosure band (and tube, when certified) as a standalone SVG."""
        tube = 0.0 if self.tube_radius is None else float(self.tube_radius.hi)
        los = [float(v.lo) - tube for _, v in self.values]
        his = [float(v.hi) + tube for _, v in self.values]
        ymin, ymax = min(los), max(his)
        span = (ymax - ymin) or 1.0
        pad = 20

        def xy(t, y):
            return (pad + float(t) * (width - 2 * pad), height - pad - (y - ymin) / span * (height - 2 * pad))

        upper = [xy(t, float(v.hi)) for t, v in self.values]
        lower = [xy(t, float(v.lo)) for t, v in self.values]
        band = " ".join(f"{x:.2f},{y:.2f}" for x, y in upper + lower[::-1])
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]
        if tube:
            tb = [xy(t, h) for (t, _), h in zip(self.values, his)] + [
                xy(t, lo) for (t, _), lo in list(zip(self.values, los))[::-1]]
            parts.append('<polygon fill="#d0e0ff" stroke="none" points="'
                         + " ".join(f"{x:.2f},{y:.2f}" for x, y in tb) + '"/>')
        parts.append(f'<polygon fill="#3060c0" stroke="#3060c0" stroke-width="0.5" points="{band}"/>')
        zx0, zy = xy(0, 0.0)
        zx1, _ = xy(1, 0.0)
        if ymin <= 0 <= ymax:
            parts.append(f'<line x1="{zx0:.2f}" y1="{zy:.2f}" x2="{zx1:.2f}" y2="{zy:.2f}" stroke="#888"/>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def path_enclosure(p: Union[BitStream, AlphaDecomposition], grid_level: int, stage: int,
                   layer_bound: Optional[int] = None, prec: Precision = ETA_PRECISION,
                   h0_policy: Callable[[int], Dyadic] = default_h0) -> PathEnclosure:
    if stage < grid_level - 1:
        raise StageTooShallow(f"grid level {grid_level} needs stage >= {grid_level - 1}, got {stage}")
    decomp = p if isinstance(p, AlphaDecomposition) and p.stage == stage else allocate_bits(
        p.prefix if isinstance(p, AlphaDecomposition) else p, stage)
    values = PhiEvaluator(decomp, prec).grid(grid_level)
    tube = None
    if layer_bound is not None:
        tube = modulus_tube(pow2(-grid_level), layer_bound, h0_policy)
    return PathEnclosure(grid_level, tuple(values), tube, stage, layer_bound)


def path_max(P: PathEnclosure) -> Interval:
    """Enclosure of the maximum of the continuous path over [0, 1]."""
    if P.tube_radius is None:
        raise UncertifiedTube("path_max needs a certified tube (pass a layer bound)")
    lo = max(v.lo for _, v in P.values)
    hi = max(v.hi for _, v in P.values) + P.tube_radius.hi
    return Interval(lo, hi)


def greater_nat(x: Interval) -> int:
    """A natural n with x <= n, assuming x encloses the true value."""
    return max(0, x.hi.ceil())


# ---------------------------------------------------------------------------
# forcing a large supremum


@dataclass(frozen=True)
class SupCertificate:
    w: Word
    point: Dyadic
    lower: Dyadic
    stage: int
    fresh_stage: int

    def as_dict(self) -> dict:
        return {"w_length": len(self.w), "point": str(self.point), "lower": str(self.lower),
                "lower_float": float(self.lower), "stage": self.stage, "fresh_stage": self.fresh_stage}


def _raised_extension(v_len: int, k_final: int) -> Word:
    """Ones from ``v_len`` to the end of stage ``k_final``, with each element's
    last stage bit set to 0 so that no coefficient word is constant."""
    end = stage_end(k_final)
    buf = bytearray(b"1" * (end - v_len))
    for i in range(element_count(k_final)):
        pos = bit_position(i, 4 * k_final - 1)
        if pos >= v_len:
            buf[pos - v_len] = ord("0")
    return buf.decode()


def force_sup_gadget(K: int, v: Word, prec: Precision = ETA_PRECISION, max_stage: int = 14,
                     depth: int = 4) -> SupCertificate:
    """Find w such that Phi(beta) exceeds K at a dyadic point for every beta extending v w.

    Every Schauder function is nonnegative, so Phi(alpha)(t) increases with
    each coefficient.  The extension therefore raises every bit it controls
    (all of them 1 except the final stage bit of each element) through stage
    k', for k' = k+1, k+2, ... where k is the first stage lying entirely
    after v.  It stops once the stage-k' enclosure has lower bound > K at
    some grid point of level <= min(k', k + depth).  Longer continuations
    only narrow the coefficient intervals, so the bound holds for all beta.
    """
    check_word(v)
    k = first_fresh_stage(len(v))
    for kp in range(max(k + 1, 2), max_stage + 1):
        w = _raised_extension(len(v), kp)
        decomp = AlphaDecomposition(kp, v + w)
        J = min(kp, k + depth)
        best_t, best_lo = None, None
        for t, val in PhiEvaluator(decomp, prec).grid(J):
            if best_lo is None or val.lo > best_lo:
                best_t, best_lo = t, val.lo
        if best_lo > K:
            return SupCertificate(w, best_t, best_lo, kp, k)
    raise WorkBudgetExhausted(f"no certificate for K = {K} up to stage {max_stage} (|v| = {len(v)})")


@dataclass
class PhiReduction:
    transducer: PrefixExtender
    certificates: list[SupCertificate]
    layer_bound: int = 0

    @property
    def output(self) -> BitStream:
        return self.transducer.output

    @property
    def trace(self) -> TransducerTrace:
        return self.transducer.trace

    def readout_stage(self, grid_level: int) -> int:
        return max([grid_level] + [c.stage for c in self.certificates])

    def readout(self, prec: Precision = ETA_PRECISION) -> int:
        """GreaterNat of the certified path maximum of the output stream."""
        self.transducer.settle()
        grid = self.layer_bound + 10
        P = path_enclosure(self.output, grid, self.readout_stage(grid), self.layer_bound, prec)
        return greater_nat(path_max(P))


def phi_reduction_transducer(I: OpenNatSet, p: BitStream, layer_bound: int = 0,
                             prec: Precision = ETA_PRECISION, max_stage: int = 14) -> PhiReduction:
    certs: list[SupCertificate] = []

    def gadget(w: Word, K: int) -> Word:
        cert = force_sup_gadget(K, w, prec, max_stage)
        certs.append(cert)
        return cert.w

    return PhiReduction(PrefixExtender(I, p, gadget, name="phi_reduction"), certs, layer_bound)


def mid_fraction(x: Interval) -> Fraction:
    return x.mid.to_fraction()
