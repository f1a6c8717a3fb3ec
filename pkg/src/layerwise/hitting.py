"""Hitting times of the shift map: ``min{n : T^n p in S}``.

For an open target the time is found by a fair search.  For a closed
target it can only be guessed with retractions: claim 0 until ``p`` is
seen to leave the set, then claim 1, and so on.  Two gadgets from the
degree classification are included: the block coding that turns a finite
set of naturals into an open target, and the avoid-set construction
that turns an enumeration of ``{0..N}`` into a closed target of positive
measure.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .cantor import BitStream, CylinderUnion, OpenSet, Word, measure
from .dyadic import ONE, Dyadic, pow2
from .transducer import OpenNatSet


class NeverHitWithinFuel(RuntimeError):
    def __init__(self, fuel: int):
        super().__init__(f"no hit at shifts 0..{fuel - 1}")
        self.fuel = fuel


def _matches_at(p: BitStream, n: int, w: Word) -> bool:
    return p.bits(n, n + len(w)) == w


# ---------------------------------------------------------------------------
# open targets


@dataclass(frozen=True)
class HitResult:
    found: bool
    n: Optional[int] = None
    witness: Optional[Word] = None
    fuel_used: int = 0

    def as_dict(self) -> dict:
        return {"found": self.found, "n": self.n, "witness": self.witness, "fuel_used": self.fuel_used}


def hit_open(p: BitStream, U: OpenSet, fuel: int = 10_000) -> HitResult:
    """Least shift n with ``T^n p`` in ``U``, or not found within ``fuel`` word checks.

    A finite word list is scanned shift by shift against every word, so the
    reported n is the true minimum.  An enumerated target is searched in
    stages: stage s examines shifts ``0..s`` against the first s+1 words and
    reports the smallest shift hit at that stage.
    """
    used = 0
    if isinstance(U, CylinderUnion):
        words = list(U.words)
        if not words:
            return HitResult(False)
        for n in itertools.count():
            for w in words:
                if used >= fuel:
                    return HitResult(False, fuel_used=used)
                used += 1
                if _matches_at(p, n, w):
                    return HitResult(True, n, w, used)
    for s in itertools.count():
        words = list(itertools.islice(U.iter_words(), s + 1))
        for n in range(s + 1):
            for w in words:
                if used >= fuel:
                    return HitResult(False, fuel_used=used)
                used += 1
                if _matches_at(p, n, w):
                    return HitResult(True, n, w, used)


def brute_hitting_time(p: BitStream, words: Iterable[Word], max_shift: int) -> Optional[int]:
    ws = list(words)
    for n in range(max_shift + 1):
        if any(_matches_at(p, n, w) for w in ws):
            return n
    return None


@dataclass(frozen=True)
class BlockCode:
    """``q = w_0 w_1 ... w_b p`` and ``V = union of [w_i]`` over the members."""

    q: BitStream
    V: CylinderUnion
    block_length: int
    blocks: tuple[Word, ...]

    def decode(self, j: int) -> int:
        return j // self.block_length

    def export(self) -> dict:
        head = "".join(self.blocks)
        return {"q_prefix_bits": head, "q_prefix_hex": _bits_to_hex(head), "V": list(self.V.words),
                "block_length": self.block_length}


def _bits_to_hex(bits: Word) -> str:
    pad = bits + "0" * (-len(bits) % 8)
    return bytes(int(pad[i:i + 8], 2) for i in range(0, len(pad), 8)).hex()


def block_digits(b: int) -> int:
    """Digits used per index: enough for every i in 0..b, and at least one."""
    return max(1, b.bit_length())


def block_word(i: int, digits: int) -> Word:
    """``11`` followed by ``0 d`` for each binary digit d of i (most significant first)."""
    return "11" + "".join("0" + d for d in format(i, f"0{digits}b"))


def block_encode(b: int, members: Iterable[int], p: BitStream) -> BlockCode:
    """Encode a nonempty ``members`` subset of ``{0..b}`` as an open target.

    Inside the block region ``11`` only occurs at block starts, so
    ``T^j q`` is in ``V`` exactly when j is a block start whose index is a
    member; the hitting time divided by the block length is the minimum.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    members = set(members)
    if not members:
        raise ValueError("members must be nonempty")
    if not members <= set(range(b + 1)):
        raise ValueError(f"members must lie in 0..{b}")
    L = block_digits(b)
    blocks = tuple(block_word(i, L) for i in range(b + 1))
    q = BitStream.from_word("".join(blocks), tail=p)
    V = CylinderUnion(tuple(blocks[i] for i in sorted(members)))
    return BlockCode(q, V, 2 + 2 * L, blocks)


# ---------------------------------------------------------------------------
# closed targets


@dataclass(frozen=True)
class ClosedCantorSet:
    """``A`` = the complement of an open set."""

    complement: OpenSet

    @classmethod
    def whole(cls) -> "ClosedCantorSet":
        return cls(CylinderUnion.empty())

    def excluded_by(self, p: BitStream, n: int = 0, fuel: Optional[int] = None) -> Optional[Word]:
        """A word of the complement that prefixes ``T^n p`` (first found), if any."""
        words = self.complement.iter_words()
        if fuel is not None:
            words = itertools.islice(words, fuel)
        for w in words:
            if _matches_at(p, n, w):
                return w
        return None

    def measure_lower(self) -> Dyadic:
        """Exact ``1 - measure(complement)`` for a finite complement."""
        if not isinstance(self.complement, CylinderUnion):
            raise TypeError("an exact measure needs a finite complement")
        return ONE - measure(self.complement)


@dataclass
class MindChangeStream:
    """Claims ``0, 1, 2, ...``; each claim after the first carries the word
    that refuted the previous one."""

    events: list[dict] = field(default_factory=list)
    stable: bool = False
    fuel_used: int = 0

    @property
    def final_claim(self) -> int:
        return self.events[-1]["claim"]

    @property
    def mind_changes(self) -> int:
        return len(self.events) - 1

    def claims(self) -> list[int]:
        return [e["claim"] for e in self.events]

    def to_json(self) -> str:
        return json.dumps({"events": self.events, "stable": self.stable, "fuel_used": self.fuel_used},
                          sort_keys=True)


def hit_closed_mindchange(p: BitStream, A: ClosedCantorSet, fuel: int = 10_000) -> MindChangeStream:
    """Hitting time of a closed set, announced with finitely many retractions.

    ``fuel`` counts word comparisons.  With a finite complement the final
    claim is certified once all its words fail to prefix the shifted
    stream, and the stream is marked stable.  With an enumerated
    complement no claim is ever certified and ``stable`` stays False.
    """
    out = MindChangeStream()
    out.events.append({"claim": 0, "witness": None, "at_fuel": 0})
    finite = isinstance(A.complement, CylinderUnion)
    n = 0
    while True:
        refuted = None
        for w in A.complement.iter_words():
            if out.fuel_used >= fuel:
                return out
            out.fuel_used += 1
            if _matches_at(p, n, w):
                refuted = w
                break
        if refuted is None:
            out.stable = finite
            return out
        n += 1
        out.events.append({"claim": n, "witness": refuted, "at_fuel": out.fuel_used})


@dataclass(frozen=True)
class AvoidSet:
    """Closed set avoided by ``T^v p`` for every enumerated v, with its measure certificate."""

    A: ClosedCantorSet
    witnesses: dict
    complement_measure: Dyadic
    sum_bound: Dyadic

    @property
    def measure_lower(self) -> Dyadic:
        return ONE - self.complement_measure

    def as_dict(self) -> dict:
        return {
            "witnesses": {str(v): w for v, w in sorted(self.witnesses.items())},
            "complement_measure": str(self.complement_measure),
            "sum_bound": str(self.sum_bound),
            "measure_lower": str(self.measure_lower),
        }


def avoid_set_gadget(p: BitStream, q: Union[OpenNatSet, Iterable[int]]) -> AvoidSet:
    """Complement = union of the cylinders ``[p(v) .. p(2v)]`` over distinct enumerated v.

    The word for v has length v+1 and is a prefix of ``T^v p``, so every
    enumerated v is a shift that lies outside A.  Its measure is at most
    ``sum 2^-(v+1)``, which is below 1 for any finite set of v.
    """
    values = sorted(set(q.values() if isinstance(q, OpenNatSet) else (v for v in q if v is not None)))
    witnesses = {v: p.bits(v, 2 * v + 1) for v in values}
    comp = CylinderUnion(tuple(witnesses.values()))
    bound = sum((pow2(-(v + 1)) for v in values), Dyadic(0))
    return AvoidSet(ClosedCantorSet(comp), witnesses, measure(comp), bound)


def hit_clopen(p: BitStream, C: CylinderUnion, fuel: int = 1 << 20) -> int:
    """Least n with ``p[n : n+m]`` in C's word set (all words have length m)."""
    words = set(C.words)
    if not words:
        raise ValueError("clopen target must be nonempty")
    lengths = {len(w) for w in words}
    if len(lengths) != 1:
        raise ValueError("clopen target words must share one length")
    m = lengths.pop()
    for n in range(fuel):
        if p.bits(n, n + m) in words:
            return n
    raise NeverHitWithinFuel(fuel)
