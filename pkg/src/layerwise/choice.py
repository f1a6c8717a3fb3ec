"""Closed choice on the naturals and its relatives, as stream transducers.

Closed sets of naturals arrive as exclusion streams (``n`` in the stream
means ``n`` is not in the set), open sets as enumerations.  The gadgets in
the second half turn a Bound instance into an input for the layer problem
(via the dilution test) or for the compression-deficiency problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .cantor import BitStream, Word
from .codec import Codec, LZBitCodec, verify_lossless
from .mltests import LayerVerdict, dilution_witness
from .transducer import OpenNatSet, PrefixExtender, TransducerTrace


class FuelExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class ClosedNatSet:
    """A set ``A`` of naturals given by an enumeration of its complement.

    ``exclusions`` holds ``None`` for blanks and ``n`` for "n is not in A".
    :meth:`codes` renders the usual coding where ``0`` is blank and ``n+1``
    excludes ``n``.
    """

    exclusions: tuple[Optional[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "exclusions", tuple(None if e is None else int(e) for e in self.exclusions))

    @classmethod
    def from_codes(cls, codes) -> "ClosedNatSet":
        return cls(tuple(None if c == 0 else c - 1 for c in codes))

    @classmethod
    def complement_of(cls, members: set[int], horizon: int, order=None) -> "ClosedNatSet":
        """Exclude every ``n < horizon`` outside ``members`` (in ``order`` if given)."""
        out = [n for n in range(horizon) if n not in members]
        if order is not None:
            out = list(order(out))
        return cls(tuple(out))

    def codes(self) -> list[int]:
        return [0 if e is None else e + 1 for e in self.exclusions]

    def excluded(self, upto: Optional[int] = None) -> set[int]:
        evs = self.exclusions if upto is None else self.exclusions[:upto]
        return {e for e in evs if e is not None}


# ---------------------------------------------------------------------------
# C_N-style equivalences


def u_leq_a(A: ClosedNatSet) -> tuple[OpenNatSet, TransducerTrace]:
    """Enumerate ``{n : n <= m for all m in A}`` from an exclusion stream.

    ``n`` is emitted once every ``m < n`` has been excluded; ``0`` is
    emitted before any input is read.
    """
    trace = TransducerTrace("u_leq_a")
    out: list[Optional[int]] = [0]
    trace.record("emit", consumed=None, emitted=[0], note="0 is below every member")
    excluded: set[int] = set()
    nxt = 1  # smallest value not yet emitted
    for e in A.exclusions:
        if e is None:
            out.append(None)
            continue
        excluded.add(e)
        fresh = []
        while nxt - 1 in excluded:
            fresh.append(nxt)
            nxt += 1
        out.extend(fresh if fresh else [None])
        if fresh:
            trace.record("emit", consumed=e, emitted=fresh, note="all smaller values excluded")
    return OpenNatSet(tuple(out)), trace


def max_via_argmax(U: OpenNatSet, fuel: Optional[int] = None) -> tuple[ClosedNatSet, list[int]]:
    """Exclusion stream for the indices whose enumerated value is never exceeded.

    Indices count non-blank events.  Returns the closed set together with
    the materialized index-to-value table used for lookup.
    """
    values: list[int] = []
    out: list[Optional[int]] = []
    best = -1
    alive: list[int] = []
    events = U.events if fuel is None else U.events[:fuel]
    for e in events:
        if e is None:
            out.append(None)
            continue
        idx = len(values)
        values.append(e)
        if e > best:
            out.extend(alive)  # everything seen so far is now beaten
            alive = [idx]
            best = e
        elif e < best:
            out.append(idx)
        else:
            alive.append(idx)
    return ClosedNatSet(tuple(out)), values


def choose_least(A: ClosedNatSet, candidates: int) -> int:
    """Least index below ``candidates`` not excluded by the materialized stream."""
    gone = A.excluded()
    for n in range(candidates):
        if n not in gone:
            return n
    raise FuelExhausted("every materialized candidate is excluded")


def max_by_index(U: OpenNatSet, fuel: Optional[int] = None) -> int:
    """max U computed as value-at-surviving-index of :func:`max_via_argmax`."""
    A, values = max_via_argmax(U, fuel)
    if not values:
        raise FuelExhausted("no values enumerated yet")
    return values[choose_least(A, len(values))]


def ucn_via_bound(A: ClosedNatSet, bound: int, fuel: Optional[int] = None) -> int:
    """Unique choice from a singleton ``A = {n}`` given some bound ``>= n``.

    Reads exclusions until all but one of ``0..bound`` are ruled out.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    remaining = set(range(bound + 1))
    events = A.exclusions if fuel is None else A.exclusions[:fuel]
    if len(remaining) == 1:
        return bound
    for e in events:
        if e is not None:
            remaining.discard(e)
        if len(remaining) == 1:
            return remaining.pop()
        if not remaining:
            raise ValueError("every candidate below the bound was excluded; bound invalid")
    raise FuelExhausted(f"{len(remaining)} candidates left after the available exclusions")


# ---------------------------------------------------------------------------
# Bound -> layer, Bound -> compression deficiency


@dataclass
class Reduction:
    """A pre-processor output plus the post-processor that decodes answers."""

    transducer: PrefixExtender
    decode: Callable

    @property
    def output(self) -> BitStream:
        return self.transducer.output

    @property
    def trace(self) -> TransducerTrace:
        return self.transducer.trace


def bound_to_lay_transducer(I: OpenNatSet, p: BitStream) -> Reduction:
    """For each new n, pad the output w by ``0^(|w|+n+2)``, then keep copying p.

    The padded prefix lies in dilution level n, and later insertions only
    add bits after it, so every enumerated level stays excluded.  Any level
    not excluded for the output is therefore above every element of I.
    """

    def pad(w: Word, n: int) -> Word:
        return "0" * dilution_witness(w, n)

    def decode(verdict: LayerVerdict) -> int:
        return verdict.candidate_rd

    return Reduction(PrefixExtender(I, p, pad, name="bound_to_lay"), decode)


def kol_padding_gadget(
    I: OpenNatSet,
    p: BitStream,
    codec: Optional[Codec] = None,
    max_doublings: int = 40,
) -> Reduction:
    """For each new c with current output w (|w| = n), append ``0^k`` where
    k is the first of 1, 2, 4, ... with ``clen(w 0^k) + c < n + k``.
    """
    codec = LZBitCodec() if codec is None else codec

    def clen(v: Word) -> int:
        return codec.prefix_codelengths(v)[-1] + codec.overhead

    def pad(w: Word, c: int) -> Word:
        n = len(w)
        k = 1
        for _ in range(max_doublings):
            if clen(w + "0" * k) + c < n + k:
                verify_lossless(codec, w + "0" * k)
                return "0" * k
            k *= 2
        raise FuelExhausted(f"no padding up to 2^{max_doublings} zeros satisfies the codelength inequality")

    def decode(d: int) -> int:
        return d

    return Reduction(PrefixExtender(I, p, pad, name="kol_padding"), decode)
