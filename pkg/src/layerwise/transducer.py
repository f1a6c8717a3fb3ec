"""Stream plumbing shared by the reduction gadgets.

Every reduction here has the same shape: copy an input stream ``p`` while
watching an enumeration of naturals, and whenever a value shows up for
the first time, extend the output by a block computed from the output
written so far.  Afterwards copying resumes, so the output differs from
``p`` by finitely many insertions.

Timing model: the enumeration is a finite tuple of events followed by
blanks forever.  A blank event copies one bit of ``p``; a value event
triggers the gadget (if the value is new) and copies nothing.  Once the
events are used up the transducer copies ``p`` forever.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .cantor import BitStream, Word


@dataclass(frozen=True)
class OpenNatSet:
    """An enumeration of naturals with blanks (``None``)."""

    events: tuple[Optional[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(None if e is None else int(e) for e in self.events))
        if any(e is not None and e < 0 for e in self.events):
            raise ValueError("enumerated values must be naturals")

    @classmethod
    def of(cls, *values: int) -> "OpenNatSet":
        return cls(tuple(values))

    @classmethod
    def from_iterable(cls, events: Iterable[Optional[int]]) -> "OpenNatSet":
        return cls(tuple(events))

    def denoted(self) -> frozenset[int]:
        return frozenset(e for e in self.events if e is not None)

    def values(self) -> list[int]:
        """Non-blank events in order (repetitions kept)."""
        return [e for e in self.events if e is not None]

    def __iter__(self) -> Iterator[Optional[int]]:
        return iter(self.events)


@dataclass
class TransducerTrace:
    """Audit trail: one record per step that did something worth noting."""

    name: str
    events: list[dict] = field(default_factory=list)
    mind_changes: int = 0

    def record(self, phase: str, consumed, emitted, note: str = "", **extra) -> None:
        row = {"phase": phase, "consumed": consumed, "emitted": emitted, "note": note}
        row.update(extra)
        self.events.append(row)

    def of_phase(self, phase: str) -> list[dict]:
        return [e for e in self.events if e["phase"] == phase]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)


Gadget = Callable[[Word, int], Word]


class PrefixExtender:
    """Copy ``p``, extending the output by ``gadget(output_so_far, n)`` for each new n.

    ``output`` is a lazy :class:`BitStream`.  The trace records every
    insertion as ``phase="insert"`` with the output/input positions at
    which it happened.
    """

    def __init__(self, I: OpenNatSet, p: BitStream, gadget: Gadget, name: str = "extender"):
        self.I = I
        self.p = p
        self.gadget = gadget
        self.trace = TransducerTrace(name)
        self._out = bytearray()
        self._in_pos = 0
        self._seen: set[int] = set()
        self._events_done = 0
        self.output = BitStream(self._generate(), origin=f"transducer:{name}")

    def _copy_one(self) -> Iterator[int]:
        b = self.p.bit(self._in_pos)
        self._in_pos += 1
        self._out.append(b)
        yield b

    def _generate(self) -> Iterator[int]:
        for e in self.I.events:
            self._events_done += 1
            if e is None:
                yield from self._copy_one()
                continue
            if e in self._seen:
                self.trace.record("repeat", consumed=e, emitted="", note="value already handled")
                continue
            self._seen.add(e)
            w = self._out.translate(_TO_ASCII).decode()
            block = self.gadget(w, e)
            self.trace.record(
                "insert", consumed=e, emitted=block, note=f"extend after {len(w)} output bits",
                out_pos=len(w), in_pos=self._in_pos, length=len(block),
            )
            for c in block:
                b = 1 if c == "1" else 0
                self._out.append(b)
                yield b
        self.trace.record("copy", consumed="tail", emitted="", note="events exhausted; copying input",
                          out_pos=len(self._out), in_pos=self._in_pos)
        while True:
            yield from self._copy_one()

    def settle(self) -> "PrefixExtender":
        """Pull output until every event has been processed."""
        i = self.output.cached
        while self._events_done < len(self.I.events) or not self.trace.of_phase("copy"):
            self.output.bit(i)
            i += 1
        return self

    def tail_alignment(self) -> tuple[int, int]:
        """``(N, M)`` with ``output(N + i) = p(M + i)`` for every i."""
        self.settle()
        last = self.trace.of_phase("copy")[-1]
        return last["out_pos"], last["in_pos"]

    def insertions(self) -> list[dict]:
        self.settle()
        return self.trace.of_phase("insert")


_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")
