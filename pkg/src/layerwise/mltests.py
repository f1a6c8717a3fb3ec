"""Martin-Löf tests with exact measure audits, layer exclusions, and a
compression-based deficiency proxy.

A test is a sequence of open sets ``U_0, U_1, ...`` with
``measure(U_n) <= 2**-n``.  ``LAY(p)`` is the set of levels avoided by
``p`` and ``RD(p)`` the least of them.  Membership in a level is only
semi-decidable, so :func:`lay_exclusions` reports verified exclusions
(with witness words) and a provisional candidate for RD.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import count, product
from typing import Iterator, Mapping, Optional, Protocol

from .cantor import BitStream, CylinderUnion, EnumeratedUnion, Word, check_word, measure
from .codec import Codec, LZBitCodec, verify_lossless
from .dyadic import Dyadic, pow2


class MeasureBoundViolated(AssertionError):
    def __init__(self, levels: list[int], report: "AuditReport"):
        super().__init__(f"measure bound 2^-n violated at levels {levels}")
        self.levels = levels
        self.report = report


class MLTest(Protocol):
    name: str

    def level(self, n: int): ...

    def probe(self, p: BitStream, n: int, budget: int) -> Optional[Word]: ...


# ---------------------------------------------------------------------------
# test objects


@dataclass(frozen=True)
class FiniteMLTest:
    """A test whose levels are finite word lists; absent levels are empty."""

    levels: Mapping[int, CylinderUnion] = field(default_factory=dict)
    name: str = "finite"

    @classmethod
    def from_words(cls, levels: Mapping[int, list[Word]], name: str = "finite") -> "FiniteMLTest":
        return cls({int(n): CylinderUnion(tuple(ws)) for n, ws in levels.items()}, name)

    def level(self, n: int) -> CylinderUnion:
        return self.levels.get(n, CylinderUnion.empty())

    def certificate(self, n: int) -> Dyadic:
        return measure(self.level(n))

    def probe(self, p: BitStream, n: int, budget: int) -> Optional[Word]:
        """Check the words of level ``n`` whose length is exactly ``budget``."""
        for w in self.level(n):
            if len(w) == budget and p.has_prefix(w):
                return w
        return None

    def to_json(self) -> str:
        doc = {
            "kind": "finite",
            "name": self.name,
            "levels": {str(n): list(u.words) for n, u in sorted(self.levels.items())},
            "bounds": {str(n): str(self.certificate(n)) for n in sorted(self.levels)},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FiniteMLTest":
        doc = json.loads(text)
        if doc.get("kind") != "finite":
            raise ValueError("not a finite test document")
        return cls.from_words({int(n): ws for n, ws in doc["levels"].items()}, doc.get("name", "finite"))


def dilution_witness(w: Word, n: int) -> int:
    """Zero-run length k with ``w 0^k`` inside level ``n`` of the dilution test."""
    check_word(w)
    if n < 0:
        raise ValueError("level must be >= 0")
    return len(w) + n + 2


@dataclass(frozen=True)
class DilutionTest:
    """Level n is the union of ``w 0^(|w|+n+2)`` over all words w.

    The measure of level n is at most ``sum_l 2^l 2^-(2l+n+2) = 2^-(n+1)``,
    and each eventually-zero sequence lies in every level.
    """

    name: str = "dilution"

    @staticmethod
    def words(n: int) -> Iterator[Word]:
        for length in count():
            for bits in product("01", repeat=length):
                w = "".join(bits)
                yield w + "0" * dilution_witness(w, n)

    def level(self, n: int) -> EnumeratedUnion:
        return EnumeratedUnion(lambda: self.words(n), description=f"dilution level {n}")

    def truncated(self, n: int, max_len: int) -> CylinderUnion:
        """Level ``n`` restricted to words with ``|w| <= max_len``."""
        return CylinderUnion(
            tuple(w + "0" * dilution_witness(w, n)
                  for length in range(max_len + 1)
                  for w in ("".join(b) for b in product("01", repeat=length)))
        )

    def probe(self, p: BitStream, n: int, budget: int) -> Optional[Word]:
        """The only candidate of total length ``budget`` is ``w = p[:L]`` with 2L+n+2 = budget."""
        twice = budget - n - 2
        if twice < 0 or twice % 2:
            return None
        L = twice // 2
        word = p.prefix(budget)
        return word if word[L:] == "0" * (budget - L) else None

    def find_witness(self, p: BitStream, n: int, max_len: int) -> Optional[Word]:
        """First witness in enumeration order among words of total length <= max_len."""
        for budget in range(max_len + 1):
            hit = self.probe(p, n, budget)
            if hit is not None:
                return hit
        return None


# ---------------------------------------------------------------------------
# audits


@dataclass(frozen=True)
class LevelAudit:
    level: int
    measure: Dyadic
    bound: Dyadic

    @property
    def ok(self) -> bool:
        return self.measure <= self.bound

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "measure": str(self.measure),
            "bound": str(self.bound),
            "measure_float": float(self.measure),
            "pass": self.ok,
        }


@dataclass(frozen=True)
class AuditReport:
    test: str
    levels: tuple[LevelAudit, ...]

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.levels)

    def failures(self) -> list[int]:
        return [a.level for a in self.levels if not a.ok]

    def to_json(self) -> str:
        return json.dumps({"test": self.test, "pass": self.ok, "levels": [a.as_dict() for a in self.levels]},
                          sort_keys=True)


def audit_test(T, n_max: int, max_len: int = 10, strict: bool = True) -> AuditReport:
    """Exact measure of every level ``n <= n_max`` against ``2**-n``.

    Dilution levels are infinite; they are audited through their truncation
    to words of length ``<= max_len``.
    """
    rows = []
    for n in range(n_max + 1):
        U = T.truncated(n, max_len) if isinstance(T, DilutionTest) else T.level(n)
        rows.append(LevelAudit(n, measure(U), pow2(-n)))
    report = AuditReport(getattr(T, "name", type(T).__name__), tuple(rows))
    if strict and not report.ok:
        raise MeasureBoundViolated(report.failures(), report)
    return report


# ---------------------------------------------------------------------------
# layers


@dataclass(frozen=True)
class LayerVerdict:
    """Verified level exclusions with witnesses, and a provisional RD."""

    excluded: Mapping[int, Word]
    candidate_rd: int
    fuel_used: int

    def as_dict(self) -> dict:
        return {
            "excluded": {str(n): w for n, w in sorted(self.excluded.items())},
            "candidate_rd": self.candidate_rd,
            "fuel_used": self.fuel_used,
        }


def lay_exclusions(p: BitStream, T=None, fuel: int = 10_000) -> LayerVerdict:
    """Search for levels containing ``p``, dovetailed over (budget, level).

    At budget ``b`` every level ``n <= b`` is probed for witnesses of total
    length exactly ``b``.  Each probe costs one unit plus the number of new
    bits it pulls from ``p``; the search stops before the probe that would
    overrun ``fuel``.  More fuel only extends the same probe sequence.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    T = DilutionTest() if T is None else T
    excluded: dict[int, Word] = {}
    used = 0
    read = 0
    budget = 0
    done = False
    while not done:
        for n in range(budget + 1):
            if n in excluded:
                continue
            cost = 1 + max(0, budget - read)
            if used + cost > fuel:
                done = True
                break
            used += cost
            read = max(read, budget)
            hit = T.probe(p, n, budget)
            if hit is not None:
                excluded[n] = hit
        budget += 1
    rd = 0
    while rd in excluded:
        rd += 1
    return LayerVerdict(excluded, rd, used)


# ---------------------------------------------------------------------------
# deficiency proxy


def k_deficiency_upper(w: Word, codec: Codec | None = None) -> int:
    """``max_v (|v| - clen(v))`` over prefixes v of w, clipped at 0.

    ``clen`` is the codec's output length plus its overhead constant.  This
    is a heuristic stand-in for prefix complexity with no soundness claim.
    """
    check_word(w)
    codec = LZBitCodec() if codec is None else codec
    verify_lossless(codec, w)
    lengths = codec.prefix_codelengths(w)
    return max(0, max(n - (c + codec.overhead) for n, c in enumerate(lengths)))
