"""Bit streams, finite words, cylinder sets and their exact measure.

A point of Cantor space is modelled by :class:`BitStream`, a pull-based
stream whose bits are cached the first time they are requested, so that
every answer a consumer gives depends only on a finite prefix.  Open sets
are unions of cylinders ``w{0,1}^N`` and are given either as a finite word
list (:class:`CylinderUnion`) or by a deterministic word enumerator
(:class:`EnumeratedUnion`).
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional, Union

from .dyadic import Dyadic

Word = str
"""A finite binary word: a ``str`` over the alphabet ``{'0', '1'}``."""


class StreamExhausted(IndexError):
    """A finite bit source was read past its end."""


class InvalidWord(ValueError):
    pass


def check_word(w: str) -> Word:
    if not isinstance(w, str) or w.strip("01"):
        raise InvalidWord(f"not a binary word: {w!r}")
    return w


def length_lex(w: Word) -> tuple[int, Word]:
    """Sort key for the length-then-lexicographic order."""
    return (len(w), w)


# ---------------------------------------------------------------------------
# bit streams


class BitStream:
    """An infinite binary sequence read through an append-only prefix cache.

    ``source`` is an iterator of bits.  It is advanced only when a position
    beyond the cache is requested, and a position once read never changes.
    Streams are single-consumer objects; do not read one from two threads.
    """

    __slots__ = ("_cache", "_source", "origin")

    def __init__(self, source: Iterable[int], origin: str = "generator"):
        self._cache = bytearray()
        self._source = iter(source)
        self.origin = origin

    # -- constructors -------------------------------------------------

    @classmethod
    def from_seed(cls, seed: int) -> "BitStream":
        """SHA-256 in counter mode keyed by a 64-bit seed."""
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        key = seed.to_bytes(8, "big")

        def blocks():
            for counter in itertools.count():
                yield from _bytes_to_bits(hashlib.sha256(key + counter.to_bytes(8, "big")).digest())

        return cls(blocks(), origin=f"seeded-prng:{seed}")

    @classmethod
    def from_bytes(cls, data: bytes, origin: str = "bytes", tail: Optional["BitStream"] = None) -> "BitStream":
        """Big-endian bits of ``data``; reading past the end raises unless ``tail`` is given."""
        bits = _bytes_to_bits(data)
        return cls(_then(bits, tail), origin=origin)

    @classmethod
    def from_hex(cls, text: str, tail: Optional["BitStream"] = None) -> "BitStream":
        text = text.strip().lower().removeprefix("0x")
        if len(text) % 2:
            text += "0"
        return cls.from_bytes(bytes.fromhex(text), origin="hex", tail=tail)

    @classmethod
    def from_file(cls, path: Union[str, Path], tail: Optional["BitStream"] = None) -> "BitStream":
        return cls.from_bytes(Path(path).read_bytes(), origin=f"file:{path}", tail=tail)

    @classmethod
    def from_word(cls, w: Word, tail: Optional["BitStream"] = None, fill: Optional[int] = None) -> "BitStream":
        """``w`` followed by ``tail``, or by the constant ``fill`` bit, or nothing."""
        check_word(w)
        head = (int(c) for c in w)
        if tail is None and fill is not None:
            tail = cls.constant(fill)
        return cls(_then(head, tail), origin="word")

    @classmethod
    def constant(cls, bit: int) -> "BitStream":
        return cls(itertools.repeat(int(bit)), origin=f"constant:{int(bit)}")

    @classmethod
    def periodic(cls, w: Word) -> "BitStream":
        check_word(w)
        if not w:
            raise InvalidWord("period must be nonempty")
        return cls(itertools.cycle(int(c) for c in w), origin=f"periodic:{w}")

    @classmethod
    def from_function(cls, f: Callable[[int], int], origin: str = "function") -> "BitStream":
        return cls((int(f(i)) & 1 for i in itertools.count()), origin=origin)

    # -- access -------------------------------------------------------

    def _fill(self, n: int) -> None:
        cache = self._cache
        need = n - len(cache)
        if need <= 0:
            return
        chunk = bytes(itertools.islice(self._source, need))
        cache.extend(chunk)
        if len(chunk) < need:
            raise StreamExhausted(f"{self.origin} has only {len(cache)} bits, {n} requested")

    def bit(self, i: int) -> int:
        if i < 0:
            raise IndexError("negative position")
        if i >= len(self._cache):
            self._fill(i + 1)
        return self._cache[i]

    __getitem__ = bit

    def prefix(self, n: int) -> Word:
        """The first ``n`` bits as a word."""
        self._fill(n)
        return self._cache[:n].translate(_TO_ASCII).decode()

    def bits(self, start: int, stop: int) -> Word:
        """The half-open window ``p[start:stop]``."""
        self._fill(stop)
        return self._cache[start:stop].translate(_TO_ASCII).decode()

    def has_prefix(self, w: Word) -> bool:
        return self.prefix(len(w)) == w

    @property
    def cached(self) -> int:
        """How many bits have been requested so far."""
        return len(self._cache)

    def __iter__(self) -> Iterator[int]:
        for i in itertools.count():
            yield self.bit(i)

    def __repr__(self) -> str:
        shown = self._cache[:32].translate(_TO_ASCII).decode()
        return f"BitStream({self.origin}, {shown}...)"


_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")


def _bytes_to_bits(data: bytes) -> Iterator[int]:
    for byte in data:
        for k in range(7, -1, -1):
            yield (byte >> k) & 1


def _then(head: Iterable[int], tail: Optional[BitStream]) -> Iterator[int]:
    yield from head
    if tail is not None:
        yield from tail


def shift(p: BitStream, n: int) -> BitStream:
    """The shifted stream ``i -> p(i + n)``."""
    if n < 0:
        raise ValueError("shift amount must be >= 0")
    if n == 0:
        return p
    return BitStream((p.bit(i + n) for i in itertools.count()), origin=f"shift({p.origin},{n})")


# ---------------------------------------------------------------------------
# cylinder unions


def _normalize_words(words: Iterable[Word]) -> tuple[Word, ...]:
    """Prefix-free, sibling-merged, length-lex ordered word list for the same set."""
    present = set(words)
    for w in present:
        check_word(w)
    if "" in present:
        return ("",)
    # drop words that extend another listed word
    kept = set()
    for w in sorted(present, key=length_lex):
        if not any(w[:i] in kept for i in range(len(w))):
            kept.add(w)
    # merge siblings bottom-up; a merged parent can enable further merges
    by_len: dict[int, set[Word]] = {}
    for w in kept:
        by_len.setdefault(len(w), set()).add(w)
    for n in range(max(by_len, default=0), 0, -1):
        level = by_len.get(n, set())
        for w in sorted(level):
            if w not in level or w[-1] != "0":
                continue
            sib = w[:-1] + "1"
            if sib in level:
                level.discard(w)
                level.discard(sib)
                by_len.setdefault(n - 1, set()).add(w[:-1])
    out = [w for level in by_len.values() for w in level]
    return tuple(sorted(out, key=length_lex))


@dataclass(frozen=True)
class CylinderUnion:
    """The open set ``U = union of w{0,1}^N`` over a finite word list."""

    words: tuple[Word, ...] = ()
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(check_word(w) for w in self.words))

    @classmethod
    def of(cls, *words: Word) -> "CylinderUnion":
        return cls(tuple(words))

    @classmethod
    def empty(cls) -> "CylinderUnion":
        return cls((), normalized=True)

    @classmethod
    def whole(cls) -> "CylinderUnion":
        return cls(("",), normalized=True)

    def normalize(self) -> "CylinderUnion":
        if self.normalized:
            return self
        return CylinderUnion(_normalize_words(self.words), normalized=True)

    def measure(self) -> Dyadic:
        return measure(self)

    def union(self, other: "CylinderUnion") -> "CylinderUnion":
        return CylinderUnion(self.words + other.words)

    __or__ = union

    def covers_cylinder(self, w: Word) -> bool:
        """Whether the whole cylinder of ``w`` lies inside the set."""
        return _normalized_covers(self.normalize().words, w)

    def iter_words(self) -> Iterator[Word]:
        return iter(self.words)

    @property
    def is_finite(self) -> bool:
        return True

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def to_text(self) -> str:
        return "".join((w or '""') + "\n" for w in self.words)

    @classmethod
    def from_text(cls, text: str) -> "CylinderUnion":
        """Parse the word-list format: one word per line, ``#`` starts a comment.

        A line holding only ``""`` (or ``ε``) denotes the empty word.
        """
        words = []
        for line in text.splitlines():
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if body in ('""', "ε"):
                body = ""
            words.append(check_word(body))
        return cls(tuple(words))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CylinderUnion":
        return cls.from_text(Path(path).read_text())

    def save(self, path: Union[str, Path]) -> None:
        lines = ['""' if w == "" else w for w in self.words]
        Path(path).write_text("".join(line + "\n" for line in lines))


def _normalized_covers(words: tuple[Word, ...], w: Word) -> bool:
    # after sibling merging a cylinder is covered iff one listed word prefixes it
    listed = set(words)
    return any(w[:i] in listed for i in range(len(w) + 1))


@dataclass(frozen=True)
class EnumeratedUnion:
    """An effectively open set given by a deterministic word enumerator.

    ``factory()`` must return a fresh iterator producing the same words in
    the same order every time.
    """

    factory: Callable[[], Iterator[Word]]
    description: str = "enumerated"
    words_cap: Optional[int] = field(default=None, compare=False)

    def iter_words(self) -> Iterator[Word]:
        it = self.factory()
        return it if self.words_cap is None else itertools.islice(it, self.words_cap)

    @property
    def is_finite(self) -> bool:
        return self.words_cap is not None

    def materialize(self, count: int) -> CylinderUnion:
        """The finite union of the first ``count`` enumerated words."""
        return CylinderUnion(tuple(itertools.islice(self.iter_words(), count)))


OpenSet = Union[CylinderUnion, EnumeratedUnion]


def normalize(U: CylinderUnion) -> CylinderUnion:
    return U.normalize()


def measure(U: CylinderUnion) -> Dyadic:
    """Exact Lebesgue measure of a finite cylinder union."""
    words = U.normalize().words
    if not words:
        return Dyadic(0)
    depth = max(len(w) for w in words)
    return Dyadic(sum(1 << (depth - len(w)) for w in words), depth)


@dataclass(frozen=True)
class Membership:
    """Outcome of a fuel-bounded membership search: a witness word or nothing."""

    witness: Optional[Word]
    words_examined: int
    bits_read: int

    @property
    def inside(self) -> bool:
        return self.witness is not None

    def __bool__(self) -> bool:
        return self.inside


def member(U: OpenSet, p: BitStream, fuel: int) -> Membership:
    """Semi-decide ``p in U``: examine at most ``fuel`` words, each of length <= ``fuel``.

    Reading more fuel only adds checks, so a positive answer persists.
    """
    examined = 0
    bits = 0
    for w in itertools.islice(U.iter_words(), max(fuel, 0)):
        examined += 1
        if len(w) > fuel:
            continue
        bits = max(bits, len(w))
        if p.has_prefix(w):
            return Membership(w, examined, bits)
    return Membership(None, examined, bits)
