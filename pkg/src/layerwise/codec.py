"""A small causal LZ-style bit codec used as a codelength proxy.

Stream layout: ``gamma(n + 1)`` for the payload length ``n``, then tokens

* literal run: ``0 gamma(len) raw-bits``
* match:       ``1 gamma(offset) gamma(len)``, copying ``len`` bits from
  ``offset`` positions back (overlap allowed, so runs cost O(log len)).

The parser is online: its state after reading a prefix determines both the
tokens already committed and the cheapest way to flush the pending segment,
so the code length of *every* prefix comes out of one left-to-right pass.
"""

from __future__ import annotations

from typing import Protocol

from .cantor import Word, check_word

# Stand-in for the machine-dependent additive constant relating a real
# compressor to prefix complexity.  It is a policy value, not a theorem.
OVERHEAD = 16
DEFAULT_WINDOW = 128


class CompressorNotLossless(RuntimeError):
    pass


class CorruptCode(ValueError):
    pass


class Codec(Protocol):
    overhead: int

    def encode(self, w: Word) -> Word: ...

    def decode(self, code: Word) -> Word: ...

    def prefix_codelengths(self, w: Word) -> list[int]: ...


def gamma(n: int) -> Word:
    """Elias gamma code of ``n >= 1``."""
    if n < 1:
        raise ValueError("gamma code needs n >= 1")
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def gamma_len(n: int) -> int:
    return 2 * n.bit_length() - 1


def read_gamma(code: Word, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(code) and code[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(code):
        raise CorruptCode("truncated gamma code")
    return int(code[pos + zeros:end], 2), end


def _literal_cost(n: int) -> int:
    return 0 if n == 0 else 1 + gamma_len(n) + n


def _match_cost(offset: int, length: int) -> int:
    return 1 + gamma_len(offset) + gamma_len(length)


class LZBitCodec:
    name = "lz-bits"

    def __init__(self, window: int = DEFAULT_WINDOW, overhead: int = OVERHEAD):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self.overhead = overhead

    def _parse(self, w: Word, lengths: list[int] | None = None) -> list[tuple]:
        """Run the online parser; returns the token list of the whole word.

        If ``lengths`` is given it receives the encoded length of every prefix.
        """
        W = self.window
        tokens: list[tuple] = []
        committed = 0
        start = 0  # first position of the pending segment
        runs = [0] * (W + 1)
        best = (0, 0, 0)  # (cost, match length, offset) of the pending flush
        if lengths is not None:
            lengths.append(gamma_len(1))
        for i, b in enumerate(w):
            top = min(W, i)
            for o in range(1, top + 1):
                runs[o] = runs[o] + 1 if w[i - o] == b else 0
            _, r_best, o_best = best
            if r_best and runs[o_best] == 0:
                # the chosen match just broke: commit the pending parse
                lit = i - start - r_best
                if lit:
                    tokens.append(("L", start, lit))
                    committed += _literal_cost(lit)
                tokens.append(("M", o_best, r_best))
                committed += _match_cost(o_best, r_best)
                start = i
                for o in range(1, top + 1):
                    runs[o] = 1 if w[i - o] == b else 0
            pending = i + 1 - start
            best = (_literal_cost(pending), 0, 0)
            for o in range(1, top + 1):
                r = runs[o]
                if r:
                    cost = _literal_cost(pending - r) + _match_cost(o, r)
                    if cost < best[0]:
                        best = (cost, r, o)
            if lengths is not None:
                lengths.append(gamma_len(i + 2) + committed + best[0])
        cost, r_best, o_best = best
        n = len(w)
        lit = n - start - r_best
        if lit:
            tokens.append(("L", start, lit))
        if r_best:
            tokens.append(("M", o_best, r_best))
        return tokens

    def encode(self, w: Word) -> Word:
        check_word(w)
        out = [gamma(len(w) + 1)]
        for kind, a, b in self._parse(w):
            if kind == "L":
                out.append("0" + gamma(b) + w[a:a + b])
            else:
                out.append("1" + gamma(a) + gamma(b))
        return "".join(out)

    def decode(self, code: Word) -> Word:
        n1, pos = read_gamma(code, 0)
        n = n1 - 1
        out: list[str] = []
        while len(out) < n:
            if pos >= len(code):
                raise CorruptCode("code ended before payload was complete")
            flag = code[pos]
            pos += 1
            if flag == "0":
                length, pos = read_gamma(code, pos)
                if pos + length > len(code):
                    raise CorruptCode("truncated literal run")
                out.extend(code[pos:pos + length])
                pos += length
            else:
                offset, pos = read_gamma(code, pos)
                length, pos = read_gamma(code, pos)
                if offset > len(out):
                    raise CorruptCode("match reaches before the start")
                for _ in range(length):
                    out.append(out[-offset])
        if len(out) != n or pos != len(code):
            raise CorruptCode("length mismatch")
        return "".join(out)

    def prefix_codelengths(self, w: Word) -> list[int]:
        """``len(encode(w[:n]))`` for n = 0..len(w), in one pass."""
        check_word(w)
        lengths: list[int] = []
        self._parse(w, lengths)
        return lengths

    def codelength(self, w: Word) -> int:
        """Proxy description length: encoded size plus the overhead constant."""
        return self.prefix_codelengths(w)[-1] + self.overhead


def verify_lossless(codec: Codec, w: Word) -> None:
    try:
        ok = codec.decode(codec.encode(w)) == w
    except CorruptCode:
        ok = False
    if not ok:
        raise CompressorNotLossless(f"{getattr(codec, 'name', codec)!s} failed to round-trip a {len(w)}-bit word")
