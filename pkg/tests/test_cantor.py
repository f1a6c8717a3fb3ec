import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from layerwise.cantor import (BitStream, CylinderUnion, EnumeratedUnion, InvalidWord, StreamExhausted, member,
                              measure, normalize, shift)
from layerwise.dyadic import Dyadic

words = st.text(alphabet="01", max_size=6)


def brute_measure(ws, depth):
    """Fraction of depth-``depth`` words extending some listed word."""
    hits = sum(1 for t in itertools.product("01", repeat=depth)
               if any("".join(t).startswith(w) for w in ws))
    return Dyadic(hits, depth)


def test_seeded_stream_is_deterministic():
    a, b = BitStream.from_seed(42), BitStream.from_seed(42)
    assert a.prefix(300) == b.prefix(300)
    assert BitStream.from_seed(43).prefix(64) != a.prefix(64)


def test_stream_sources():
    assert BitStream.from_hex("a5").prefix(8) == "10100101"
    with pytest.raises(StreamExhausted):
        BitStream.from_hex("a5").bit(8)
    assert BitStream.from_word("10", fill=1).prefix(5) == "10111"
    assert BitStream.periodic("01").prefix(5) == "01010"
    with pytest.raises(InvalidWord):
        BitStream.from_word("012")


def test_shift_examples():
    p = BitStream.from_word("011010", fill=0)
    assert shift(p, 0).prefix(6) == "011010"
    assert shift(p, 2).prefix(4) == "1010"
    q = BitStream.from_seed(5)
    assert shift(shift(q, 1), 2).prefix(64) == shift(q, 3).prefix(64)


def test_normalize_examples():
    assert normalize(CylinderUnion.of("0", "01")).words == ("0",)
    assert normalize(CylinderUnion.of("00", "01")).words == ("0",)
    assert normalize(CylinderUnion.empty()).words == ()
    assert normalize(CylinderUnion.of("000", "001", "01", "1")).words == ("",)


def test_measure_examples():
    assert measure(CylinderUnion.of("")) == 1
    assert measure(CylinderUnion.of("00", "01")) == Dyadic(1, 1)
    assert measure(CylinderUnion.of("0", "01", "111")) == Dyadic(5, 3)


@given(st.lists(words, max_size=6))
def test_measure_matches_brute_force(ws):
    U = CylinderUnion(tuple(ws))
    assert measure(U) == brute_measure(ws, 6)
    assert measure(U.normalize()) == measure(U)
    assert U.normalize().normalize() == U.normalize()


@settings(max_examples=50)
@given(st.lists(words, max_size=5), st.text(alphabet="01", min_size=6, max_size=6))
def test_normalized_form_keeps_membership(ws, probe):
    U = CylinderUnion(tuple(ws))
    N = U.normalize()
    p = BitStream.from_word(probe, fill=0)
    assert bool(member(U, p, 10)) == bool(member(N, p, 10))


def test_member_examples():
    U = CylinderUnion.of("1")
    assert member(U, BitStream.from_word("10", fill=0), 4).witness == "1"
    assert not member(U, BitStream.from_word("01", fill=0), 4)
    zeros_then_one = EnumeratedUnion(lambda: ("0" * k + "1" for k in itertools.count()), "0^k 1")
    hit = member(zeros_then_one, BitStream.from_word("0001", fill=0), 8)
    assert hit.witness == "0001" and hit.words_examined == 4


def test_member_is_monotone_in_fuel():
    U = EnumeratedUnion(lambda: ("1" * k + "0" for k in itertools.count()), "1^k 0")
    p = BitStream.from_word("111110", fill=1)
    answers = [bool(member(U, p, f)) for f in range(12)]
    assert answers == sorted(answers) and answers[-1]


def test_text_round_trip(tmp_path):
    U = CylinderUnion.of("", "01", "1")
    assert CylinderUnion.from_text(U.to_text()).words == U.words
    path = tmp_path / "u.txt"
    CylinderUnion.of("0", "11").save(path)
    assert CylinderUnion.load(path).words == ("0", "11")
    assert CylinderUnion.from_text("# comment\n0\n\n1\n").words == ("0", "1")
