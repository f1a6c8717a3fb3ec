import itertools
import random

import pytest

from layerwise.cantor import BitStream, CylinderUnion, EnumeratedUnion, measure, shift
from layerwise.dyadic import ONE, Dyadic, pow2
from layerwise.hitting import (ClosedCantorSet, NeverHitWithinFuel, avoid_set_gadget, block_digits, block_encode,
                               brute_hitting_time, hit_clopen, hit_closed_mindchange, hit_open)
from layerwise.transducer import OpenNatSet


def test_hit_open_examples():
    p = BitStream.from_word("001", fill=0)
    assert hit_open(p, CylinderUnion.of("")).n == 0
    assert hit_open(p, CylinderUnion.of("1")).n == 2
    assert not hit_open(BitStream.constant(0), CylinderUnion.of("1"), fuel=500).found
    assert not hit_open(p, CylinderUnion.empty()).found


def test_hit_open_matches_brute_force():
    rng = random.Random(5)
    for i in range(200):
        p = BitStream.from_seed(i)
        ws = ["".join(rng.choice("01") for _ in range(rng.randint(1, 5))) for _ in range(rng.randint(1, 4))]
        h = hit_open(p, CylinderUnion(tuple(ws)))
        assert h.n == brute_hitting_time(p, ws, 100_000)
        assert shift(p, h.n).has_prefix(h.witness)


def test_hit_open_on_an_enumerated_target():
    ones = EnumeratedUnion(lambda: ("0" * k + "1" * 6 for k in itertools.count()), "0^k 1^6")
    p = BitStream.from_word("0101" + "111111", fill=0)
    h = hit_open(p, ones, fuel=10_000)
    assert h.found and shift(p, h.n).has_prefix(h.witness)


def test_block_code_example():
    assert block_digits(2) == 2
    bc = block_encode(2, {1}, BitStream.from_seed(1))
    assert bc.blocks[:2] == ("110000", "110001") and bc.block_length == 6
    h = hit_open(bc.q, bc.V)
    assert h.n == 6 and bc.decode(h.n) == 1
    assert bc.decode(hit_open(block_encode(2, {0}, BitStream.from_seed(1)).q, CylinderUnion.of("110000")).n) == 0
    one = block_encode(1, {1}, BitStream.from_seed(1))
    assert one.blocks == ("1100", "1101") and one.block_length == 4


def test_block_code_exhaustive():
    for b in range(1, 5):
        for r in range(1, b + 2):
            for members in itertools.combinations(range(b + 1), r):
                for seed in range(3):
                    bc = block_encode(b, members, BitStream.from_seed(seed))
                    h = hit_open(bc.q, bc.V)
                    assert bc.decode(h.n) == min(members)
                    assert h.n % bc.block_length == 0
                    for j in range(bc.block_length * b + 1):
                        inside = any(bc.q.bits(j, j + len(w)) == w for w in bc.V.words)
                        assert inside == (j % bc.block_length == 0 and j // bc.block_length in members)


def test_mind_change_examples():
    p = BitStream.from_seed(2)
    s = hit_closed_mindchange(p, ClosedCantorSet.whole())
    assert s.claims() == [0] and s.stable
    A = ClosedCantorSet(CylinderUnion.of(p.prefix(3)))
    s = hit_closed_mindchange(p, A)
    assert s.stable and s.events[1]["witness"] == p.prefix(3)
    truth = next(n for n in range(100) if not shift(p, n).has_prefix(p.prefix(3)))
    assert s.final_claim == truth and len(s.events) == truth + 1


def test_mind_change_claims_increase_and_stop_at_fuel():
    p = BitStream.constant(0)
    A = ClosedCantorSet(CylinderUnion.of("0"))  # the constant stream never leaves the complement
    s = hit_closed_mindchange(p, A, fuel=50)
    assert not s.stable and s.claims() == list(range(len(s.events)))
    enumerated = ClosedCantorSet(EnumeratedUnion(lambda: ("1" * k for k in itertools.count(3)), "1^k"))
    s = hit_closed_mindchange(BitStream.from_word("0", fill=1), enumerated, fuel=200)
    assert not s.stable


def test_avoid_set_examples():
    p = BitStream.from_seed(5)
    g = avoid_set_gadget(p, OpenNatSet.of(0))
    assert g.A.complement.words == (p.prefix(1),)
    assert g.measure_lower == Dyadic(1, 1)
    g = avoid_set_gadget(p, [0, 1, 2, 2, 1])
    assert g.sum_bound == Dyadic(7, 3) and g.complement_measure <= g.sum_bound
    assert g.measure_lower >= pow2(-3)
    for N in range(7):
        g = avoid_set_gadget(p, range(N + 1))
        assert g.complement_measure <= ONE - pow2(-(N + 1))
        for v in range(N + 1):
            w = g.A.excluded_by(p, v)
            assert w is not None and shift(p, v).has_prefix(w)


def test_avoid_set_subword_convention():
    p = BitStream.from_word("0110100111", fill=0)
    g = avoid_set_gadget(p, [0, 1, 3])
    assert g.witnesses == {0: "0", 1: "11", 3: "0100"}


def test_clopen_examples():
    p = BitStream.from_word("0101101", fill=0)
    assert hit_clopen(p, CylinderUnion.of("0", "1")) == 0
    assert hit_clopen(p, CylinderUnion.of("11")) == 3
    with pytest.raises(NeverHitWithinFuel):
        hit_clopen(BitStream.constant(0), CylinderUnion.of("1"), fuel=100)
    with pytest.raises(ValueError):
        hit_clopen(p, CylinderUnion.of("1", "00"))
    rng = random.Random(2)
    for i in range(100):
        m = rng.randint(1, 4)
        ws = tuple({"".join(rng.choice("01") for _ in range(m)) for _ in range(3)})
        q = BitStream.from_seed(i)
        assert hit_clopen(q, CylinderUnion(ws)) == hit_open(q, CylinderUnion(ws)).n
